"""Gaussian and cosine filter weights, filter responses and the weighted-overlap energy estimator."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import math

import numpy as np
from scipy import integrate

from .errors import DegenerateDenominator

if TYPE_CHECKING:
    from .overlap import OverlapTable

DEN_FLOOR_REL = 1e-12


@dataclass(frozen=True)
class FilterParams:
    mu: float
    inv_sigma_sq: float
    delta_y: float
    m_y: int

    def __post_init__(self):
        if self.inv_sigma_sq <= 0:
            raise ValueError("inv_sigma_sq must be positive")
        if self.delta_y <= 0:
            raise ValueError("delta_y must be positive")
        if self.m_y < 0:
            raise ValueError("m_y must be >= 0")

    @property
    def sigma(self) -> float:
        return 1.0 / np.sqrt(self.inv_sigma_sq)

    @property
    def phi_m(self) -> float:
        return self.m_y * self.delta_y


@dataclass(frozen=True)
class CvParams:
    s: float = 1.0
    fock_cutoff: int = 50
    shift_schedule: tuple[float, ...] = ()

    def __post_init__(self):
        if self.s <= 0:
            raise ValueError("squeezing factor must be positive")


@dataclass(frozen=True)
class CoefficientSet:
    """LCU weights ``b_y`` for ``y = -M..M`` and the collapsed kernel ``w_k``, ``k = -2M..2M``.

    The operator is ``sum_y b_y * step_weight * exp(-i H y time_step)``; the
    kernel is the autocorrelation of those amplitudes, so
    ``w_k = sum_{y - y' = k} a_y conj(a_y')`` with ``a = b * step_weight``.
    """

    b: np.ndarray
    time_step: float
    step_weight: float = 1.0
    kind: str = "gaussian"
    w: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.b.ndim != 1 or self.b.shape[0] % 2 != 1:
            raise ValueError("b must have odd length 2M+1")
        a = self.b * self.step_weight
        object.__setattr__(self, "w", np.convolve(a, np.conj(a[::-1])))

    @property
    def m(self) -> int:
        return (self.b.shape[0] - 1) // 2

    @property
    def amplitudes(self) -> np.ndarray:
        return self.b * self.step_weight

    @property
    def times(self) -> np.ndarray:
        return np.arange(-self.m, self.m + 1) * self.time_step

    @property
    def w_nonneg(self) -> np.ndarray:
        """Kernel entries for ``k = 0..2M``."""
        return self.w[2 * self.m :]


def gaussian_coefficients(p: FilterParams) -> CoefficientSet:
    y = np.arange(-p.m_y, p.m_y + 1)
    t = y * p.delta_y
    b = p.sigma / (2 * np.sqrt(np.pi)) * np.exp(-((t * p.sigma) ** 2) / 4) * np.exp(1j * p.mu * t)
    return CoefficientSet(b, p.delta_y, p.delta_y, "gaussian")


def response(c: CoefficientSet, lam) -> np.ndarray:
    """Complex weight ``sum_y a_y exp(-i lambda t_y)`` the LCU attaches to eigenvalue ``lambda``."""
    lam = np.asarray(lam, dtype=float)
    phases = np.exp(-1j * np.multiply.outer(lam, c.times))
    return phases @ c.amplitudes


def filter_response(p: FilterParams, lam) -> np.ndarray:
    return response(gaussian_coefficients(p), lam)


def _weighted_sums(t: OverlapTable, c: CoefficientSet) -> tuple[complex, complex]:
    if not np.isclose(c.time_step, t.delta_y, rtol=1e-12, atol=0):
        raise ValueError(f"coefficient time step {c.time_step} != table slice {t.delta_y}")
    if c.m > t.m_y:
        raise ValueError(f"coefficients need M={c.m} but table only has M={t.m_y}")
    kmax = 2 * c.m
    w = c.w_nonneg
    d = t.d[: kmax + 1]
    n_h = t.n_h[: kmax + 1]
    # k<0 half from Hermiticity: w_{-k} x_{-k} = conj(w_k x_k)
    den = w[0] * d[0] + 2 * np.sum(w[1:] * d[1:]).real
    num = w[0] * n_h[0] + 2 * np.sum(w[1:] * n_h[1:]).real
    return complex(num), complex(den)


def filtered_ratio(
    t: OverlapTable, c: CoefficientSet, den_floor: float | None = None
) -> tuple[float, float]:
    """Return ``(estimate, |denominator|)``; raises when the denominator is below the floor."""
    num, den = _weighted_sums(t, c)
    if den_floor is None:
        den_floor = DEN_FLOOR_REL * float(np.sum(np.abs(c.w)))
    if not abs(den) >= den_floor:
        raise DegenerateDenominator(f"|denominator| = {abs(den):.3e} below floor {den_floor:.3e}")
    return float((num / den).real), abs(den)


def estimate_energy(t: OverlapTable, c: CoefficientSet, den_floor: float | None = None) -> float:
    """Filtered Rayleigh quotient from a cached overlap table."""
    return filtered_ratio(t, c, den_floor)[0]


def estimate_observable(t_a: OverlapTable, c: CoefficientSet, den_floor: float | None = None) -> float:
    return filtered_ratio(t_a, c, den_floor)[0]


def eigenbasis_energy(eigenvalues: np.ndarray, weights_sq: np.ndarray, c: CoefficientSet) -> float:
    """``sum_j a_j^2 |g(lambda_j)|^2 lambda_j / sum_j a_j^2 |g(lambda_j)|^2``."""
    g2 = np.abs(response(c, eigenvalues)) ** 2 * weights_sq
    return float(np.sum(g2 * eigenvalues) / np.sum(g2))


def cosine_power(big_l: float, delta: float) -> int:
    power = round(big_l**2 / delta**2)
    if power < 2 or power % 2:
        raise ValueError(f"L^2/delta^2 = {big_l**2 / delta**2:.6g} does not round to an even integer >= 2")
    return power


def cosine_coefficients(
    big_l: float, delta: float, e_center: float = 0.0, x_trunc: float | None = None
) -> CoefficientSet:
    """Binomial LCU for ``cos((H - E)/L)^(L^2/delta^2)`` with time spacing ``2/L``.

    ``c_y = 2^-m binom(m, m/2 - y)`` for ``|y| <= x L / (2 delta)``; ``x_trunc=None``
    keeps the full binomial support ``|y| <= m/2``.
    """
    m = cosine_power(big_l, delta)
    half = m // 2
    y_max = half
    if x_trunc is not None:
        y_max = min(half, int(np.floor(x_trunc * big_l / (2 * delta) + 1e-9)))
    y = np.arange(-y_max, y_max + 1)
    # exact integer binomials; int / int true division rounds correctly
    c_y = np.array([math.comb(m, half - int(j)) / 2**m for j in y])
    b = c_y * np.exp(2j * y * e_center / big_l)
    return CoefficientSet(b, 2.0 / big_l, 1.0, "cosine")


def truncated_response_fY(h: float, sigma: float, y_cut: float) -> float:
    """``(sigma / 2 sqrt pi) int_{-Y}^{Y} exp(-sigma^2 y^2/4 - i h y) dy`` by adaptive quadrature.

    The integrand's imaginary part is odd in ``y``, so only the cosine part is kept.
    """
    if y_cut <= 0:
        raise ValueError("y_cut must be positive")
    val, _ = integrate.quad(
        lambda y: np.exp(-(sigma**2) * y**2 / 4),
        0.0,
        y_cut,
        weight="cos",
        wvar=h,
        epsabs=5e-14,
        epsrel=1e-10,
        limit=400,
    )
    return float(sigma / np.sqrt(np.pi) * val)


def truncated_response_imag(h: float, sigma: float, y_cut: float) -> float:
    """Imaginary part of the truncated integral, integrated over the full symmetric range."""
    val, _ = integrate.quad(
        lambda y: -np.exp(-(sigma**2) * y**2 / 4),
        -y_cut,
        y_cut,
        weight="sin",
        wvar=h,
        epsabs=1e-15,
        limit=400,
    )
    return float(sigma / (2 * np.sqrt(np.pi)) * val)


def discretized_response_fY(h, sigma: float, y_cut: float, dy: float) -> np.ndarray:
    """Riemann sum over ``y = j dy``, ``|j| <= Y/dy``: the zero-shift filter response."""
    m = int(round(y_cut / dy))
    p = FilterParams(0.0, 1.0 / sigma**2, dy, m)
    return filter_response(p, h)


def estimate_observable_two_time(t2, c: CoefficientSet, den_floor: float | None = None) -> float:
    """``<psi_f|A|psi_f> / <psi_f|psi_f>`` from a :class:`~qgf.overlap.TwoTimeTable`."""
    if not np.isclose(c.time_step, t2.delta_y, rtol=1e-12, atol=0) or c.m != t2.m_y:
        raise ValueError("coefficients do not match the two-time table grid")
    amp = c.amplitudes
    num = amp @ t2.o @ np.conj(amp)
    w = c.w_nonneg
    den = (w[0] * t2.d[0] + 2 * np.sum(w[1:] * t2.d[1:]).real).real
    if den_floor is None:
        den_floor = DEN_FLOOR_REL * float(np.sum(np.abs(c.w)))
    if not abs(den) >= den_floor:
        raise DegenerateDenominator(f"|denominator| = {abs(den):.3e} below floor {den_floor:.3e}")
    return float(num.real / den)
