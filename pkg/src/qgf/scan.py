"""Classical post-processing: grid scans of the filter parameters and iterative deepening in M_y."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .errors import AllDegenerate, DegenerateDenominator
from .filters import CoefficientSet, FilterParams, cosine_coefficients, filtered_ratio, gaussian_coefficients
from .overlap import EXACT, Mode, OverlapTable, compute_table, extend_table
from .pauli import PauliSum, Spectrum, diagonalize

OK = "OK"
DEGENERATE = "DEGENERATE"
TIE_TOL = 1e-12

CoefficientFactory = Callable[[float, float, OverlapTable], CoefficientSet]


def gaussian_factory(mu: float, inv_sigma_sq: float, t: OverlapTable) -> CoefficientSet:
    return gaussian_coefficients(FilterParams(mu, inv_sigma_sq, t.delta_y, t.m_y))


def cosine_factory(mu: float, inv_sigma_sq: float, t: OverlapTable) -> CoefficientSet:
    """Cosine-power filter on the table's time grid, matched to ``exp(-(H - mu)^2 / sigma^2)``.

    The time spacing ``2/L`` is pinned to ``delta_y``; the power ``L^2/delta^2``
    with ``delta = sigma/sqrt 2`` is rounded to the nearest even integer and the
    binomial support is cut at ``|y| <= m_y``.
    """
    big_l = 2.0 / t.delta_y
    power = max(2, 2 * round(big_l**2 * inv_sigma_sq))
    delta = big_l / np.sqrt(power)
    return cosine_coefficients(big_l, delta, mu, x_trunc=2 * delta * t.m_y / big_l)


@dataclass(frozen=True)
class ScanGrid:
    mu_values: np.ndarray
    inv_sigma_sq_values: np.ndarray

    def __post_init__(self):
        mu = np.atleast_1d(np.asarray(self.mu_values, dtype=float))
        s = np.atleast_1d(np.asarray(self.inv_sigma_sq_values, dtype=float))
        if mu.size == 0 or s.size == 0:
            raise ValueError("scan grid axes must be non-empty")
        if not (np.all(np.isfinite(mu)) and np.all(np.isfinite(s))):
            raise ValueError("scan grid values must be finite")
        if np.any(s <= 0):
            raise ValueError("inv_sigma_sq values must be positive")
        object.__setattr__(self, "mu_values", mu)
        object.__setattr__(self, "inv_sigma_sq_values", s)

    @classmethod
    def from_ranges(cls, mu_range, mu_step, inv_sigma_sq_range, inv_sigma_sq_step) -> ScanGrid:
        return cls(_inclusive_range(*mu_range, mu_step), _inclusive_range(*inv_sigma_sq_range, inv_sigma_sq_step))

    @property
    def size(self) -> int:
        return self.mu_values.size * self.inv_sigma_sq_values.size


def _inclusive_range(start: float, stop: float, step: float) -> np.ndarray:
    """Evenly spaced points from ``start`` to ``stop`` inclusive; direction follows the endpoints."""
    step = abs(step)
    if step == 0:
        raise ValueError("grid step must be non-zero")
    n = int(np.floor(abs(stop - start) / step + 1e-9)) + 1
    return start + np.sign(stop - start) * step * np.arange(n)


@dataclass(frozen=True)
class ScanResult:
    mu: np.ndarray
    inv_sigma_sq: np.ndarray
    energy: np.ndarray
    denom_magnitude: np.ndarray
    status: tuple[str, ...]
    best_mu: float
    best_inv_sigma_sq: float
    best_energy: float

    def energy_grid(self, n_mu: int, n_sigma: int) -> np.ndarray:
        """Energies reshaped to ``(mu, inv_sigma_sq)``; degenerate points are NaN."""
        return self.energy.reshape(n_mu, n_sigma)

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["mu", "inv_sigma_sq", "energy", "denom_magnitude", "status"])
            for row in zip(self.mu, self.inv_sigma_sq, self.energy, self.denom_magnitude, self.status):
                writer.writerow([repr(float(row[0])), repr(float(row[1])), repr(float(row[2])),
                                 repr(float(row[3])), row[4]])


def grid_scan(
    t: OverlapTable,
    grid: ScanGrid,
    coefficients: CoefficientFactory = gaussian_factory,
    den_floor: float | None = None,
) -> ScanResult:
    """Evaluate the filtered energy at every ``(mu, 1/sigma^2)`` point, row-major in ``mu``."""
    n = grid.size
    mus = np.repeat(grid.mu_values, grid.inv_sigma_sq_values.size)
    sigs = np.tile(grid.inv_sigma_sq_values, grid.mu_values.size)
    energy = np.full(n, np.nan)
    denom = np.zeros(n)
    status = []
    best = None
    for i, (mu, s) in enumerate(zip(mus, sigs)):
        c = coefficients(float(mu), float(s), t)
        try:
            energy[i], denom[i] = filtered_ratio(t, c, den_floor)
        except DegenerateDenominator:
            status.append(DEGENERATE)
            continue
        status.append(OK)
        if best is None or energy[i] < energy[best] - TIE_TOL:
            best = i
    if best is None:
        raise AllDegenerate("no grid point produced a usable denominator")
    return ScanResult(mus, sigs, energy, denom, tuple(status), float(mus[best]), float(sigs[best]), float(energy[best]))


@dataclass(frozen=True)
class DeepenStage:
    m_y: int
    phi_m: float
    scan: ScanResult

    @property
    def best_energy(self) -> float:
        return self.scan.best_energy


def iterative_deepen(
    h: PauliSum,
    psi: np.ndarray,
    delta_y: float,
    m_y_schedule: Sequence[int],
    grid: ScanGrid,
    mode: Mode = EXACT,
    evolver=None,
    spectrum: Spectrum | None = None,
    coefficients: CoefficientFactory = gaussian_factory,
) -> tuple[list[DeepenStage], OverlapTable]:
    """Scan at each cutoff of an increasing schedule, extending one table between stages."""
    schedule = [int(m) for m in m_y_schedule]
    if not schedule or any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise ValueError("m_y schedule must be non-empty and strictly increasing")
    if spectrum is None and evolver is None and mode == EXACT:
        spectrum = diagonalize(h)
    table = compute_table(h, psi, delta_y, schedule[0], mode, evolver, spectrum)
    stages = []
    for m_y in schedule:
        table = extend_table(table, m_y, h, psi, spectrum=spectrum)
        stages.append(DeepenStage(m_y, m_y * delta_y, grid_scan(table, grid, coefficients)))
    return stages, table
