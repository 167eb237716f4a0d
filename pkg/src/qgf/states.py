"""Pure-state simulation: eigenbasis and Trotterized evolution, initial-state recipes.

States are plain complex numpy vectors of length ``2**n``; every function
returns a new array and leaves its input untouched.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pauli import PauliSum, Spectrum, apply_pauli_string, build_tfim

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_Z = np.diag([1.0, -1.0]).astype(complex)


@dataclass(frozen=True)
class TrotterConfig:
    """First-order Trotter settings.

    ``steps_per_slice`` steps are spent per ``slice_time`` of evolution, so the
    step size stays fixed as the evolution time grows. With ``slice_time=None``
    the whole requested time is treated as one slice. ``term_order`` optionally
    permutes the Hamiltonian's stored term order.
    """

    steps_per_slice: int = 20
    slice_time: float | None = None
    term_order: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.steps_per_slice < 1:
            raise ValueError("steps_per_slice must be >= 1")
        if self.slice_time is not None and self.slice_time <= 0:
            raise ValueError("slice_time must be positive")

    def n_steps(self, t: float) -> int:
        if t == 0:
            return 0
        if self.slice_time is None:
            return self.steps_per_slice
        return max(1, round(abs(t) / self.slice_time)) * self.steps_per_slice

    def ordered_terms(self, h: PauliSum) -> list[tuple[float, str]]:
        if self.term_order is None:
            return list(h.terms)
        if sorted(self.term_order) != list(range(len(h.terms))):
            raise ValueError("term_order must be a permutation of the Hamiltonian terms")
        return [h.terms[i] for i in self.term_order]


def _check_dim(n_amp: int, psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (n_amp,):
        raise ValueError(f"state shape {psi.shape} does not match dimension {n_amp}")
    return psi


def exact_evolve(spec: Spectrum, t: float, psi: np.ndarray) -> np.ndarray:
    """``V exp(-i lambda t) V^dag psi``."""
    psi = _check_dim(spec.eigenvalues.shape[0], psi)
    if t == 0:
        return psi.copy()
    coeffs = spec.amplitudes(psi)
    return spec.eigenvectors @ (np.exp(-1j * spec.eigenvalues * t) * coeffs)


def pauli_rotation(ops: str, theta: float, psi: np.ndarray) -> np.ndarray:
    """``exp(-i theta P) psi = cos(theta) psi - i sin(theta) P psi``."""
    return np.cos(theta) * psi - 1j * np.sin(theta) * apply_pauli_string(ops, psi)


def trotter_step(terms: list[tuple[float, str]], dt: float, psi: np.ndarray) -> np.ndarray:
    for coeff, ops in terms:
        psi = pauli_rotation(ops, coeff * dt, psi)
    return psi


def trotter_evolve(h: PauliSum, t: float, cfg: TrotterConfig, psi: np.ndarray) -> np.ndarray:
    """``[prod_l exp(-i c_l h_l t/n)]^n psi`` with the identity offset as a global phase."""
    psi = _check_dim(h.dim, psi)
    n = cfg.n_steps(t)
    if n == 0:
        return psi.copy()
    terms = cfg.ordered_terms(h)
    dt = t / n
    for _ in range(n):
        psi = trotter_step(terms, dt, psi)
    return np.exp(-1j * h.identity_offset * t) * psi


def _apply_1q(psi: np.ndarray, gate: np.ndarray, q: int, n: int) -> np.ndarray:
    tensor = psi.reshape((2,) * n)
    tensor = np.moveaxis(np.tensordot(gate, tensor, axes=([1], [q])), 0, q)
    return tensor.reshape(-1)


def _apply_cnot(psi: np.ndarray, control: int, target: int, n: int) -> np.ndarray:
    idx = np.arange(2**n)
    cbit = (idx >> (n - 1 - control)) & 1
    return psi[idx ^ (cbit << (n - 1 - target))]


def zero_state(n: int) -> np.ndarray:
    psi = np.zeros(2**n, dtype=complex)
    psi[0] = 1.0
    return psi


def prepare_ghz_z(n: int) -> np.ndarray:
    """GHZ circuit followed by a phase flip on every qubit: ``(|0..0> + (-1)^n |1..1>)/sqrt 2``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    psi = _apply_1q(zero_state(n), _H, 0, n)
    for q in range(n - 1):
        psi = _apply_cnot(psi, q, q + 1, n)
    for q in range(n):
        psi = _apply_1q(psi, _Z, q, n)
    return psi


def prepare_x_ground(n: int) -> np.ndarray:
    """Each qubit in ``Z H |0> = (|0> - |1>)/sqrt 2``, the -1 eigenstate of X."""
    if n < 1:
        raise ValueError("n must be >= 1")
    psi = zero_state(n)
    for q in range(n):
        psi = _apply_1q(psi, _Z @ _H, q, n)
    return psi


def prepare_qaoa_state(n: int, betas, gammas) -> np.ndarray:
    """``prod_j exp(-i beta_j h_zz) exp(-i gamma_j h_x) |0...0>`` (rightmost factor acts first).

    ``h_zz`` uses periodic bonds and ``h_x = sum X``; both are sums of
    commuting strings, so each exponential is applied exactly term by term.
    """
    if n < 2:
        raise ValueError("the alternating ansatz needs n >= 2")
    betas = np.asarray(betas, dtype=float)
    gammas = np.asarray(gammas, dtype=float)
    if betas.shape != gammas.shape:
        raise ValueError("betas and gammas must have equal length")
    h_zz = build_tfim(n, J=-1.0, g=0.0, periodic=True)
    h_x = build_tfim(n, J=0.0, g=1.0, periodic=True)
    psi = zero_state(n)
    for beta, gamma in zip(betas[::-1], gammas[::-1]):
        for coeff, ops in h_x.terms:
            psi = pauli_rotation(ops, gamma * coeff, psi)
        for coeff, ops in h_zz.terms:
            psi = pauli_rotation(ops, beta * coeff, psi)
    return psi


def prepare_qaoa_random(n: int, seed: int) -> np.ndarray:
    """``n`` ansatz layers with angles uniform on [-pi, pi] (betas drawn first, then gammas)."""
    rng = np.random.default_rng(seed)
    betas = rng.uniform(-np.pi, np.pi, size=n)
    gammas = rng.uniform(-np.pi, np.pi, size=n)
    return prepare_qaoa_state(n, betas, gammas)


def random_state(n: int, seed: int) -> np.ndarray:
    """Haar-random pure state from a seeded generator."""
    rng = np.random.default_rng(seed)
    psi = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return psi / np.linalg.norm(psi)


def fidelity(a: np.ndarray, b: np.ndarray) -> float:
    if a.shape != b.shape:
        raise ValueError("states have different dimensions")
    return float(min(1.0, abs(np.vdot(a, b)) ** 2))
