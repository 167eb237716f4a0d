"""Density-matrix Hadamard-test circuits with per-gate Pauli noise, and zero-noise extrapolation.

Circuit conventions (fixed so noise levels are reproducible):

* qubit 0 is the Hadamard-test ancilla, register qubit ``i`` is circuit qubit ``i + 1``;
* a Pauli rotation ``exp(-i theta P)`` becomes basis changes to Z (H for X,
  H S^dag for Y), a CNOT ladder onto the last support qubit, an ancilla-controlled
  ``Rz(2 theta)``, and the mirrored ladder and basis changes. The outer gates need
  no control since they cancel when the ancilla is ``|0>``. Single-qubit terms use one
  controlled ``Rx``/``Ry``/``Rz``;
* the noise channel hits every qubit, ancilla included, after each elementary gate;
* the Hamiltonian's identity offset is a virtual, noiseless ancilla phase applied
  to the measured overlap.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ResourceLimitError
from .pauli import PauliSum
from .states import TrotterConfig

MAX_NOISY_QUBITS = 8
CHANNELS = ("bit_flip", "phase_flip")

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.diag([1.0, -1.0]).astype(complex)
_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_SDG = np.diag([1.0, -1j])
_PAULI = {"X": _X, "Y": _Y, "Z": _Z}
_TO_Z = {"X": _H, "Y": _H @ _SDG, "Z": _I2}
_CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)


@dataclass(frozen=True)
class NoiseModel:
    channel: str
    p: float

    def __post_init__(self):
        if self.channel not in CHANNELS:
            raise ValueError(f"channel must be one of {CHANNELS}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")

    def scaled(self, factor: float) -> NoiseModel:
        return NoiseModel(self.channel, self.p * factor)


def density_matrix(psi: np.ndarray) -> np.ndarray:
    return np.outer(psi, np.conj(psi))


def check_density_matrix(rho: np.ndarray, atol: float = 1e-10) -> None:
    if not np.allclose(rho, rho.conj().T, atol=atol):
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > atol:
        raise ValueError("density matrix trace is not 1")
    if np.linalg.eigvalsh(rho).min() < -1e-9:
        raise ValueError("density matrix is not positive semidefinite")


def _n_qubits(rho: np.ndarray) -> int:
    n = int(round(np.log2(rho.shape[-1])))
    if 2**n != rho.shape[-1]:
        raise ValueError("matrix dimension is not a power of two")
    return n


def _bit(n: int, q: int) -> np.ndarray:
    return (np.arange(2**n) >> (n - 1 - q)) & 1


def apply_channel(rho: np.ndarray, m: NoiseModel, qubit: int) -> np.ndarray:
    """Bit flip ``(1-p) rho + p X rho X`` or phase flip ``(1-p) rho + p Z rho Z`` on one qubit."""
    n = _n_qubits(rho)
    if not 0 <= qubit < n:
        raise ValueError(f"qubit {qubit} out of range for {n} qubits")
    if m.p == 0:
        return rho.copy()
    if m.channel == "bit_flip":
        perm = np.arange(2**n) ^ (1 << (n - 1 - qubit))
        return (1 - m.p) * rho + m.p * rho[..., perm, :][..., :, perm]
    sign = 1 - 2 * _bit(n, qubit)
    return rho * ((1 - m.p) + m.p * np.outer(sign, sign))


class _NoiseLayer:
    """Channel on every qubit, precomputed for repeated application."""

    def __init__(self, m: NoiseModel, n: int):
        self.p = m.p
        self.channel = m.channel
        if m.channel == "bit_flip":
            self.perms = [np.arange(2**n) ^ (1 << (n - 1 - q)) for q in range(n)]
        else:
            mask = np.ones((2**n, 2**n))
            for q in range(n):
                sign = 1 - 2 * _bit(n, q)
                mask = mask * ((1 - m.p) + m.p * np.outer(sign, sign))
            self.mask = mask

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        if self.p == 0:
            return rho
        if self.channel == "phase_flip":
            return rho * self.mask
        for perm in self.perms:
            rho = (1 - self.p) * rho + self.p * rho[..., perm, :][..., :, perm]
        return rho


def _embed(gate: np.ndarray, qubits: tuple[int, ...], n: int) -> np.ndarray:
    """Full ``2^n x 2^n`` matrix of a gate acting on ``qubits`` (first qubit most significant)."""
    k = len(qubits)
    eye = np.eye(2**n, dtype=complex).reshape((2,) * n + (2**n,))
    g = gate.reshape((2,) * (2 * k))
    out = np.tensordot(g, eye, axes=(list(range(k, 2 * k)), list(qubits)))
    out = np.moveaxis(out, list(range(k)), list(qubits))
    return out.reshape(2**n, 2**n)


def _controlled(gate: np.ndarray) -> np.ndarray:
    out = np.eye(4, dtype=complex)
    out[2:, 2:] = gate
    return out


def _rot(pauli: np.ndarray, phi: float) -> np.ndarray:
    """``exp(-i phi P / 2)``."""
    return np.cos(phi / 2) * _I2 - 1j * np.sin(phi / 2) * pauli


def controlled_rotation_gates(ops: str, theta: float, n_total: int) -> list[np.ndarray]:
    """Elementary gates for ancilla-controlled ``exp(-i theta P)`` on register string ``ops``."""
    support = [i for i, c in enumerate(ops) if c != "I"]
    if len(support) == 1:
        q = support[0]
        return [_embed(_controlled(_rot(_PAULI[ops[q]], 2 * theta)), (0, q + 1), n_total)]
    gates = []
    for q in support:
        if ops[q] != "Z":
            gates.append(_embed(_TO_Z[ops[q]], (q + 1,), n_total))
    target = support[-1]
    ladder = [_embed(_CNOT, (q + 1, target + 1), n_total) for q in support[:-1]]
    gates += ladder
    gates.append(_embed(_controlled(_rot(_Z, 2 * theta)), (0, target + 1), n_total))
    gates += ladder[::-1]
    for q in support:
        if ops[q] != "Z":
            gates.append(_embed(_TO_Z[ops[q]].conj().T, (q + 1,), n_total))
    return gates


def controlled_pauli_gates(ops: str, n_total: int) -> list[np.ndarray]:
    return [
        _embed(_controlled(_PAULI[c]), (0, q + 1), n_total) for q, c in enumerate(ops) if c != "I"
    ]


def _apply_gates(rho: np.ndarray, gates: list[np.ndarray], noise: _NoiseLayer) -> np.ndarray:
    for u in gates:
        rho = noise(u @ rho @ u.conj().T)
    return rho


def _ancilla_z(rho: np.ndarray, n_total: int) -> np.ndarray:
    sign = 1 - 2 * _bit(n_total, 0)
    return np.einsum("...ii,i->...", rho, sign).real


def noisy_entries(
    h: PauliSum,
    a: PauliSum,
    psi: np.ndarray,
    delta_y: float,
    ks: list[int],
    cfg: TrotterConfig,
    m: NoiseModel,
) -> tuple[np.ndarray, np.ndarray, None]:
    """Simulated Hadamard-test values of ``D_k`` and ``N_k`` (observable ``a``) for each ``k``.

    The real-part circuit (ancilla ``H|0>``) and imaginary-part circuit
    (``S^dag H|0>``) are evolved side by side; for every requested ``k`` the
    current state is branched into the ``D_k`` readout and one readout per
    Pauli term of ``a``.
    """
    n = h.n_qubits
    if n > MAX_NOISY_QUBITS:
        raise ResourceLimitError(f"{n}+1 qubits exceeds the density-matrix budget")
    n_total = n + 1
    noise = _NoiseLayer(m, n_total)

    dt = delta_y / cfg.steps_per_slice
    step = []
    for coeff, ops in cfg.ordered_terms(h):
        step += controlled_rotation_gates(ops, coeff * dt, n_total)
    h_anc = _embed(_H, (0,), n_total)
    sdg_anc = _embed(_SDG, (0,), n_total)
    branches = [controlled_pauli_gates(ops, n_total) for _, ops in a.terms]
    coeffs = np.array([c for c, _ in a.terms])

    rho0 = np.kron(np.diag([1.0, 0.0]), density_matrix(np.asarray(psi, dtype=complex)))
    rho_re = _apply_gates(rho0, [h_anc], noise)
    rho_im = _apply_gates(rho_re, [sdg_anc], noise)
    rho = np.stack([rho_re, rho_im])

    d = np.empty(len(ks), dtype=complex)
    n_h = np.empty(len(ks), dtype=complex)
    k_now = 0
    for i, k in enumerate(ks):
        while k_now < k:
            for _ in range(cfg.steps_per_slice):
                rho = _apply_gates(rho, step, noise)
            k_now += 1
        readout = _ancilla_z(_apply_gates(rho, [h_anc], noise), n_total)
        phase = np.exp(-1j * h.identity_offset * k * delta_y)
        d[i] = phase * complex(readout[0], readout[1])
        terms = np.empty(len(branches), dtype=complex)
        for l, gates in enumerate(branches):
            r = _ancilla_z(_apply_gates(rho, gates + [h_anc], noise), n_total)
            terms[l] = phase * complex(r[0], r[1])
        n_h[i] = coeffs @ terms + a.identity_offset * d[i]
    return d, n_h, None


def noisy_overlap_table(h, psi, delta_y, m_y, cfg: TrotterConfig, m: NoiseModel, observable=None):
    """Overlap table from the noisy density-matrix Hadamard-test circuits."""
    from .overlap import NoisyMode, observable_table

    mode = NoisyMode(m.channel, m.p, cfg.steps_per_slice)
    a = h if observable is None else observable
    return observable_table(a, h, psi, delta_y, m_y, mode)


def zne_extrapolate(values, scales=(1.0, 2.0)):
    """Richardson extrapolation to zero noise through all points (degree ``len - 1``).

    Works elementwise when ``values`` has a leading axis of length ``len(scales)``.
    """
    scales = np.asarray(scales, dtype=float)
    values = np.asarray(values)
    if scales.ndim != 1 or len(scales) < 2:
        raise ValueError("need at least two noise scales")
    if len(np.unique(scales)) != len(scales):
        raise ValueError("noise scales must be distinct")
    if values.shape[0] != len(scales):
        raise ValueError("one value (row) per noise scale is required")
    weights = np.array(
        [np.prod([-cj / (ci - cj) for j, cj in enumerate(scales) if j != i]) for i, ci in enumerate(scales)]
    )
    out = np.tensordot(weights, values, axes=(0, 0))
    return out.item() if np.ndim(out) == 0 else out


def mitigated_table(tables, scales=(1.0, 2.0)):
    """Entrywise zero-noise extrapolation of ``D_k`` and ``N_k`` across noise-scaled tables."""
    from dataclasses import replace

    if len(tables) != len(scales):
        raise ValueError("one table per scale is required")
    d = zne_extrapolate(np.stack([t.d for t in tables]), scales)
    n_h = zne_extrapolate(np.stack([t.n_h for t in tables]), scales)
    return replace(tables[0], d=np.asarray(d), n_h=np.asarray(n_h))
