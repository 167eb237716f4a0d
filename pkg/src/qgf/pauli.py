"""Pauli-string Hamiltonians, the transverse-field Ising builder and dense diagonalization.

Qubit ``0`` of a Pauli string is the leftmost character and the most
significant bit of a computational-basis index, i.e. ``"XI"`` is ``kron(X, I)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Iterable

import numpy as np

from .errors import ResourceLimitError

PAULI_SYMBOLS = "IXYZ"
MAX_DENSE_QUBITS = 12

_PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def check_pauli_string(ops: str, n_qubits: int | None = None) -> str:
    ops = ops.upper()
    if not ops or any(c not in PAULI_SYMBOLS for c in ops):
        raise ValueError(f"invalid Pauli string {ops!r}")
    if n_qubits is not None and len(ops) != n_qubits:
        raise ValueError(f"Pauli string {ops!r} has length {len(ops)}, expected {n_qubits}")
    return ops


def is_identity(ops: str) -> bool:
    return set(ops) <= {"I"}


@lru_cache(maxsize=4096)
def _string_action(ops: str) -> tuple[np.ndarray, np.ndarray]:
    """Index permutation and phases with ``(P psi)[i] = phase[i] * psi[perm[i]]``."""
    n = len(ops)
    xmask = zmask = 0
    n_y = 0
    for q, c in enumerate(ops):
        bit = 1 << (n - 1 - q)
        if c in "XY":
            xmask |= bit
        if c in "ZY":
            zmask |= bit
        n_y += c == "Y"
    idx = np.arange(2**n, dtype=np.int64)
    perm = idx ^ xmask
    # P|b> = i^{n_y} (-1)^{|b & zmask|} |b ^ xmask>, gathered at the target index
    parity = (np.bitwise_count(perm & zmask) & 1).astype(np.int64)
    phase = (1j**n_y) * (1 - 2 * parity).astype(complex)
    perm.flags.writeable = False
    phase.flags.writeable = False
    return perm, phase


def apply_pauli_string(ops: str, psi: np.ndarray) -> np.ndarray:
    """Return ``P|psi>`` for a single Pauli string (no coefficient)."""
    if psi.shape[0] != 2 ** len(ops):
        raise ValueError(f"state of length {psi.shape[0]} does not match {len(ops)} qubits")
    perm, phase = _string_action(ops)
    return phase * psi[perm]


def pauli_string_matrix(ops: str) -> np.ndarray:
    """Dense matrix of a Pauli string built by Kronecker products."""
    out = np.ones((1, 1), dtype=complex)
    for c in ops:
        out = np.kron(out, _PAULI_MATRICES[c])
    return out


@dataclass(frozen=True)
class PauliSum:
    """Real-weighted sum of Pauli strings plus a separately stored identity offset.

    Construct through :meth:`from_terms` to get duplicate merging and
    zero-coefficient removal; the constructor itself only validates.
    """

    n_qubits: int
    terms: tuple[tuple[float, str], ...] = ()
    identity_offset: float = 0.0

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be >= 1")
        for coeff, ops in self.terms:
            check_pauli_string(ops, self.n_qubits)
            if not np.isfinite(coeff):
                raise ValueError(f"non-finite coefficient for {ops}")
            if is_identity(ops):
                raise ValueError("identity strings belong in identity_offset")
        if not np.isfinite(self.identity_offset):
            raise ValueError("non-finite identity offset")

    @classmethod
    def from_terms(
        cls, n_qubits: int, terms: Iterable[tuple[float, str]], identity_offset: float = 0.0
    ) -> PauliSum:
        merged: dict[str, float] = {}
        offset = float(identity_offset)
        for coeff, ops in terms:
            ops = check_pauli_string(ops, n_qubits)
            if is_identity(ops):
                offset += float(coeff)
            else:
                merged[ops] = merged.get(ops, 0.0) + float(coeff)
        kept = tuple((c, s) for s, c in merged.items() if c != 0.0)
        return cls(n_qubits, kept, offset)

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    def __len__(self) -> int:
        return len(self.terms)

    def shifted(self, e_shift: float) -> PauliSum:
        return replace(self, identity_offset=self.identity_offset + float(e_shift))

    def to_text(self) -> str:
        lines = [f"n={self.n_qubits} offset={self.identity_offset!r}"]
        lines += [f"{c!r}\t{s}" for c, s in self.terms]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> PauliSum:
        lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
        if not lines:
            raise ValueError("empty Hamiltonian file")
        header = dict(tok.split("=", 1) for tok in lines[0].split())
        try:
            n = int(header["n"])
            offset = float(header.get("offset", 0.0))
        except (KeyError, ValueError) as exc:
            raise ValueError(f"bad header line {lines[0]!r}") from exc
        terms = []
        for ln in lines[1:]:
            coeff, ops = ln.split()
            terms.append((float(coeff), ops))
        return cls.from_terms(n, terms, offset)


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray = field(repr=False)

    @property
    def ground_energy(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def ground_state(self) -> np.ndarray:
        return self.eigenvectors[:, 0]

    def amplitudes(self, psi: np.ndarray) -> np.ndarray:
        """Components ``<lambda_j|psi>`` of a state in the eigenbasis."""
        if psi.shape[0] != self.eigenvalues.shape[0]:
            raise ValueError("state and spectrum dimensions differ")
        return self.eigenvectors.conj().T @ psi


def build_tfim(n: int, J: float, g: float, periodic: bool = True) -> PauliSum:
    """``-J sum Z_i Z_{i+1} + g sum X_i``; ZZ bonds first, then X terms, in site order."""
    if n < 1:
        raise ValueError("TFIM needs at least one site")
    if periodic and n < 2:
        raise ValueError("periodic TFIM needs at least two sites")
    n_bonds = n if periodic else n - 1
    terms = []
    for i in range(n_bonds):
        ops = ["I"] * n
        ops[i] = "Z"
        ops[(i + 1) % n] = "Z"
        terms.append((-J, "".join(ops)))
    for i in range(n):
        ops = ["I"] * n
        ops[i] = "X"
        terms.append((g, "".join(ops)))
    return PauliSum.from_terms(n, terms)


def shift_spectrum(h: PauliSum, e_shift: float) -> PauliSum:
    return h.shifted(e_shift)


def to_dense(h: PauliSum) -> np.ndarray:
    if h.n_qubits > MAX_DENSE_QUBITS:
        raise ResourceLimitError(f"{h.n_qubits} qubits exceeds dense limit {MAX_DENSE_QUBITS}")
    mat = h.identity_offset * np.eye(h.dim, dtype=complex)
    for coeff, ops in h.terms:
        mat += coeff * pauli_string_matrix(ops)
    return mat


def diagonalize(h: PauliSum) -> Spectrum:
    """Full Hermitian eigendecomposition; the ground-truth oracle for everything else."""
    evals, evecs = np.linalg.eigh(to_dense(h))
    return Spectrum(evals, evecs)


def apply(h: PauliSum, psi: np.ndarray) -> np.ndarray:
    """``H|psi>`` by string traversal, identity offset included."""
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (h.dim,):
        raise ValueError(f"state shape {psi.shape} does not match {h.n_qubits} qubits")
    out = h.identity_offset * psi
    for coeff, ops in h.terms:
        out = out + coeff * apply_pauli_string(ops, psi)
    return out


def expectation(h: PauliSum, psi: np.ndarray) -> float:
    return float(np.vdot(psi, apply(h, psi)).real)
