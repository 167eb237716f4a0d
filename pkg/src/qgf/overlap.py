"""Overlap tables ``D_k = <psi|exp(-i k dy H)|psi>`` and ``N_k = <psi|A exp(-i k dy H)|psi>``.

Only ``k = 0..2M`` is stored; the negative half follows by conjugation, so a
hardware run would only ever measure non-negative ``k``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .pauli import PauliSum, Spectrum, apply, apply_pauli_string, diagonalize
from .states import TrotterConfig, trotter_evolve


@dataclass(frozen=True)
class ExactMode:
    kind: str = field(default="exact", init=False)


@dataclass(frozen=True)
class SampledMode:
    """Hadamard-test sampling; ``shots`` is a single count or one count per ``k``."""

    shots: int | tuple[int, ...]
    seed: int = 0
    kind: str = field(default="sampled", init=False)

    def shots_for(self, k: int) -> int:
        if isinstance(self.shots, int):
            return self.shots
        return int(self.shots[k])


@dataclass(frozen=True)
class NoisyMode:
    channel: str
    p: float
    steps_per_slice: int = 20
    kind: str = field(default="noisy", init=False)


Mode = ExactMode | SampledMode | NoisyMode
EXACT = ExactMode()


def mode_to_dict(mode: Mode) -> dict:
    if isinstance(mode, SampledMode):
        shots = mode.shots if isinstance(mode.shots, int) else list(mode.shots)
        return {"kind": "sampled", "shots": shots, "seed": mode.seed}
    if isinstance(mode, NoisyMode):
        return {"kind": "noisy", "channel": mode.channel, "p": mode.p, "steps_per_slice": mode.steps_per_slice}
    return {"kind": "exact"}


def mode_from_dict(d: dict) -> Mode:
    kind = d.get("kind", "exact")
    if kind == "exact":
        return EXACT
    if kind == "sampled":
        shots = d["shots"]
        return SampledMode(shots if isinstance(shots, int) else tuple(shots), int(d.get("seed", 0)))
    if kind == "noisy":
        return NoisyMode(d["channel"], float(d["p"]), int(d.get("steps_per_slice", 20)))
    raise ValueError(f"unknown mode kind {kind!r}")


@dataclass(frozen=True)
class OverlapTable:
    delta_y: float
    m_y: int
    d: np.ndarray
    n_h: np.ndarray
    mode: Mode = EXACT
    evolver: TrotterConfig | None = None
    shots_per_entry: np.ndarray | None = None

    def __post_init__(self):
        n = 2 * self.m_y + 1
        if self.d.shape != (n,) or self.n_h.shape != (n,):
            raise ValueError(f"tables must have 2*m_y+1 = {n} entries")

    @property
    def phi_m(self) -> float:
        return self.m_y * self.delta_y

    def full_d(self) -> np.ndarray:
        """``D_k`` for ``k = -2M..2M`` via ``D_{-k} = conj(D_k)``."""
        return np.concatenate([np.conj(self.d[:0:-1]), self.d])

    def full_n_h(self) -> np.ndarray:
        return np.concatenate([np.conj(self.n_h[:0:-1]), self.n_h])

    def truncated(self, m_y: int) -> OverlapTable:
        if m_y > self.m_y:
            raise ValueError("cannot truncate to a larger cutoff")
        sl = slice(0, 2 * m_y + 1)
        shots = None if self.shots_per_entry is None else self.shots_per_entry[sl]
        return replace(self, m_y=m_y, d=self.d[sl], n_h=self.n_h[sl], shots_per_entry=shots)

    def to_dict(self) -> dict:
        mode = mode_to_dict(self.mode)
        if self.evolver is not None:
            mode["evolver"] = {"kind": "trotter", "steps_per_slice": self.evolver.steps_per_slice}
        return {
            "delta_y": self.delta_y,
            "m_y": self.m_y,
            "mode": mode,
            "d": [[z.real, z.imag] for z in self.d.tolist()],
            "n_h": [[z.real, z.imag] for z in self.n_h.tolist()],
            "shots_per_entry": None if self.shots_per_entry is None else self.shots_per_entry.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> OverlapTable:
        mode_d = dict(data["mode"])
        evolver_d = mode_d.pop("evolver", None)
        evolver = None
        if evolver_d and evolver_d.get("kind") == "trotter":
            evolver = TrotterConfig(int(evolver_d["steps_per_slice"]), float(data["delta_y"]))
        shots = data.get("shots_per_entry")
        return cls(
            float(data["delta_y"]),
            int(data["m_y"]),
            np.array([complex(re, im) for re, im in data["d"]]),
            np.array([complex(re, im) for re, im in data["n_h"]]),
            mode_from_dict(mode_d),
            evolver,
            None if shots is None else np.asarray(shots, dtype=np.int64),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()))

    @classmethod
    def load(cls, path: str | Path) -> OverlapTable:
        return cls.from_dict(json.loads(Path(path).read_text()))


def sample_hadamard_test(true_value: complex, shots: int, seed) -> complex:
    """Shot-noise estimate of an overlap from two independent ancilla measurements.

    The real part comes from ``shots`` draws with P(0) = (1 + Re)/2; the
    imaginary part from another ``shots`` draws with the ancilla prepared in
    ``(|0> - i|1>)/sqrt 2``, for which P(0) = (1 + Im)/2.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    rng = np.random.default_rng(seed)
    p_re = np.clip((1 + np.real(true_value)) / 2, 0.0, 1.0)
    p_im = np.clip((1 + np.imag(true_value)) / 2, 0.0, 1.0)
    re = 2 * rng.binomial(shots, p_re) / shots - 1
    im = 2 * rng.binomial(shots, p_im) / shots - 1
    return complex(re, im)


def _entry_seed(seed: int, k: int, part: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(seed, spawn_key=(k, part))


def _check_inputs(h: PauliSum, psi: np.ndarray, delta_y: float, m_y: int) -> np.ndarray:
    if delta_y <= 0:
        raise ValueError("delta_y must be positive")
    if m_y < 0:
        raise ValueError("m_y must be >= 0")
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (h.dim,):
        raise ValueError("state dimension does not match the Hamiltonian")
    if not np.isclose(np.linalg.norm(psi), 1.0, atol=1e-10):
        raise ValueError("initial state must be normalized")
    return psi


class _Evolution:
    """Yields ``exp(-i k dy H) psi`` for increasing ``k`` with either evolver."""

    def __init__(self, h, psi, delta_y, evolver, spectrum):
        self.h, self.psi, self.delta_y, self.evolver = h, psi, delta_y, evolver
        self.spectrum = spectrum
        if evolver is not None:
            self.cfg = TrotterConfig(evolver.steps_per_slice, delta_y, evolver.term_order)
        self._k = 0
        self._state = psi

    def at(self, k: int) -> np.ndarray:
        if self.evolver is None:
            sp = self.spectrum
            coeffs = sp.amplitudes(self.psi)
            return sp.eigenvectors @ (np.exp(-1j * sp.eigenvalues * k * self.delta_y) * coeffs)
        if k < self._k:
            self._k, self._state = 0, self.psi
        while self._k < k:
            self._state = trotter_evolve(self.h, self.delta_y, self.cfg, self._state)
            self._k += 1
        return self._state


def _true_parts(h, a, psi, delta_y, ks, evolver, spectrum):
    """Exact values of ``D_k`` and of each ``<psi|a_l U_k|psi>`` for the requested ``ks``."""
    d = np.empty(len(ks), dtype=complex)
    terms = np.empty((len(a.terms), len(ks)), dtype=complex)
    bras = [apply_pauli_string(ops, psi) for _, ops in a.terms]
    if evolver is None:
        sp = spectrum
        c = sp.amplitudes(psi)
        phases = np.exp(-1j * np.outer(sp.eigenvalues, np.asarray(ks) * delta_y))
        d[:] = (np.conj(c) * c) @ phases
        for l, bra in enumerate(bras):
            terms[l] = (np.conj(sp.amplitudes(bra)) * c) @ phases
        return d, terms
    evo = _Evolution(h, psi, delta_y, evolver, spectrum)
    for i, k in enumerate(ks):
        phi = evo.at(k)
        d[i] = np.vdot(psi, phi)
        for l, bra in enumerate(bras):
            terms[l, i] = np.vdot(bra, phi)
    return d, terms


def _entries(h, a, psi, delta_y, k_lo, k_hi, mode, evolver, spectrum):
    """``(d, n_h, shots)`` for ``k = k_lo..k_hi`` inclusive."""
    ks = list(range(k_lo, k_hi + 1))
    if not ks:
        return np.empty(0, complex), np.empty(0, complex), None
    if isinstance(mode, NoisyMode):
        from .noise import NoiseModel, noisy_entries

        cfg = TrotterConfig(mode.steps_per_slice, delta_y)
        return noisy_entries(h, a, psi, delta_y, ks, cfg, NoiseModel(mode.channel, mode.p))

    if evolver is None and spectrum is None:
        spectrum = diagonalize(h)

    if isinstance(mode, ExactMode):
        if evolver is None:
            sp = spectrum
            c = sp.amplitudes(psi)
            u = sp.amplitudes(apply(a, psi))
            phases = np.exp(-1j * np.outer(sp.eigenvalues, np.asarray(ks) * delta_y))
            return (np.conj(c) * c) @ phases, (np.conj(u) * c) @ phases, None
        d, terms = _true_parts(h, a, psi, delta_y, ks, evolver, spectrum)
        coeffs = np.array([c for c, _ in a.terms])
        return d, coeffs @ terms + a.identity_offset * d, None

    d_true, terms_true = _true_parts(h, a, psi, delta_y, ks, evolver, spectrum)
    d = np.empty(len(ks), dtype=complex)
    n_h = np.empty(len(ks), dtype=complex)
    shots = np.empty(len(ks), dtype=np.int64)
    for i, k in enumerate(ks):
        s = mode.shots_for(k)
        shots[i] = s
        # <psi|psi> = 1 is known and never measured
        d[i] = 1.0 if k == 0 else sample_hadamard_test(d_true[i], s, _entry_seed(mode.seed, k, 0))
        acc = a.identity_offset * d[i]
        for l, (coeff, _) in enumerate(a.terms):
            acc += coeff * sample_hadamard_test(terms_true[l, i], s, _entry_seed(mode.seed, k, 1 + l))
        n_h[i] = acc
    return d, n_h, shots


def compute_table(
    h: PauliSum,
    psi: np.ndarray,
    delta_y: float,
    m_y: int,
    mode: Mode = EXACT,
    evolver: TrotterConfig | None = None,
    spectrum: Spectrum | None = None,
) -> OverlapTable:
    """Overlap table for ``k = 0..2 m_y``.

    ``evolver=None`` evolves exactly in the eigenbasis; a :class:`TrotterConfig`
    substitutes first-order Trotter slices. Noisy mode always uses the
    Trotterized density-matrix Hadamard-test circuit.
    """
    return observable_table(h, h, psi, delta_y, m_y, mode, evolver, spectrum)


def observable_table(
    a: PauliSum,
    h: PauliSum,
    psi: np.ndarray,
    delta_y: float,
    m_y: int,
    mode: Mode = EXACT,
    evolver: TrotterConfig | None = None,
    spectrum: Spectrum | None = None,
) -> OverlapTable:
    """Like :func:`compute_table` but with ``n_h[k] = <psi|A exp(-i k dy H)|psi>``."""
    psi = _check_inputs(h, psi, delta_y, m_y)
    if a.n_qubits != h.n_qubits:
        raise ValueError("observable and Hamiltonian act on different registers")
    d, n_h, shots = _entries(h, a, psi, delta_y, 0, 2 * m_y, mode, evolver, spectrum)
    if isinstance(mode, ExactMode) and evolver is None:
        d[0] = 1.0
    return OverlapTable(delta_y, m_y, d, n_h, mode, _evolver_for(mode, evolver, delta_y), shots)


def _evolver_for(mode, evolver, delta_y):
    if isinstance(mode, NoisyMode):
        return TrotterConfig(mode.steps_per_slice, delta_y)
    if evolver is None:
        return None
    return TrotterConfig(evolver.steps_per_slice, delta_y, evolver.term_order)


def extend_table(
    t: OverlapTable,
    new_m_y: int,
    h: PauliSum,
    psi: np.ndarray,
    observable: PauliSum | None = None,
    *,
    delta_y: float | None = None,
    mode: Mode | None = None,
    spectrum: Spectrum | None = None,
) -> OverlapTable:
    """Grow a table to ``new_m_y``, computing only ``k`` in ``(2M, 2M']``.

    Existing entries are reused untouched. ``delta_y``/``mode`` are optional
    consistency checks against the table's own settings.
    """
    if delta_y is not None and not np.isclose(delta_y, t.delta_y, rtol=1e-12):
        raise ValueError("delta_y differs from the table being extended")
    if mode is not None and mode != t.mode:
        raise ValueError("mode differs from the table being extended")
    if new_m_y < t.m_y:
        raise ValueError("new_m_y must not be smaller than the current cutoff")
    if new_m_y == t.m_y:
        return t
    psi = _check_inputs(h, psi, t.delta_y, new_m_y)
    a = h if observable is None else observable
    d, n_h, shots = _entries(h, a, psi, t.delta_y, 2 * t.m_y + 1, 2 * new_m_y, t.mode, t.evolver, spectrum)
    all_shots = None
    if t.shots_per_entry is not None and shots is not None:
        all_shots = np.concatenate([t.shots_per_entry, shots])
    return replace(
        t,
        m_y=new_m_y,
        d=np.concatenate([t.d, d]),
        n_h=np.concatenate([t.n_h, n_h]),
        shots_per_entry=all_shots,
    )


@dataclass(frozen=True)
class TwoTimeTable:
    """``o[y, y'] = <psi| exp(i t_y' H) A exp(-i t_y H) |psi>`` for ``y, y' = -M..M``.

    Needed when ``A`` does not commute with ``H``: the filtered expectation then
    depends on both evolution times, not only on their difference.
    """

    delta_y: float
    m_y: int
    o: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        n = 2 * self.m_y + 1
        if self.o.shape != (n, n) or self.d.shape != (n,):
            raise ValueError("two-time table has inconsistent shape")


def two_time_table(
    a: PauliSum, h: PauliSum, psi: np.ndarray, delta_y: float, m_y: int, spectrum: Spectrum | None = None
) -> TwoTimeTable:
    """Exact two-time overlaps; ``d`` is ``D_k`` for ``k = 0..2M`` as in :class:`OverlapTable`."""
    psi = _check_inputs(h, psi, delta_y, m_y)
    sp = diagonalize(h) if spectrum is None else spectrum
    t = np.arange(-m_y, m_y + 1) * delta_y
    c = sp.amplitudes(psi)
    # column y holds exp(-i t_y H) psi in the eigenbasis
    evolved = np.exp(-1j * np.outer(sp.eigenvalues, t)) * c[:, None]
    a_eig = sp.eigenvectors.conj().T @ np.column_stack([apply(a, v) for v in sp.eigenvectors.T])
    o = (a_eig @ evolved).T @ evolved.conj()
    ks = np.arange(0, 2 * m_y + 1) * delta_y
    d = (np.abs(c) ** 2) @ np.exp(-1j * np.outer(sp.eigenvalues, ks))
    d[0] = 1.0
    return TwoTimeTable(delta_y, m_y, o, d)
