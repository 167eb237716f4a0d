from __future__ import annotations

import csv

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from qgf.cv import (
    cv_filtered_state,
    cv_iterate,
    cv_weights,
    momentum_grid_overlap,
    momentum_weights,
    write_cv_csv,
)
from qgf.errors import UnderflowAnnihilated
from qgf.pauli import PauliSum, Spectrum, build_tfim, diagonalize
from qgf.states import prepare_x_ground, random_state

SHIFTS = [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5]


def _shifted(sp: Spectrum, shift: float) -> Spectrum:
    return Spectrum(sp.eigenvalues + shift, sp.eigenvectors)


def test_small_s_leaves_state(tfim4):
    _, sp = tfim4
    psi = random_state(4, 0)
    phi, c = cv_filtered_state(sp, psi, 1e-12)
    assert c == pytest.approx(1.0, abs=1e-9)
    assert np.allclose(phi, psi, atol=1e-9)


def test_large_s_projects_to_zero_eigenvalue(tfim4):
    _, sp = tfim4
    psi = random_state(4, 0)
    shifted = _shifted(sp, -sp.ground_energy)
    phi, c = cv_filtered_state(shifted, psi, 200.0)
    a0_sq = abs(np.vdot(sp.ground_state, psi)) ** 2
    assert c == pytest.approx(a0_sq, rel=1e-9)
    assert abs(np.vdot(sp.ground_state, phi)) ** 2 == pytest.approx(1.0, abs=1e-12)


@given(st.floats(0.01, 5), st.integers(0, 500), st.floats(-3, 3))
def test_success_probability_is_filtered_norm(s, seed, shift):
    sp = diagonalize(build_tfim(3, 1.0, 2.0))
    shifted = _shifted(sp, -sp.ground_energy + shift)
    psi = random_state(3, seed)
    unnorm = shifted.eigenvectors @ (shifted.amplitudes(psi) * np.exp(-s * shifted.eigenvalues**2 / 2))
    _, c = cv_filtered_state(shifted, psi, s)
    assert c == pytest.approx(np.linalg.norm(unnorm) ** 2, rel=1e-12)
    assert 0 < c <= 1


def test_underflow():
    sp = diagonalize(PauliSum.from_terms(1, [(1.0, "Z")], 100.0))
    with pytest.raises(UnderflowAnnihilated):
        cv_filtered_state(sp, np.array([1, 0], complex), 1.0)
    with pytest.raises(ValueError):
        cv_weights(np.zeros(2), 0.0)


def test_iterate_fig8_shape(tfim4):
    h, sp = tfim4
    recs = cv_iterate(h, random_state(4, 0), 1.0, [-sp.ground_energy + d for d in SHIFTS], spectrum=sp)
    errs = [r.energy_error for r in recs]
    inv_c = [1 / r.success_probability for r in recs]
    assert all(b < a for a, b in zip(errs, errs[1:]))
    assert all(b > a for a, b in zip(inv_c, inv_c[1:]))
    assert all(r.required_measurements >= 1 for r in recs)
    assert errs[-1] < 1e-4
    tail = np.log(errs[-4:])
    assert np.all(np.diff(tail) < 0)


def test_single_shift_matches_filtered_state(tfim4):
    h, sp = tfim4
    psi = random_state(4, 1)
    rec = cv_iterate(h, psi, 1.0, [-sp.ground_energy], spectrum=sp)[0]
    phi, c = cv_filtered_state(_shifted(sp, -sp.ground_energy), psi, 1.0)
    energy = float(np.vdot(phi, (sp.eigenvectors * sp.eigenvalues) @ sp.eigenvectors.conj().T @ phi).real)
    assert rec.energy_error == pytest.approx(energy - sp.ground_energy, abs=1e-12)
    assert rec.success_probability == c


def test_repeated_shift_identical_records(tfim4):
    h, sp = tfim4
    recs = cv_iterate(h, prepare_x_ground(4), 1.0, [9.0, 9.0], spectrum=sp)
    assert recs[0] == recs[1]
    with pytest.raises(ValueError):
        cv_iterate(h, prepare_x_ground(4), 1.0, [9.0, 8.0], spectrum=sp)


def test_larger_squeezing_filters_harder(tfim4):
    h, sp = tfim4
    psi = random_state(4, 0)
    shift = [-sp.ground_energy + 1.0]
    r1 = cv_iterate(h, psi, 1.0, shift, spectrum=sp)[0]
    r2 = cv_iterate(h, psi, 2.0, shift, spectrum=sp)[0]
    assert r2.energy_error < r1.energy_error and r2.success_probability < r1.success_probability


def test_csv(tmp_path, tfim4):
    h, sp = tfim4
    recs = cv_iterate(h, random_state(4, 0), 1.0, [8.5], spectrum=sp)
    write_cv_csv(recs, tmp_path / "cv.csv")
    rows = list(csv.reader(open(tmp_path / "cv.csv")))
    assert rows[0] == ["shift", "energy", "error", "success_prob", "required_measurements"]
    assert len(rows) == 2


def test_momentum_weights_closed_form():
    lam = np.array([0.0, 0.3, 1.0, 2.5])
    for s in (0.5, 1.0, 2.0):
        w = momentum_weights(lam, s, 8 * s, 2000)
        assert w[0] == pytest.approx(1.0, abs=1e-10)
        assert np.allclose(w, np.exp(-(s**2) * lam**2 / 4), atol=1e-10)


def test_momentum_weights_match_adaptive_quadrature():
    s, lam = 1.3, 0.8
    val, _ = quad(lambda p: np.exp(-(p**2) / s**2) * np.cos(p * lam), -10 * s, 10 * s, epsabs=1e-14)
    assert momentum_weights([lam], s, 10 * s, 4000)[0] == pytest.approx(val / (s * np.sqrt(np.pi)), abs=1e-10)


def test_momentum_weights_refinement_and_shape():
    lam = np.linspace(0, 3, 31)
    a = momentum_weights(lam, 1.0, 8.0, 200)
    b = momentum_weights(lam, 1.0, 8.0, 400)
    assert np.max(np.abs(a - b)) < 1e-8
    assert np.all(b > 0) and np.all(np.diff(b) < 0)
    with pytest.raises(ValueError):
        momentum_weights(lam, 1.0, 5.0, 400)
    with pytest.raises(ValueError):
        momentum_weights(lam, 1.0, 8.0, 100)


def test_conventions_agree_at_s_two(tfim4):
    _, sp = tfim4
    shifted = _shifted(sp, -sp.ground_energy + 0.5)
    psi = random_state(4, 2)
    grid = momentum_grid_overlap(shifted, psi, 2.0, 20.0, 4000)
    phi, c = cv_filtered_state(shifted, psi, 2.0)
    assert np.allclose(grid, phi * np.sqrt(c), atol=1e-10)
