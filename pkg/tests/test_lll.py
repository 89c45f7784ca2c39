import cmath
import math

import numpy as np
import pytest

from nctorus.core import Flux, VacuumAngles, as_tau
from nctorus.errors import ConventionMismatchError
from nctorus.fields import Field, ladder_apply
from nctorus.lll import (
    ThetaField,
    boundary_residual,
    build_basis,
    center_eigen_residual,
    coefficient_matrix,
    eigenphase_table,
    elementary_translation,
    gram_rank,
    raise_level,
    unit_cell_grid,
)
from nctorus.theta import ThetaSpec, TruncationPolicy, theta

TAU_GEN = 0.3 + 1.1j
ANGLES = VacuumAngles(0.7, -1.3)


def naive_state(flux, tau, angles, j, k, w, wbar):
    """Direct evaluation of Psi_jk from its defining formula."""
    t = as_tau(tau)
    klev = flux.level
    gamma = (t.value * angles.alpha1 - angles.alpha2) / (2.0 * math.pi * klev)
    r = (j * flux.numerator + k * flux.denominator) % klev
    g = np.exp(
        math.pi * klev * w * (w - wbar) / (2.0 * t.im) + 1j * angles.alpha1 * w
    )
    return g * theta(ThetaSpec(klev, r), w + gamma, t, TruncationPolicy())


def test_unit_cell_grid_is_physical_slice():
    w, wbar = unit_cell_grid(TAU_GEN, n=4)
    assert w.shape == (16,)
    assert np.max(np.abs(wbar - np.conjugate(w))) == 0.0


def test_build_basis_residues_exhaust_level():
    basis = build_basis(Flux(2, 3), 1j)
    residues = {st.residue for st in basis.states.values()}
    assert residues == set(range(6))
    assert basis.labels() == [(j, k) for j in range(3) for k in range(2)]


def test_state_weight_is_rescaled():
    basis = build_basis(Flux(2, 3), TAU_GEN)
    st = basis.state(0, 0)
    assert st.im_tau_weight == pytest.approx(1.1 / (2.0 * math.pi * 6.0), rel=1e-15)


def test_states_match_defining_formula():
    flux = Flux(2, 3)
    basis = build_basis(flux, TAU_GEN, ANGLES)
    w, wbar = unit_cell_grid(TAU_GEN, n=5)
    for j in range(3):
        for k in range(2):
            got = basis.state(j, k).evaluate(w, wbar)
            want = naive_state(flux, TAU_GEN, ANGLES, j, k, w, wbar)
            assert np.max(np.abs(got - want)) < 1e-13


def test_state_index_wraps_modulo():
    basis = build_basis(Flux(2, 3), 1j)
    assert basis.state(4, 3) is basis.state(1, 1)


def test_theta_field_derivatives_match_finite_differences():
    basis = build_basis(Flux(2, 3), TAU_GEN, ANGLES)
    st = basis.state(1, 1)
    w, wbar = unit_cell_grid(TAU_GEN, n=3)
    h = 1e-6
    fd_z = (st.evaluate(w + h, wbar) - st.evaluate(w - h, wbar)) / (2.0 * h)
    fd_zbar = (st.evaluate(w, wbar + h) - st.evaluate(w, wbar - h)) / (2.0 * h)
    assert np.max(np.abs(st.d_z(w, wbar) - fd_z)) < 1e-7
    assert np.max(np.abs(st.d_zbar(w, wbar) - fd_zbar)) < 1e-7


@pytest.mark.parametrize("tau", [1j, TAU_GEN])
@pytest.mark.parametrize("mn", [(3, 2), (2, 5)])
def test_boundary_conditions(tau, mn):
    m, n = mn
    basis = build_basis(Flux(n, m), tau, ANGLES)
    for j in range(m):
        for k in range(n):
            assert boundary_residual(basis, j, k) < 1e-12


def test_translation_prefactor_formula():
    # D1 f = exp(2i a1/M) exp(pi N (w - wbar)/(2 b)) f(w - 1/M, wbar - 1/M)
    flux = Flux(2, 3)
    basis = build_basis(flux, TAU_GEN, ANGLES)
    st = basis.state(0, 1)
    w, wbar = unit_cell_grid(TAU_GEN, n=4)
    out = elementary_translation(basis, 1)(st).evaluate(w, wbar)
    b = 1.1
    want = (
        cmath.exp(2j * ANGLES.alpha1 / 3)
        * np.exp(math.pi * 2 * (w - wbar) / (2.0 * b))
        * st.evaluate(w - 1.0 / 3.0, wbar - 1.0 / 3.0)
    )
    assert np.max(np.abs(out - want)) < 1e-13


def test_elementary_translation_rejects_bad_index():
    basis = build_basis(Flux(2, 3), 1j)
    with pytest.raises(ValueError):
        elementary_translation(basis, 3)


@pytest.mark.parametrize("tau", [1j, TAU_GEN])
@pytest.mark.parametrize("mn", [(3, 2), (2, 5)])
def test_eigenphase_structure(tau, mn):
    m, n = mn
    a1, a2 = ANGLES.alpha1, ANGLES.alpha2
    basis = build_basis(Flux(n, m), tau, ANGLES)
    table = eigenphase_table(basis, spread_tol=1e-9)
    for (j, k), entry in table.items():
        assert abs(entry["d1_phase"] - cmath.exp(1j * (a1 - 2 * math.pi * j * n) / m)) < 1e-12
        assert entry["d1_spread"] < 1e-12
        assert entry["d2_target"] == ((j - 1) % m, k)
        assert abs(entry["d2_phase"] - cmath.exp(1j * a2 / m)) < 1e-12
        assert entry["d2_leak"] < 1e-12
        assert abs(entry["dual1_phase"] - cmath.exp(1j * (a1 - 2 * math.pi * k * m) / n)) < 1e-12
        assert entry["dual2_target"] == (j, (k - 1) % n)
        assert abs(entry["dual2_phase"] - cmath.exp(1j * a2 / n)) < 1e-12
        assert entry["dual2_leak"] < 1e-12


def test_diagonal_eigenphase_multiset():
    # The D1 spectrum on the ground space is {exp(i(a1 + 2 pi s N)/M)},
    # each appearing N times.
    m, n = 3, 2
    basis = build_basis(Flux(n, m), TAU_GEN, ANGLES)
    table = eigenphase_table(basis)
    got = sorted(
        np.angle(entry["d1_phase"]) % (2 * math.pi) for entry in table.values()
    )
    want = sorted(
        ((ANGLES.alpha1 + 2 * math.pi * s * n) / m) % (2 * math.pi)
        for s in range(m)
        for _ in range(n)
    )
    assert np.allclose(got, want, atol=1e-12)


def test_eigenphase_mismatch_raises():
    basis = build_basis(Flux(2, 3), 1j)
    bad = Field(
        lambda w, wbar: np.exp(-w * wbar),
        1j,
        basis.state(0, 0).im_tau_weight,
    )
    basis.states[(0, 0)] = bad
    with pytest.raises(ConventionMismatchError):
        eigenphase_table(basis)


def test_translations_q_commute():
    # D1 D2 = exp(2 pi i N/M) D2 D1
    for m, n in ((3, 2), (2, 5)):
        basis = build_basis(Flux(n, m), TAU_GEN, ANGLES)
        d1 = elementary_translation(basis, 1)
        d2 = elementary_translation(basis, 2)
        w, wbar = unit_cell_grid(TAU_GEN, n=4)
        st = basis.state(m - 1, 0)
        lhs = d1(d2(st)).evaluate(w, wbar)
        rhs = cmath.exp(2j * math.pi * n / m) * d2(d1(st)).evaluate(w, wbar)
        assert np.max(np.abs(lhs - rhs)) < 1e-13


def test_crystal_and_dual_translations_commute():
    basis = build_basis(Flux(2, 3), TAU_GEN, ANGLES)
    w, wbar = unit_cell_grid(TAU_GEN, n=4)
    st = basis.state(1, 1)
    for i in (1, 2):
        for idual in (1, 2):
            a = elementary_translation(basis, i)
            bop = elementary_translation(basis, idual, dual=True)
            lhs = a(bop(st)).evaluate(w, wbar)
            rhs = bop(a(st)).evaluate(w, wbar)
            assert np.max(np.abs(lhs - rhs)) < 1e-13


@pytest.mark.parametrize("mn", [(2, 1), (3, 2), (5, 3)])
def test_center_eigen_residual(mn):
    m, n = mn
    for tau in (1j, TAU_GEN):
        basis = build_basis(Flux(n, m), tau, ANGLES)
        for j in range(m):
            for k in range(n):
                assert center_eigen_residual(basis, j, k) < 1e-12


@pytest.mark.parametrize("mn", [(3, 2), (5, 2)])
def test_gram_rank_full(mn):
    m, n = mn
    for tau in (1j, TAU_GEN):
        basis = build_basis(Flux(n, m), tau)
        assert gram_rank(basis) == m * n


def test_gram_rank_needs_enough_points():
    basis = build_basis(Flux(2, 3), 1j)
    with pytest.raises(ValueError):
        gram_rank(basis, grid=unit_cell_grid(1j, n=2))


def test_coefficient_matrix_is_homomorphism():
    basis = build_basis(Flux(2, 3), TAU_GEN, ANGLES)
    d1 = elementary_translation(basis, 1)
    d2 = elementary_translation(basis, 2)
    l1 = coefficient_matrix(basis, d1)
    l2 = coefficient_matrix(basis, d2)
    l12 = coefficient_matrix(basis, lambda f: d1(d2(f)))
    assert np.max(np.abs(l12 - l1 @ l2)) < 1e-11
    # D1 is diagonal, D2 a phase times a cyclic permutation in j.
    assert np.max(np.abs(l1 - np.diag(np.diag(l1)))) < 1e-12
    mags = np.abs(l2)
    assert np.allclose(np.sort(mags.ravel())[-6:], 1.0, atol=1e-12)
    assert np.max(np.sort(mags.ravel())[:-6]) < 1e-12


def test_raise_level_roundtrip_and_covariance():
    basis = build_basis(Flux(2, 3), TAU_GEN, ANGLES)
    w, wbar = unit_cell_grid(TAU_GEN, n=4)
    up = raise_level(basis, 1, 0)
    assert isinstance(up, ThetaField)
    # a- a+ Psi = Psi (ground state is annihilated by a-)
    down = ladder_apply("a-", up)
    base = basis.state(1, 0).evaluate(w, wbar)
    assert np.max(np.abs(down.evaluate(w, wbar) - base)) < 1e-12
    # the raised state satisfies the same twisted boundary law
    assert boundary_residual(basis, 1, 0, state=up) < 1e-12
    # and keeps the same translation eigenphase as its parent
    out = elementary_translation(basis, 1)(up).evaluate(w, wbar)
    upv = up.evaluate(w, wbar)
    phase = cmath.exp(1j * (ANGLES.alpha1 - 2 * math.pi * 1 * 2) / 3)
    assert np.max(np.abs(out - phase * upv)) < 1e-12


def test_raise_level_number_ladder():
    basis = build_basis(Flux(2, 3), TAU_GEN, ANGLES)
    w, wbar = unit_cell_grid(TAU_GEN, n=4)
    up1 = raise_level(basis, 0, 1)
    up2 = raise_level(basis, 0, 1, n=2)
    down = ladder_apply("a-", up2)
    # a- (a+)^2 Psi = 2 a+ Psi
    assert np.max(np.abs(down.evaluate(w, wbar) - 2.0 * up1.evaluate(w, wbar))) < 1e-12
    with pytest.raises(ValueError):
        raise_level(basis, 0, 1, n=-1)


def test_raised_state_orthogonal_to_parent():
    # <Psi, a+ Psi> = <a- Psi, Psi> = 0: cell quadrature of the periodic
    # integrand (midpoint rule, spectral accuracy).
    basis = build_basis(Flux(2, 3), TAU_GEN, ANGLES)
    up = raise_level(basis, 1, 1)
    st = basis.state(1, 1)
    n = 48
    s = (np.arange(n) + 0.5) / n
    x = np.repeat(s, n)
    y = np.tile(s, n)
    w = x + TAU_GEN * y
    wbar = np.conjugate(w)
    inner = np.sum(np.conjugate(st.evaluate(w, wbar)) * up.evaluate(w, wbar)) / n**2
    norm = np.sum(np.abs(st.evaluate(w, wbar)) ** 2) / n**2
    assert abs(inner) / norm < 1e-10
