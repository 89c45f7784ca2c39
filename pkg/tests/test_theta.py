import cmath
import math

import numpy as np
import pytest

from nctorus.errors import TruncationError, UnsupportedConventionError
from nctorus.theta import (
    ThetaSpec,
    TruncationPolicy,
    character,
    dedekind_eta,
    orthogonality_residual,
    s_transform_residual,
    t_transform_residual,
    theta,
    theta_derivative,
    theta_dz,
    truncation_bound,
)

# value of eta(i), 50-digit oracle via the product (= Gamma(1/4)/(2*pi^(3/4)))
ETA_I = 0.7682254223260566590025942
# eta at a generic interior point, same oracle
ETA_GEN = 0.7477521995829028217942392 + 0.05813720405228364264377134j

TAUS = [1j, 0.3 + 1.1j, 2j]


def naive_theta(level, residue, z, tau, n_range=60, deriv=0):
    """Reference implementation: direct float summation, no vectorization."""
    total = 0.0 + 0.0j
    for n in range(-n_range, n_range + 1):
        a = n + residue / level
        term = cmath.exp(1j * math.pi * tau * level * a * a + 2j * math.pi * level * z * a)
        if deriv:
            term *= (2j * math.pi * level * a) ** deriv
        total += term
    return total


def test_spec_validation():
    assert ThetaSpec(6, 8).residue == 2  # reduced mod level
    assert ThetaSpec(6, -1).residue == 5
    with pytest.raises(ValueError):
        ThetaSpec(0, 0)
    with pytest.raises(ValueError):
        TruncationPolicy(epsilon=2.0)
    with pytest.raises(ValueError):
        TruncationPolicy(epsilon=1e-12, max_terms=1)


def test_worked_truncation_example():
    # eps = 1e-12, K = 1, z = 0, tau = i certifies with 4 terms per side
    assert truncation_bound(1, 0.0, 1j, 1e-12) == 4


def test_truncation_bound_monotone_and_honest():
    n_loose = truncation_bound(2, 0.3 + 0.4j, 0.3 + 1.1j, 1e-6)
    n_tight = truncation_bound(2, 0.3 + 0.4j, 0.3 + 1.1j, 1e-14)
    assert n_tight >= n_loose
    # the certificate is honest: adding more terms moves the value by < eps
    spec = ThetaSpec(2, 1)
    for eps in (1e-6, 1e-10):
        pol = TruncationPolicy(epsilon=eps)
        v = theta(spec, 0.3 + 0.4j, 0.3 + 1.1j, pol)
        v_ref = naive_theta(2, 1, 0.3 + 0.4j, 0.3 + 1.1j, n_range=80)
        assert abs(v - v_ref) < eps


def test_truncation_cap_raises():
    pol = TruncationPolicy(epsilon=1e-12, max_terms=5)
    with pytest.raises(TruncationError) as exc:
        theta(ThetaSpec(1, 0), 0.0, 0.01j, pol)
    assert exc.value.required > 5
    assert exc.value.cap == 5


@pytest.mark.parametrize("level,residue", [(1, 0), (2, 1), (3, 2), (6, 2), (12, 7)])
def test_matches_naive_reference(level, residue):
    rng = np.random.default_rng(20)
    for tau in TAUS:
        for _ in range(4):
            z = complex(rng.uniform(-1, 1), rng.uniform(-0.5, 0.5))
            ref = naive_theta(level, residue, z, tau)
            got = theta(ThetaSpec(level, residue), z, tau)
            assert abs(got - ref) <= 1e-12 * max(1.0, abs(ref))
            ref1 = naive_theta(level, residue, z, tau, deriv=1)
            got1 = theta_dz(ThetaSpec(level, residue), z, tau)
            assert abs(got1 - ref1) <= 1e-11 * max(1.0, abs(ref1))


def test_array_evaluation_matches_scalar_loop():
    spec = ThetaSpec(6, 1)
    tau = 0.3 + 1.1j
    zs = np.array([[0.1 + 0.2j, -0.3j], [0.7 - 0.1j, 1.5 + 0.4j]])
    arr = theta(spec, zs, tau)
    assert arr.shape == zs.shape
    for idx in np.ndindex(zs.shape):
        assert abs(arr[idx] - theta(spec, complex(zs[idx]), tau)) == 0.0


def test_frozen_value_at_lattice_point():
    # theta_0^1(0, i) = sqrt(2) * eta(i); both factors from the 50-digit oracle
    val = theta(ThetaSpec(1, 0), 0.0, 1j)
    assert abs(val - math.sqrt(2.0) * ETA_I) < 1e-15
    assert abs(val.imag) < 1e-16


@pytest.mark.parametrize("level", [1, 2, 3, 6, 12])
def test_quasi_periodicity(level):
    rng = np.random.default_rng(21)
    spec = ThetaSpec(level, rng.integers(0, level))
    for tau in TAUS:
        z = np.array([complex(rng.uniform(-1, 1), rng.uniform(-0.6, 0.6)) for _ in range(10)])
        v = theta(spec, z, tau)
        # z -> z + 1 exact periodicity
        assert np.max(np.abs(theta(spec, z + 1.0, tau) - v)) < 1e-9 * np.max(np.abs(v))
        # z -> z + tau quasi-periodicity
        lhs = theta(spec, z + tau, tau)
        rhs = np.exp(-1j * np.pi * level * tau) * np.exp(-2j * np.pi * level * z) * v
        assert np.max(np.abs(lhs - rhs)) < 1e-9 * np.max(np.abs(rhs))


def test_residue_periodicity_is_exact():
    # same reduced spec, bitwise identical values
    tau = 0.3 + 1.1j
    a = theta(ThetaSpec(6, 2), 0.37 - 0.21j, tau)
    b = theta(ThetaSpec(6, 8), 0.37 - 0.21j, tau)
    assert a == b


def test_fractional_index_shifts():
    # the two index shifts behind the magnetic translation operators,
    # at M = 3, N = 2 (level 6); verified at 50 digits externally
    m, n, level = 3, 2, 6
    tau = 0.3 + 1.1j
    rng = np.random.default_rng(22)
    for r in range(level):
        spec = ThetaSpec(level, r)
        for _ in range(3):
            v = complex(rng.uniform(-1, 1), rng.uniform(-0.5, 0.5))
            lhs = theta(spec, v - 1.0 / m, tau)
            rhs = cmath.exp(-2j * math.pi * r / m) * theta(spec, v, tau)
            assert abs(lhs - rhs) < 1e-12 * max(1.0, abs(rhs))
            lhs = theta(spec, v - tau / m, tau)
            rhs = (
                cmath.exp(-1j * math.pi * tau * n / m)
                * cmath.exp(2j * math.pi * n * v)
                * theta(ThetaSpec(level, r - n), v, tau)
            )
            assert abs(lhs - rhs) < 1e-12 * max(1.0, abs(rhs))


def test_theta_derivative_orders():
    spec = ThetaSpec(3, 1)
    tau = 0.3 + 1.1j
    z = 0.21 + 0.13j
    assert theta_derivative(spec, z, tau, order=0) == theta(spec, z, tau)
    ref2 = naive_theta(3, 1, z, tau, deriv=2)
    assert abs(theta_derivative(spec, z, tau, order=2) - ref2) < 1e-10 * abs(ref2)
    # derivative consistency against central differences
    h = 1e-6
    fd = (theta(spec, z + h, tau) - theta(spec, z - h, tau)) / (2 * h)
    assert abs(theta_dz(spec, z, tau) - fd) < 1e-7 * max(1.0, abs(fd))


# --- Dedekind eta ------------------------------------------------------------

def naive_eta(tau, nfactors=400):
    q = cmath.exp(2j * math.pi * tau)
    out = cmath.exp(1j * math.pi * tau / 12.0)
    for n in range(1, nfactors + 1):
        out *= 1.0 - q**n
    return out


def test_eta_frozen_values():
    assert abs(dedekind_eta(1j) - ETA_I) < 1e-15
    assert abs(dedekind_eta(0.3 + 1.1j) - ETA_GEN) < 1e-15


def test_eta_matches_naive_product():
    rng = np.random.default_rng(23)
    for _ in range(10):
        tau = complex(rng.uniform(-1.5, 1.5), rng.uniform(0.4, 2.5))
        assert abs(dedekind_eta(tau) - naive_eta(tau)) < 1e-13


def test_eta_shift_equation():
    rng = np.random.default_rng(24)
    for _ in range(20):
        tau = complex(rng.uniform(-2.5, 2.5), rng.uniform(0.3, 2.5))
        lhs = dedekind_eta(tau + 1.0)
        rhs = cmath.exp(1j * math.pi / 12.0) * dedekind_eta(tau)
        assert abs(lhs - rhs) < 1e-12 * abs(rhs)


def test_eta_shift_equation_beyond_principal_strip():
    # regression guard: the leading factor must be exp(i*pi*tau/12), not a
    # principal 24th root of q, or this fails with an O(1) residual
    tau = 1.3 + 1.1j
    lhs = dedekind_eta(tau)
    rhs = cmath.exp(1j * math.pi / 12.0) * dedekind_eta(tau - 1.0)
    assert abs(lhs - rhs) < 1e-13


def test_eta_inversion_equation():
    rng = np.random.default_rng(25)
    for _ in range(20):
        tau = complex(rng.uniform(-1.5, 1.5), rng.uniform(0.4, 2.5))
        lhs = dedekind_eta(-1.0 / tau)
        rhs = cmath.sqrt(-1j * tau) * dedekind_eta(tau)
        assert abs(lhs - rhs) < 1e-12 * abs(rhs)


# --- characters and transforms ----------------------------------------------

def test_character_reference_point():
    assert abs(character(ThetaSpec(1, 0), 0.0, 1j) - math.sqrt(2.0)) < 1e-14


@pytest.mark.parametrize("level", [2, 4, 6, 12])
def test_t_transform_even_levels(level):
    rng = np.random.default_rng(26)
    for r in range(0, level, max(1, level // 3)):
        z = complex(rng.uniform(-0.5, 0.5), rng.uniform(-0.3, 0.3))
        assert t_transform_residual(ThetaSpec(level, r), z, 0.3 + 1.1j) < 1e-12


@pytest.mark.parametrize("level", [1, 3, 5])
def test_t_transform_rejects_odd_levels(level):
    with pytest.raises(UnsupportedConventionError):
        t_transform_residual(ThetaSpec(level, 0), 0.1, 1j)


@pytest.mark.parametrize("level", [1, 2, 3, 4, 6])
def test_s_transform(level):
    rng = np.random.default_rng(27)
    for tau in (1j, 0.3 + 1.1j):
        for r in range(level):
            z = complex(rng.uniform(-0.4, 0.4), rng.uniform(-0.3, 0.3))
            assert s_transform_residual(ThetaSpec(level, r), z, tau) < 1e-11


def test_orthogonality_residual():
    for level in range(1, 25):
        assert orthogonality_residual(level) < 1e-12
