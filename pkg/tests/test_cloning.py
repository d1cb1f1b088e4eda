from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cloneshare.cloning import (
    CloningParams,
    NamedPair,
    brute_force_reduced,
    clone_both,
    clone_isometry,
    coefficient_set,
    global_output_state,
    printed_q,
    reduced_from_pure,
    reduced_state,
    verify_reduced_against_global,
)
from cloneshare.linalg import is_density_matrix
from cloneshare.states import SchmidtSpectrum
from cloneshare.verification import WERNER_POINT


def exact_k2_coefficients(c2: Fraction):
    d2 = (1 - c2) / 2
    return ((c2 + d2) ** 2, 4 * c2 * d2, d2 * (c2 + d2), d2 * d2)


c2_values = st.floats(0.01, 1.0)
seeds = st.integers(0, 2**32 - 1)


def test_params_validation():
    with pytest.raises(ValueError, match="expected 1"):
        CloningParams(0.9, 0.9)
    with pytest.raises(ValueError, match="non-negative"):
        CloningParams(1.0, -0.0 - 1e-3)
    with pytest.raises(ValueError, match=r"\(0, 1\]"):
        CloningParams(-0.5, np.sqrt(0.375))
    with pytest.raises(ValueError, match="k must"):
        CloningParams(1.0, 0.0, 1)


def test_written_uqcm_amplitudes_are_rejected():
    # c = 2/sqrt3 exceeds 1 and breaks unitarity; c^2 = 2/3 is the consistent choice
    with pytest.raises(ValueError):
        CloningParams(2 / np.sqrt(3), 1 / np.sqrt(6))
    p = CloningParams.universal()
    assert p.c**2 == pytest.approx(2 / 3) and p.d**2 == pytest.approx(1 / 6)


def test_coefficients_wootters_zurek():
    cs = coefficient_set(CloningParams.wootters_zurek())
    assert (cs.P, cs.Q, cs.R, cs.S) == (1, 0, 0, 0)


def test_coefficients_uqcm_match_exact_fractions():
    expected = exact_k2_coefficients(Fraction(2, 3))
    assert expected == (Fraction(25, 36), Fraction(4, 9), Fraction(5, 36), Fraction(1, 36))
    cs = coefficient_set(CloningParams.universal())
    assert np.allclose((cs.P, cs.Q, cs.R, cs.S), [float(x) for x in expected], atol=1e-15)


@given(c2_values)
def test_k2_coefficients_reduce(c2):
    p = CloningParams.from_c_squared(c2)
    cs = coefficient_set(p)
    d2 = p.d**2
    assert cs.Q == pytest.approx(4 * c2 * d2, abs=1e-14)
    assert cs.P == pytest.approx((c2 + d2) ** 2, abs=1e-14)
    assert cs.P + cs.S + 2 * cs.R == pytest.approx(1, abs=1e-14)


@given(c2_values, st.sampled_from([2, 3]))
def test_q_agrees_with_printed_form_for_k_up_to_3(c2, k):
    p = CloningParams.from_c_squared(c2, k)
    assert coefficient_set(p).Q == pytest.approx(printed_q(p), abs=1e-14)


def test_printed_q_departs_from_oracle_at_k4():
    s = SchmidtSpectrum.uniform(4)
    p = CloningParams.from_c_squared(0.4, 4)
    brute = reduced_from_pure(global_output_state(s, p), 4, NamedPair.NONLOCAL_14)
    corner = brute[0, 5].real / np.sqrt(s.lambdas[0] * s.lambdas[1])
    assert corner == pytest.approx(coefficient_set(p).Q, abs=1e-12)
    assert abs(corner - printed_q(p)) > 1e-3


def test_isometry_wootters_zurek_copies_basis():
    v = clone_isometry(CloningParams.wootters_zurek())
    image = v[:, 0].reshape(2, 2, 2)
    assert image[0, 0, 0] == 1 and np.count_nonzero(image) == 1


@settings(max_examples=50)
@given(c2_values, st.sampled_from([2, 3, 4]))
def test_isometry_property(c2, k):
    v = clone_isometry(CloningParams.from_c_squared(c2, k))
    assert np.max(np.abs(v.conj().T @ v - np.eye(k))) <= 1e-12


def test_isometry_column_norm_uqcm():
    v = clone_isometry(CloningParams.universal())
    assert np.linalg.norm(v[:, 0]) == pytest.approx(1, abs=1e-15)


def test_global_state_wootters_zurek():
    psi = global_output_state(SchmidtSpectrum((0.5, 0.5)), CloningParams.wootters_zurek())
    expected = np.zeros(64)
    expected[0] = expected[63] = 1 / np.sqrt(2)  # |0000>|00> and |1111>|11>
    assert np.allclose(psi, expected)


@given(c2_values, seeds)
def test_global_state_unit_norm(c2, seed):
    lam = np.random.default_rng(seed).dirichlet([1, 1])
    psi = global_output_state(SchmidtSpectrum(lam), CloningParams.from_c_squared(c2))
    assert abs(np.linalg.norm(psi) - 1) <= 1e-12


def test_global_state_rejects_mismatched_k():
    with pytest.raises(ValueError):
        global_output_state(SchmidtSpectrum.uniform(3), CloningParams.universal())
    with pytest.raises(ValueError):
        clone_both(np.ones(9) / 3, CloningParams.universal())


def test_brute_force_werner_point():
    psi = global_output_state(SchmidtSpectrum((0.5, 0.5)), CloningParams.universal())
    assert np.max(np.abs(brute_force_reduced(psi, 2, (1, 4)) - WERNER_POINT)) <= 1e-12


def test_reduced_state_printed_matrices():
    l1, l2 = 0.3, 0.7
    p = CloningParams.from_c_squared(0.6)
    c2, d2 = p.c**2, p.d**2
    cs = coefficient_set(p)
    s = SchmidtSpectrum((l1, l2))
    q = cs.Q * np.sqrt(l1 * l2)
    nonlocal_expected = np.array(
        [
            [cs.P * l1 + cs.S * l2, 0, 0, q],
            [0, cs.R, 0, 0],
            [0, 0, cs.R, 0],
            [q, 0, 0, cs.P * l2 + cs.S * l1],
        ]
    )
    local_expected = np.array(
        [[c2 * l1, 0, 0, 0], [0, d2, d2, 0], [0, d2, d2, 0], [0, 0, 0, c2 * l2]]
    )
    assert np.allclose(reduced_state(s, p, (1, 4)), nonlocal_expected, atol=1e-15)
    assert np.allclose(reduced_state(s, p, (1, 3)), local_expected, atol=1e-15)


def test_reduced_state_dephased_endpoint():
    rho = reduced_state(SchmidtSpectrum((0.5, 0.5)), CloningParams.wootters_zurek(), NamedPair.NONLOCAL_14)
    assert np.allclose(rho, np.diag([0.5, 0, 0, 0.5]))


@settings(max_examples=50)
@given(c2_values, seeds, st.sampled_from([2, 3]))
def test_reduced_states_are_density_matrices_and_symmetric(c2, seed, k):
    s = SchmidtSpectrum(np.random.default_rng(seed).dirichlet(np.ones(k)))
    p = CloningParams.from_c_squared(c2, k)
    for pair in NamedPair:
        assert is_density_matrix(reduced_state(s, p, pair))
    assert np.array_equal(reduced_state(s, p, (1, 3)), reduced_state(s, p, (2, 4)))
    assert np.array_equal(reduced_state(s, p, (1, 4)), reduced_state(s, p, (2, 3)))


@given(seeds)
def test_nonlocal_endpoint_is_classical(seed):
    lam = np.random.default_rng(seed).dirichlet([1, 1])
    rho = reduced_state(SchmidtSpectrum(lam), CloningParams.wootters_zurek(), (1, 4))
    assert np.allclose(rho, np.diag([lam[0], 0, 0, lam[1]]), atol=1e-15)


def test_oracle_uqcm_werner():
    r = verify_reduced_against_global(SchmidtSpectrum((0.5, 0.5)), CloningParams.universal(), (1, 4))
    assert r and r.max_residual <= 1e-12


def test_oracle_grid_k2():
    rng = np.random.default_rng(11)
    for _ in range(50):
        s = SchmidtSpectrum(rng.dirichlet([1, 1]))
        p = CloningParams.from_c_squared(rng.uniform(0.01, 1))
        for pair in NamedPair:
            assert verify_reduced_against_global(s, p, pair)


def test_oracle_grid_k3():
    rng = np.random.default_rng(12)
    assert verify_reduced_against_global(SchmidtSpectrum.uniform(3), CloningParams.from_c_squared(0.5, 3), (1, 4))
    for _ in range(10):
        s = SchmidtSpectrum(rng.dirichlet([1, 1, 1]))
        p = CloningParams.from_c_squared(rng.uniform(0.01, 1), 3)
        for pair in NamedPair:
            assert verify_reduced_against_global(s, p, pair)


def test_closed_form_holds_at_k4():
    rng = np.random.default_rng(13)
    for _ in range(3):
        s = SchmidtSpectrum(rng.dirichlet(np.ones(4)))
        p = CloningParams.from_c_squared(rng.uniform(0.01, 1), 4)
        psi = global_output_state(s, p)
        for pair in NamedPair:
            assert np.max(np.abs(reduced_from_pure(psi, 4, pair) - reduced_state(s, p, pair))) <= 1e-12


def test_oracle_refuses_large_k():
    with pytest.raises(ValueError):
        verify_reduced_against_global(SchmidtSpectrum.uniform(4), CloningParams.from_c_squared(0.4, 4), (1, 4))


def test_unknown_pair():
    with pytest.raises(ValueError):
        NamedPair.parse((1, 2))
