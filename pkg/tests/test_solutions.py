import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import S4T_PRINTED, X, Z, random_gate
from ybsim.errors import ConstraintError, InputError
from ybsim.linalg import frob_dist, is_unitary, random_unitary
from ybsim.solutions import (
    FamilyParams,
    R4Gate,
    YbNormalForm,
    build_commuting_swap_solution,
    build_diagonal_solution,
    build_family,
    build_r1,
    build_r2,
    build_r3,
    build_r4,
    check_property_g,
    conjugated_gate,
    derived_c,
    eig_unitary_2x2,
    family_q,
    family_s_matrix,
    generate_group,
    property_g_sums,
    r2_p,
    random_family_params,
    symmetric_group_generators,
)
from ybsim.ybe import check_qybe, swap_operator

T = swap_operator(2)


def phase(rng):
    return np.exp(2j * np.pi * rng.random())


# -- family one ----------------------------------------------------------


def test_r1_identity_params_is_swap():
    nf = build_r1(FamilyParams("r1"))
    assert np.allclose(nf.matrix, T)


def test_r1_phase_swap():
    nf = build_r1(FamilyParams("r1", r_phase=-1))
    assert np.allclose(nf.matrix, np.diag([1, 1, 1, -1]) @ T)
    assert check_qybe(nf.matrix, 1e-9)[0]


def test_r1_derived_c_and_qybe(rng):
    params = FamilyParams("r1", a=1, b=1, d_entry=1, p=phase(rng), q=phase(rng), r_phase=phase(rng))
    nf = build_r1(params)
    assert derived_c(1, 1, 1) == -1
    assert np.allclose(nf.Q, [[1, 1], [-1, 1]])
    assert check_qybe(nf.matrix, 1e-9)[0]


def test_r1_rejects_non_unit_phase():
    with pytest.raises(ConstraintError, match="unit-phase"):
        build_r1(FamilyParams("r1", p=2))


# -- family two ----------------------------------------------------------


def test_r2_identity_q_is_degenerate():
    with pytest.raises(ConstraintError, match="degenerate denominator"):
        build_r2(FamilyParams("r2", c=0))


def test_r2_p_formula_example():
    assert r2_p(1, 1, 1, 0) == pytest.approx(0.5)


def test_r2_example_builds():
    nf = build_r2(FamilyParams("r2", a=1, b=1, c=1, d_entry=0))
    assert nf.info["p"] == pytest.approx(0.5)
    M = nf.info["M"]
    assert frob_dist(np.kron(M, M), family_s_matrix("r2", 0.5, 2.0)) < 1e-12
    assert check_qybe(nf.matrix, 1e-9)[0]


def test_r2_matches_direct_formula(rng):
    for _ in range(30):
        params = random_family_params("r2", rng)
        nf = build_r2(params)
        p = nf.info["p"]
        direct = conjugated_gate(params.k, family_q(params), family_s_matrix("r2", p, 1 / p))
        assert frob_dist(nf.matrix, direct) < 1e-9
        M = nf.info["M"]
        assert frob_dist(np.kron(M, M), family_s_matrix("r2", p, 1 / p)) < 1e-12


def test_eig_unitary_2x2(rng):
    W = random_unitary(2, rng)
    U, v = eig_unitary_2x2(W)
    assert is_unitary(U, 1e-12)
    assert frob_dist(U @ np.diag(v) @ U.conj().T, W) < 1e-12
    U, v = eig_unitary_2x2(1j * np.eye(2))
    assert np.allclose(U, np.eye(2)) and np.allclose(v, 1j)


# -- family three --------------------------------------------------------


def test_r3_antidiagonal_example():
    nf = build_r3(FamilyParams("r3"))
    assert check_qybe(nf.matrix, 1e-9)[0]
    assert nf.C == (1, 0)


def test_r3_minus_one_example():
    nf = build_r3(FamilyParams("r3", q=-1, k=1j))
    assert np.allclose(nf.D, 1j * np.array([1, 1, 1, -1]))
    assert check_qybe(nf.matrix, 1e-9)[0]


def test_r3_modulus_errors():
    with pytest.raises(ConstraintError, match="p-modulus"):
        build_r3(FamilyParams("r3", p=2, q=0.5))
    with pytest.raises(ConstraintError, match="q-modulus"):
        build_r3(FamilyParams("r3", p=1, q=2))


def test_r3_rescaled_q_has_property_s2(rng):
    for _ in range(50):
        nf = build_family(random_family_params("r3", rng))
        assert check_property_g(nf.Q, [(1, 0)]).holds


# -- family four ---------------------------------------------------------


def test_r4_identity_is_printed_s4t():
    g = build_r4(FamilyParams("r4"))
    assert isinstance(g, R4Gate) and g.inner_clifford == "S4T"
    assert np.max(np.abs(g.matrix - S4T_PRINTED)) < 1e-15


def test_r4_hadamard_like_q():
    s = 1 / np.sqrt(2)
    g = build_r4(FamilyParams("r4", a=s, b=s, d_entry=s))
    assert is_unitary(g.Q1, 1e-12)
    assert np.allclose(g.Q, [[s, s], [-s, s]])
    assert check_qybe(g.matrix, 1e-9)[0]


def test_r4_ad_modulus():
    with pytest.raises(ConstraintError, match="ad-modulus"):
        build_r4(FamilyParams("r4", a=1, d_entry=2))


# -- shared builder properties -------------------------------------------


@pytest.mark.parametrize("family", ["r1", "r2", "r3", "r4"])
def test_builder_properties(family, rng):
    for _ in range(40):
        params = random_family_params(family, rng)
        g = build_family(params)
        m = g.matrix
        assert check_qybe(m, 1e-9)[0]
        assert is_unitary(m, 1e-9)
        if family != "r2":
            a, b, d = params.a, params.b, params.d_entry
            c = family_q(params)[1, 0]
            assert abs(c * np.conj(d) + a * np.conj(b)) <= 1e-12


@pytest.mark.parametrize("family", ["r1", "r3"])
def test_normal_form_reproduces_direct_formula(family, rng):
    for _ in range(40):
        params = random_family_params(family, rng)
        nf = build_family(params)
        S = family_s_matrix(family, params.p, params.q, params.r_phase)
        direct = conjugated_gate(params.k, family_q(params), S)
        assert frob_dist(nf.matrix, direct) < 1e-9


def test_normal_form_rejects_bad_shapes():
    with pytest.raises(InputError):
        YbNormalForm(2, 1, np.eye(2), np.ones(3), True, (0, 1))
    with pytest.raises(InputError):
        YbNormalForm(2, 1, np.eye(2), 2 * np.ones(4), True, (0, 1))
    with pytest.raises(InputError):
        YbNormalForm(2, 1, np.eye(2), np.ones(4), True, (0, 0))


# -- higher-dimensional families -----------------------------------------


def test_commuting_identity_is_swap():
    g = build_commuting_swap_solution(np.eye(2), np.eye(2))
    assert np.allclose(g.matrix, T)


def test_commuting_diagonal_pair():
    g = build_commuting_swap_solution(Z, np.diag([1, 1j]))
    assert check_qybe(g.matrix, 1e-9)[0]


def test_commuting_rejects_x_z():
    with pytest.raises(ConstraintError, match="commuting") as err:
        build_commuting_swap_solution(X, Z)
    assert f"{2 * np.sqrt(2):.6g}" in str(err.value)


def test_commuting_random_d3_normal_form(rng):
    for _ in range(20):
        U = random_unitary(3, rng)
        A = U @ np.diag(np.exp(1j * rng.random(3) * 6)) @ U.conj().T
        B = U @ np.diag(np.exp(1j * rng.random(3) * 6)) @ U.conj().T
        g = build_commuting_swap_solution(A, B)
        assert frob_dist(g.matrix, swap_operator(3) @ np.kron(A, B)) < 1e-12
        assert frob_dist(g.normal_form.matrix, g.matrix) < 1e-9
        assert check_qybe(g.matrix, 1e-9)[0]


def test_commuting_degenerate_spectrum(rng):
    U = random_unitary(3, rng)
    A = U @ np.diag([1, 1, -1]) @ U.conj().T
    B = U @ np.diag([1j, -1, -1]) @ U.conj().T
    g = build_commuting_swap_solution(A, B)
    assert frob_dist(g.normal_form.matrix, g.matrix) < 1e-9


def test_diagonal_solution_examples(rng):
    assert np.allclose(build_diagonal_solution(np.ones((2, 2))).matrix, T)
    g = build_diagonal_solution([[1, 1], [1, -1]])
    assert check_qybe(g.matrix, 1e-9)[0]
    assert np.allclose(g.matrix, build_r1(FamilyParams("r1", r_phase=-1)).matrix)
    lam = np.exp(2j * np.pi * rng.random((3, 3)))
    assert check_qybe(build_diagonal_solution(lam).matrix, 1e-9)[0]


def test_diagonal_rejects_non_unit():
    with pytest.raises(ConstraintError):
        build_diagonal_solution([[1, 2], [1, 1]])


# -- property (G) --------------------------------------------------------


def test_property_g_identity_trivial_group():
    rep = check_property_g(np.eye(3))
    assert rep.holds and rep.max_sum == pytest.approx(1.0) and rep.group_order == 1


@pytest.mark.parametrize("d", [2, 3])
def test_unitary_has_full_property(d, rng):
    for _ in range(20):
        rep = check_property_g(random_unitary(d, rng), symmetric_group_generators(d))
        assert rep.holds
        assert rep.group_order == (2 if d == 2 else 6)


def test_property_g_fails_for_shear():
    rep = check_property_g(np.array([[1, 1], [0, 1]]))
    assert not rep.holds and rep.max_sum == pytest.approx(2.0)


def brute_sums(Q, perm):
    A, B = np.abs(Q), np.abs(np.linalg.inv(Q))
    d = len(perm)
    return np.array([[sum(A[k, perm[j]] * B[j, l] for j in range(d)) for l in range(d)] for k in range(d)])


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.permutations(range(3)))
def test_property_g_sums_match_definition(seed, perm):
    Q = np.random.default_rng(seed).normal(size=(3, 3)) + 3 * np.eye(3)
    assert np.allclose(property_g_sums(Q, perm), brute_sums(Q, perm))


def test_trivial_group_closed_form(rng):
    for _ in range(20):
        a, b, d = (rng.normal() + 1j * rng.normal() for _ in range(3))
        Q = np.array([[a, b], [derived_c(a, b, d), d]])
        s = property_g_sums(Q, (0, 1))
        expected = 2 * abs(b) * abs(d) / (abs(b) ** 2 + abs(d) ** 2)
        assert s[0, 0] == pytest.approx(1, abs=1e-12)
        assert s[0, 1] == pytest.approx(expected, abs=1e-12)


def test_generate_group_orders():
    assert len(generate_group([(1, 2, 0)], 3)) == 3
    assert len(generate_group(symmetric_group_generators(4), 4)) == 24
    assert generate_group([], 3) == [(0, 1, 2)]
    with pytest.raises(InputError):
        generate_group([(0, 0, 1)], 3)
