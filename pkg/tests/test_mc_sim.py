import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import H, oracle_amplitude, random_circuit, random_gate, random_normal_form
from ybsim.braid import Circuit, Op
from ybsim.errors import GateMismatchError, InputError, PropertyGError
from ybsim.linalg import basis_state, dense_circuit, embed_gate, frob_dist, kron_all, random_unitary
from ybsim.mc_sim import (
    MonomialGate,
    chernoff_bound,
    decompose_q,
    default_coin_bits,
    estimate_amplitude,
    exact_mean,
    expand_circuit,
    induced_distribution,
    interval_boundaries,
    marginals,
    normalization_rho,
    phase_of,
    propagate,
    required_samples,
    sample_product,
    symbolic_action,
    theta,
)
from ybsim.solutions import FamilyParams, YbNormalForm, build_r1


def monomial_dense(V, n, d):
    m = np.eye(d**n, dtype=complex)
    for g in V:
        m = embed_gate(g.matrix, g.wires, n, d) @ m
    return m


def random_monomial_circuit(n, d, k, rng):
    V = []
    for _ in range(k):
        nf = random_normal_form(d, rng)
        V.append(MonomialGate(nf.D, nf.swap, nf.C, tuple(int(w) for w in rng.permutation(n)[:2])))
    return V


# -- expansion -----------------------------------------------------------


def test_expand_single_gate(rng):
    g = random_gate("r1", rng)
    Q, V = expand_circuit(Circuit(2, 2, (Op("R", (0, 1)),)), {"R": g})
    assert np.array_equal(Q, g.Q) and len(V) == 1
    assert np.allclose(V[0].matrix, g.inner)


def expanded_dense(circuit, reg):
    Q, V = expand_circuit(circuit, reg)
    n, d = circuit.n_wires, circuit.d
    qn = kron_all([Q] * n)
    return qn @ monomial_dense(V, n, d) @ np.linalg.inv(qn)


def test_expand_gate_and_inverse_is_identity(rng):
    reg = {"R": random_gate("r2", rng)}
    c = Circuit(2, 2, (Op("R", (0, 1)), Op("R", (0, 1), True)))
    assert frob_dist(expanded_dense(c, reg), np.eye(4)) < 1e-10


@pytest.mark.parametrize("d", [2, 3])
def test_expansion_matches_original(d, rng):
    Q = random_unitary(d, rng)
    reg = {"A": random_normal_form(d, rng, Q), "B": random_normal_form(d, rng, Q)}
    for _ in range(5):
        c = random_circuit(3, d, 6, rng, ("A", "B"))
        assert frob_dist(expanded_dense(c, reg), dense_circuit(c, reg)) < 1e-10


def test_expand_rejects_mixed_q(rng):
    reg = {"A": random_gate("r1", rng), "B": random_gate("r1", rng)}
    c = Circuit(2, 2, (Op("A", (0, 1)), Op("B", (0, 1))))
    with pytest.raises(GateMismatchError, match="mixed Q"):
        expand_circuit(c, reg)


def test_expand_rejects_non_monomial(rng):
    reg = {"R": random_gate("r4", rng)}
    with pytest.raises(GateMismatchError):
        expand_circuit(Circuit(2, 2, (Op("R", (0, 1)),)), reg)


# -- symbolic action and phases ------------------------------------------


def test_symbolic_action_empty():
    act = symbolic_action([], 3, 2)
    assert act.pi == (0, 1, 2)
    assert np.array_equal(act.f, np.tile(np.arange(2), (3, 1)))


def test_symbolic_action_single_swap():
    g = MonomialGate(np.ones(4), True, (0, 1), (0, 1))
    assert symbolic_action([g], 2, 2).pi == (1, 0)


def test_phase_read_off_diagonal():
    g = MonomialGate(np.array([1, 1, 1, -1]), True, (0, 1), (0, 1))
    assert phase_of([g], (1, 1), 2) == pytest.approx(math.pi)
    assert phase_of([], (0, 1, 1), 2) == 0


@pytest.mark.parametrize("n,d", [(4, 2), (3, 3)])
def test_symbolic_action_matches_dense(n, d, rng):
    V = random_monomial_circuit(n, d, 10, rng)
    dense = monomial_dense(V, n, d)
    act = symbolic_action(V, n, d)
    for y in itertools.product(range(d), repeat=n):
        col = dense @ basis_state(y, d)
        out = act.apply(y)
        expected = np.exp(1j * phase_of(V, y, d)) * basis_state(out, d)
        assert frob_dist(col, expected) < 1e-10
        _, vals = propagate(V, np.array([y]), d)
        assert tuple(vals[0]) == out


# -- theta, rho, marginals -----------------------------------------------


def test_theta_trivial():
    act = symbolic_action([], 2, 2)
    dec = decompose_q(np.eye(2))
    assert np.all(theta(np.array([[0, 1], [1, 1]]), np.zeros(2), dec, (0, 1), (0, 1), act) == 0)


def test_theta_single_wire_diagonal_q():
    gamma = 0.7
    dec = decompose_q(np.diag([1, np.exp(1j * gamma)]))
    act = symbolic_action([], 1, 2)
    th = theta(np.array([[1]]), np.zeros(1), dec, (1,), (1,), act)
    # alpha(1,1) = gamma and beta(1,1) = -gamma
    assert dec.alpha[1, 1] == pytest.approx(gamma)
    assert th[0] == pytest.approx(0.0)


def test_rho_identity_q():
    act = symbolic_action([], 3, 2)
    A = B = np.eye(2)
    assert normalization_rho((0, 1, 1), (0, 1, 1), act, A, B) == 1
    assert normalization_rho((0, 1, 1), (0, 0, 1), act, A, B) == 0
    assert marginals((0, 1, 1), (0, 0, 1), act, A, B) is None
    P = marginals((0, 1, 1), (0, 1, 1), act, A, B)
    assert np.array_equal(P, [[1, 0], [0, 1], [0, 1]])


def test_rho_hadamard_is_one():
    dec = decompose_q(H)
    act = symbolic_action([], 3, 2)
    for x, z in itertools.product(itertools.product(range(2), repeat=3), repeat=2):
        assert normalization_rho(x, z, act, dec.A, dec.B) == pytest.approx(1.0)
        assert np.allclose(marginals(x, z, act, dec.A, dec.B), 0.5)


def test_rho_below_one_for_unbalanced_r1():
    g = build_r1(FamilyParams("r1", a=1, b=0.3, d_entry=1.5))
    dec = decompose_q(g.Q)
    act = symbolic_action([], 2, 2)
    rhos = [normalization_rho(x, z, act, dec.A, dec.B)
            for x in itertools.product(range(2), repeat=2) for z in itertools.product(range(2), repeat=2)]
    assert max(rhos) <= 1 + 1e-12
    assert min(rhos) < 1 - 1e-3


def test_certified_zero_matches_oracle():
    reg = {"R": build_r1(FamilyParams("r1", p=1j, r_phase=-1))}
    c = Circuit(3, 2, (Op("R", (0, 1)), Op("R", (1, 2))))
    est = estimate_amplitude(c, reg, (1, 0, 0), (1, 1, 0), 0.2)
    assert est.certified_zero and est.value == 0 and est.n_samples == 0
    assert oracle_amplitude(c, reg, (1, 0, 0), (1, 1, 0)) == 0


@pytest.mark.parametrize("n,d", [(2, 2), (3, 2), (2, 3), (3, 3)])
def test_exact_mean_equals_oracle(n, d, rng):
    for _ in range(4):
        Q = random_unitary(d, rng)
        reg = {"A": random_normal_form(d, rng, Q), "B": random_normal_form(d, rng, Q)}
        c = random_circuit(n, d, 5, rng, ("A", "B"))
        x = tuple(rng.integers(0, d, n))
        z = tuple(rng.integers(0, d, n))
        assert abs(exact_mean(c, reg, x, z) - oracle_amplitude(c, reg, x, z)) < 1e-10


def test_exact_mean_general_invertible_q(rng):
    # non-unitary Q: amplitudes can be large, so compare relatively
    for _ in range(30):
        Q = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)) + 2 * np.eye(3)
        if np.linalg.cond(Q) > 10:
            continue  # rounding grows with cond(Q)^depth; keep the instance well conditioned
        reg = {"A": random_normal_form(3, rng, Q)}
        c = random_circuit(3, 3, 4, rng, ("A",))
        x, z = tuple(rng.integers(0, 3, 3)), tuple(rng.integers(0, 3, 3))
        want = oracle_amplitude(c, reg, x, z)
        assert abs(exact_mean(c, reg, x, z) - want) <= 1e-10 * max(1.0, abs(want))


# -- sampler -------------------------------------------------------------


def test_sampler_point_mass(rng):
    ys = sample_product([[0, 1, 0], [1, 0, 0]], rng=rng, size=200)
    assert np.all(ys == [1, 0])


def test_sampler_fair_coin(rng):
    assert interval_boundaries([0.5, 0.5], 8) == [0, 128, 256]
    ys = sample_product([[0.5, 0.5]], 8, rng, size=100_000)
    freq = ys.mean()
    assert abs(freq - 0.5) < 4 * math.sqrt(0.25 / 100_000)


def test_sampler_rejects_small_m():
    with pytest.raises(InputError):
        sample_product(np.full((3, 2), 0.5), 8)


def test_sampler_matches_induced_law(rng):
    p = np.array([[0.2, 0.3, 0.5]])
    law = [float(f) for f in induced_distribution(p[0], 5)]
    ys = sample_product(p, 5, rng, size=200_000)
    freq = np.bincount(ys[:, 0], minlength=3) / len(ys)
    assert np.max(np.abs(freq - law)) < 0.005


def test_sampler_wide_limbs(rng):
    # m > 62 bits exercises the multi-limb comparison
    p = np.array([[1 / 3, 1 / 3, 1 / 3]])
    ys = sample_product(p, 130, rng, size=60_000)
    freq = np.bincount(ys[:, 0], minlength=3) / len(ys)
    assert np.max(np.abs(freq - 1 / 3)) < 0.01


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=2, max_size=5), st.integers(1, 20))
def test_induced_law_is_a_distribution(weights, m):
    w = np.array(weights)
    if w.sum() == 0:
        w[0] = 1
    p = w / w.sum()
    law = induced_distribution(p, m)
    assert sum(law) == 1
    assert all(q >= 0 for q in law)
    # only the last interval can be off by more than half a unit
    for k in range(len(p) - 1):
        assert abs(float(law[k]) - p[k]) <= 2.0**-m or law[k] == 0 or sum(law[:k]) + law[k] == 1


def test_tv_bound_small_case(rng):
    for _ in range(20):
        P = rng.random((3, 2))
        P /= P.sum(axis=1, keepdims=True)
        laws = [induced_distribution(P[j], 9) for j in range(3)]
        tv = Fraction(0)
        for y in itertools.product(range(2), repeat=3):
            exact = Fraction(1)
            for j in range(3):
                exact *= laws[j][y[j]]
            tv += abs(Fraction(float(np.prod(P[np.arange(3), y]))) - exact)
        assert tv / 2 <= Fraction(1, 8)


# -- estimator -----------------------------------------------------------


def test_required_samples():
    assert required_samples(6, 0.1) == 48000
    assert default_coin_bits(3, 2) == 9


def test_chernoff_values():
    n, eps = 5, 0.25
    assert chernoff_bound(8 * n / eps**3, eps) == pytest.approx(4 * math.exp(-n / eps))
    vals = [chernoff_bound(1000, e) for e in (0.1, 0.2, 0.4, 0.8)]
    assert vals == sorted(vals, reverse=True)


def test_empty_circuit_estimates():
    c = Circuit(3, 2, ())
    reg = {"R": build_r1(FamilyParams("r1"))}
    est = estimate_amplitude(c, reg, (0, 1, 1), (0, 1, 1), 0.3)
    assert abs(est.value - 1) < 0.3
    zero = estimate_amplitude(c, reg, (0, 1, 1), (1, 1, 1), 0.3)
    assert zero.certified_zero and zero.value == 0


def test_estimate_close_to_oracle(rng):
    g = random_gate("r1", rng)
    c = random_circuit(4, 2, 8, rng, adjacent=True)
    reg = {"R": g}
    x, z = (0, 1, 1, 0), (1, 0, 1, 0)
    est = estimate_amplitude(c, reg, x, z, 0.2, seed=3)
    assert est.n_samples == required_samples(4, 0.2)
    assert abs(est.value - oracle_amplitude(c, reg, x, z)) < 0.2
    assert est.rho <= 1 + 1e-12


def test_estimate_deterministic_and_thread_invariant(rng):
    reg = {"R": random_gate("r3", rng)}
    c = random_circuit(5, 2, 10, rng, adjacent=True)
    x, z = (0, 1, 0, 1, 1), (1, 1, 0, 0, 1)
    a = estimate_amplitude(c, reg, x, z, 0.3, seed=7, n_samples=20000, block_size=1000)
    b = estimate_amplitude(c, reg, x, z, 0.3, seed=7, n_samples=20000, block_size=1000, threads=4)
    assert a.value == b.value
    other = estimate_amplitude(c, reg, x, z, 0.3, seed=8, n_samples=20000, block_size=1000)
    assert other.value != a.value


def test_estimate_refuses_without_property_g():
    Q = np.array([[1, 1], [0, 1]], dtype=complex)
    nf = YbNormalForm(2, 1.0, Q, np.ones(4), True, (0, 1))
    c = Circuit(2, 2, (Op("R", (0, 1)),))
    with pytest.raises(PropertyGError):
        estimate_amplitude(c, {"R": nf}, (0, 0), (0, 0), 0.2)
    # the identity E[X] = <x|U|z> still holds
    assert abs(exact_mean(c, {"R": nf}, (0, 0), (0, 1)) - oracle_amplitude(c, {"R": nf}, (0, 0), (0, 1))) < 1e-12


def test_estimate_input_validation(rng):
    reg = {"R": random_gate("r1", rng)}
    c = Circuit(2, 2, ())
    with pytest.raises(InputError):
        estimate_amplitude(c, reg, (0, 0), (0, 0), 1.5)
    with pytest.raises(InputError):
        estimate_amplitude(c, reg, (0, 2), (0, 0), 0.1)
    with pytest.raises(InputError):
        estimate_amplitude(c, reg, (0,), (0, 0), 0.1)


def test_variance_scales_inverse_n(rng):
    reg = {"R": random_gate("r1", rng)}
    c = random_circuit(4, 2, 8, rng, adjacent=True)
    x, z = (0, 1, 0, 1), (1, 0, 0, 1)
    truth = oracle_amplitude(c, reg, x, z)
    Ns = [100, 1000, 10000]
    var = []
    for N in Ns:
        errs = [abs(estimate_amplitude(c, reg, x, z, 0.5, seed=s, n_samples=N).value - truth) ** 2
                for s in range(150)]
        var.append(np.mean(errs))
    slope = np.polyfit(np.log(Ns), np.log(var), 1)[0]
    assert -1.2 <= slope <= -0.8
