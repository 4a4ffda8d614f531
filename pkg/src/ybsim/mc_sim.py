"""Probabilistic amplitude estimation for Q-conjugated monomial circuits.

A circuit over gates ``(Q x Q) D P (C x C) (Q x Q)^-1`` that all share one
``Q`` collapses to ``Q^{x n} V (Q^-1)^{x n}`` where ``V`` only permutes
basis states and attaches phases. Writing

    <x|U|z> = sum_y rho * exp(i theta(y)) * P(y)

with ``P`` a product distribution over ``[d]^n``, the average of
``rho * exp(i theta(y))`` over samples ``y ~ P`` is an unbiased estimate of
the amplitude, bounded by ``rho <= 1`` whenever ``Q`` has property (G) for
the group generated by the gates' permutations.

Sampling is reproducible: sample ``j`` belongs to block ``j // block_size``
and every block draws from its own stream keyed by ``(seed, block)``, so the
result does not depend on the number of worker threads.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping, Sequence

import numpy as np

from .errors import GateMismatchError, InputError, PropertyGError
from .solutions import YbNormalForm, check_property_g, identity_perm, invert_perm

LIMB_BITS = 62
BLOCK_SIZE = 4096
ZERO_TOL = 1e-14


@dataclass(frozen=True, eq=False)
class MonomialGate:
    """``diag(D) P (C x C)`` placed on an ordered pair of wires."""

    D: np.ndarray
    swap: bool
    C: tuple[int, ...]
    wires: tuple[int, int]

    @property
    def d(self) -> int:
        return len(self.C)

    @property
    def matrix(self) -> np.ndarray:
        return YbNormalForm(self.d, 1.0, np.eye(self.d), self.D, self.swap, self.C).inner


@dataclass(frozen=True, eq=False)
class SymbolicAction:
    """``V|y> ~ |f_0 y_{pi 0} ... f_{n-1} y_{pi(n-1)}>`` up to phase.

    ``f[j]`` is the bijection applied to the value landing on output wire
    ``j``; ``sigma`` is the inverse of ``pi``.
    """

    pi: tuple[int, ...]
    f: np.ndarray

    @property
    def sigma(self) -> tuple[int, ...]:
        return invert_perm(self.pi)

    def apply(self, y: Sequence[int]) -> tuple[int, ...]:
        return tuple(int(self.f[j][y[self.pi[j]]]) for j in range(len(self.pi)))


@dataclass(frozen=True, eq=False)
class QDecomposition:
    A: np.ndarray
    alpha: np.ndarray
    B: np.ndarray
    beta: np.ndarray


@dataclass
class AmplitudeEstimate:
    value: complex
    n_samples: int
    epsilon: float
    failure_bound: float
    rho: float
    seed: int
    certified_zero: bool = False
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "value": [self.value.real, self.value.imag],
            "n_samples": self.n_samples,
            "epsilon": self.epsilon,
            "failure_bound": self.failure_bound,
            "rho": self.rho,
            "seed": self.seed,
            "certified_zero": self.certified_zero,
        }


# -- expansion -----------------------------------------------------------


def normal_form_of(obj) -> YbNormalForm:
    if isinstance(obj, YbNormalForm):
        return obj
    nf = getattr(obj, "normal_form", None)
    if isinstance(nf, YbNormalForm):
        return nf
    raise GateMismatchError(f"gate {obj!r} has no monomial normal form; the estimator needs Q-conjugated monomial gates")


def _inverse_parts(nf: YbNormalForm) -> tuple[np.ndarray, bool, tuple[int, ...]]:
    # (D P (C x C))^-1 = D' P (C^-1 x C^-1) with D' = P (C^-1 x C^-1) D^-1 (C x C) P
    d = nf.d
    cinv = invert_perm(nf.C)
    D_new = np.empty(d * d, dtype=complex)
    for u in range(d):
        for v in range(d):
            a, b = cinv[u], cinv[v]
            if nf.swap:
                a, b = b, a
            D_new[a * d + b] = np.conj(nf.D[u * d + v])
    return D_new, nf.swap, cinv


def expand_circuit(circuit, registry: Mapping[str, Any], q_tol: float = 1e-12) -> tuple[np.ndarray, list[MonomialGate]]:
    """Rewrite a circuit as ``Q^{x n} V (Q^-1)^{x n}``; returns ``(Q, V)``.

    Every gate must share the same ``Q``.
    """
    forms: dict[str, YbNormalForm] = {}
    for gid in sorted(circuit.gate_ids()):
        if gid not in registry:
            raise GateMismatchError(f"unknown gate id {gid!r}")
        forms[gid] = normal_form_of(registry[gid])
    if not forms:
        return np.eye(circuit.d, dtype=complex), []
    Q = next(iter(forms.values())).Q
    for gid, nf in forms.items():
        if nf.d != circuit.d:
            raise GateMismatchError(f"gate {gid!r} has d={nf.d}, circuit has d={circuit.d}")
        if np.linalg.norm(nf.Q - Q) > q_tol * max(1.0, np.linalg.norm(Q)):
            raise GateMismatchError("mixed Q across gates: the estimator requires every gate to share one Q")
    V = []
    for op in circuit.ops:
        if len(op.wires) != 2:
            raise GateMismatchError(f"op {op} is not a two-qudit gate")
        nf = forms[op.gate_id]
        if op.inverse:
            D, swap, C = _inverse_parts(nf)
        else:
            D, swap, C = nf.D, nf.swap, nf.C
        V.append(MonomialGate(D, swap, C, tuple(op.wires)))
    return Q, V


def permutation_group_of(V: Sequence[MonomialGate], d: int) -> list[tuple[int, ...]]:
    gens = {g.C for g in V}
    gens.discard(identity_perm(d))
    return sorted(gens)


# -- symbolic action and phases ------------------------------------------


def symbolic_action(V: Sequence[MonomialGate], n: int, d: int) -> SymbolicAction:
    src = list(range(n))
    f = np.tile(np.arange(d), (n, 1))
    for g in V:
        w0, w1 = g.wires
        c = np.asarray(g.C)
        f[w0], f[w1] = c[f[w0]], c[f[w1]]
        if g.swap:
            src[w0], src[w1] = src[w1], src[w0]
            f[[w0, w1]] = f[[w1, w0]]
    return SymbolicAction(tuple(src), f)


def propagate(V: Sequence[MonomialGate], ys: np.ndarray, d: int) -> tuple[np.ndarray, np.ndarray]:
    """Push basis states (rows of ``ys``) through ``V``.

    Returns the accumulated phase angles and the output dit strings.
    """
    vals = np.array(ys, dtype=np.int64, copy=True)
    if vals.ndim == 1:
        vals = vals[None, :]
    phase = np.zeros(vals.shape[0])
    for g in V:
        w0, w1 = g.wires
        c = np.asarray(g.C)
        u, v = c[vals[:, w0]], c[vals[:, w1]]
        if g.swap:
            u, v = v, u
        phase += np.angle(g.D)[u * d + v]
        vals[:, w0], vals[:, w1] = u, v
    return phase, vals


def phase_of(V: Sequence[MonomialGate], y: Sequence[int], d: int) -> float:
    phase, _ = propagate(V, np.asarray([y]), d)
    return float(phase[0])


def decompose_q(Q) -> QDecomposition:
    Q = np.asarray(Q, dtype=complex)
    Qi = np.linalg.inv(Q)
    return QDecomposition(np.abs(Q), np.angle(Q), np.abs(Qi), np.angle(Qi))


def theta(ys, phi, dec: QDecomposition, x: Sequence[int], z: Sequence[int], action: SymbolicAction):
    """Phase of the ``y``-th summand; vectorized over rows of ``ys``."""
    ys = np.atleast_2d(np.asarray(ys, dtype=np.int64))
    total = np.array(phi, dtype=float, copy=True).reshape(-1)
    sigma = action.sigma
    for j in range(ys.shape[1]):
        out = sigma[j]
        col = ys[:, j]
        total = total + dec.alpha[x[out], action.f[out][col]] + dec.beta[col, z[j]]
    return total


def _factor_terms(x, z, action: SymbolicAction, A, B) -> np.ndarray:
    """``terms[j, k] = A(x_{sigma j}, f_{sigma j} k) B(k, z_j)``."""
    n = len(z)
    d = A.shape[0]
    sigma = action.sigma
    ks = np.arange(d)
    terms = np.empty((n, d))
    for j in range(n):
        out = sigma[j]
        terms[j] = A[x[out], action.f[out][ks]] * B[ks, z[j]]
    return terms


def normalization_rho(x, z, action: SymbolicAction, A, B) -> float:
    return float(np.prod(_factor_terms(x, z, action, A, B).sum(axis=1)))


def marginals(x, z, action: SymbolicAction, A, B, zero_tol: float = ZERO_TOL) -> np.ndarray | None:
    """Rows ``P_j`` of the product distribution, or ``None`` for a certified zero.

    A vanishing normalizer means every summand of the amplitude vanishes,
    so the amplitude is exactly zero.
    """
    terms = _factor_terms(x, z, action, A, B)
    sums = terms.sum(axis=1)
    if np.any(sums <= zero_tol):
        return None
    return terms / sums[:, None]


# -- product sampler -----------------------------------------------------


def default_coin_bits(n: int, d: int) -> int:
    if d <= 1:
        return 1
    return max(1, math.ceil(3 * n * math.log2(d) - 1e-9))


def interval_boundaries(p: Sequence[float], m: int) -> list[int]:
    """Integer cut points ``0 = c_0 <= ... <= c_d = 2^m``.

    Interval ``k`` has size ``round(p_k 2^m)`` except the last, which takes
    the remainder; cut points are clamped to ``2^m``.
    """
    total = 1 << m
    cuts = [0]
    for pk in p[:-1]:
        size = int(round(float(pk) * total))
        cuts.append(min(total, cuts[-1] + size))
    cuts.append(total)
    return cuts


def induced_distribution(p: Sequence[float], m: int) -> list[Fraction]:
    """The exact output law of the interval sampler for one coordinate."""
    cuts = interval_boundaries(p, m)
    return [Fraction(cuts[k + 1] - cuts[k], 1 << m) for k in range(len(p))]


def _limb_widths(m: int) -> list[int]:
    n_limbs = -(-m // LIMB_BITS)
    top = m - LIMB_BITS * (n_limbs - 1)
    return [top] + [LIMB_BITS] * (n_limbs - 1)


def _split_limbs(value: int, widths: list[int]) -> list[int]:
    out = []
    shift = sum(widths)
    for w in widths:
        shift -= w
        out.append((value >> shift) & ((1 << w) - 1))
    return out


def sample_product(probs, m: int | None = None, rng: np.random.Generator | None = None, size: int = 1) -> np.ndarray:
    """Draw ``size`` strings from ``prod_j P_j`` using ``m`` coin flips per coordinate.

    ``probs`` is an ``(n, d)`` array of marginals. Returns an ``(size, n)``
    integer array.
    """
    probs = np.atleast_2d(np.asarray(probs, dtype=float))
    n, d = probs.shape
    need = default_coin_bits(n, d)
    if m is None:
        m = need
    if m < need:
        raise InputError(f"coin_bits m={m} too small; need m >= ceil(3 n log2 d) = {need}")
    rng = rng if rng is not None else np.random.default_rng()
    widths = _limb_widths(m)
    out = np.empty((size, n), dtype=np.int64)
    for j in range(n):
        limbs = [rng.integers(0, 1 << w, size=size, dtype=np.int64) for w in widths]
        cuts = interval_boundaries(probs[j], m)
        k = np.zeros(size, dtype=np.int64)
        for c in cuts[1:-1]:
            if c >= 1 << m:
                continue  # no m-bit draw reaches 2^m
            climbs = _split_limbs(c, widths)
            ge = limbs[-1] >= climbs[-1]
            for lv, cv in zip(reversed(limbs[:-1]), reversed(climbs[:-1])):
                ge = (lv > cv) | ((lv == cv) & ge)
            k += ge
        out[:, j] = k
    return out


# -- estimator -----------------------------------------------------------


def chernoff_bound(n_samples: float, epsilon: float, b: float = 1.0) -> float:
    """``4 exp(-N eps^2 / (8 b^2))`` for the mean of bounded complex variables."""
    if n_samples <= 0 or epsilon <= 0 or b <= 0:
        raise InputError("chernoff_bound needs positive inputs")
    return 4.0 * math.exp(-n_samples * epsilon**2 / (8.0 * b * b))


def required_samples(n: int, epsilon: float) -> int:
    return math.ceil(round(8 * n / epsilon**3, 9))


def block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(block,))))


@dataclass
class _Prepared:
    n: int
    d: int
    V: list
    action: SymbolicAction
    dec: QDecomposition
    probs: np.ndarray | None
    rho: float
    x: tuple[int, ...]
    z: tuple[int, ...]


def _check_dits(s: Sequence[int], n: int, d: int, name: str) -> tuple[int, ...]:
    s = tuple(int(v) for v in s)
    if len(s) != n or any(not 0 <= v < d for v in s):
        raise InputError(f"{name} must be a string of {n} dits over [{d}]")
    return s


def prepare(circuit, registry, x, z, require_property_g: bool = True) -> _Prepared:
    n, d = circuit.n_wires, circuit.d
    x = _check_dits(x, n, d, "x")
    z = _check_dits(z, n, d, "z")
    Q, V = expand_circuit(circuit, registry)
    if require_property_g:
        report = check_property_g(Q, permutation_group_of(V, d))
        if not report.holds:
            raise PropertyGError(
                f"Q violates property (G) (max sum {report.max_sum:.6g} at {report.witness}); "
                "the estimator's variance bound does not apply"
            )
    action = symbolic_action(V, n, d)
    dec = decompose_q(Q)
    probs = marginals(x, z, action, dec.A, dec.B)
    rho = 0.0 if probs is None else normalization_rho(x, z, action, dec.A, dec.B)
    return _Prepared(n, d, V, action, dec, probs, rho, x, z)


def _block_sum(prep: _Prepared, seed: int, block: int, size: int, m: int) -> complex:
    rng = block_rng(seed, block)
    ys = sample_product(prep.probs, m, rng, size)
    phi, _ = propagate(prep.V, ys, prep.d)
    th = theta(ys, phi, prep.dec, prep.x, prep.z, prep.action)
    return complex(np.exp(1j * th).sum())


def estimate_amplitude(
    circuit,
    registry: Mapping[str, Any],
    x: Sequence[int],
    z: Sequence[int],
    epsilon: float,
    seed: int = 0,
    n_samples: int | None = None,
    coin_bits: int | None = None,
    threads: int = 1,
    block_size: int = BLOCK_SIZE,
) -> AmplitudeEstimate:
    """Estimate ``<x|U|z>`` to additive error ``epsilon``.

    Draws ``ceil(8 n / eps^3)`` samples unless ``n_samples`` is given; the
    returned ``failure_bound`` is the Chernoff bound for the actual count.
    """
    if not 0 < epsilon < 1:
        raise InputError("epsilon must lie in (0, 1)")
    prep = prepare(circuit, registry, x, z)
    if prep.probs is None:
        return AmplitudeEstimate(0j, 0, epsilon, 0.0, 0.0, seed, certified_zero=True)
    N = required_samples(prep.n, epsilon) if n_samples is None else int(n_samples)
    if N < 1:
        raise InputError("n_samples must be positive")
    m = coin_bits if coin_bits is not None else default_coin_bits(prep.n, prep.d)
    blocks = [(b, min(block_size, N - b * block_size)) for b in range(-(-N // block_size))]
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            sums = list(pool.map(lambda bs: _block_sum(prep, seed, bs[0], bs[1], m), blocks))
    else:
        sums = [_block_sum(prep, seed, b, s, m) for b, s in blocks]
    total = 0j
    for s in sums:
        total += s
    value = prep.rho * total / N
    return AmplitudeEstimate(value, N, epsilon, chernoff_bound(N, epsilon, 1.0), prep.rho, seed,
                             extra={"coin_bits": m, "block_size": block_size})


def exact_mean(circuit, registry: Mapping[str, Any], x: Sequence[int], z: Sequence[int]) -> complex:
    """``sum_y rho exp(i theta(y)) P(y)`` by enumerating all ``y`` (small n only).

    This is the expectation of one estimator sample; it does not require
    property (G).
    """
    prep = prepare(circuit, registry, x, z, require_property_g=False)
    if prep.probs is None:
        return 0j
    ys = np.array(list(itertools.product(range(prep.d), repeat=prep.n)), dtype=np.int64)
    phi, _ = propagate(prep.V, ys, prep.d)
    th = theta(ys, phi, prep.dec, prep.x, prep.z, prep.action)
    p = np.prod(prep.probs[np.arange(prep.n), ys], axis=1)
    return complex(np.sum(prep.rho * np.exp(1j * th) * p))
