"""Unitary Yang-Baxter solution families and property (G).

The four qubit families are all of the shape ``R = k (Q x Q) S T (Q x Q)^-1``
with ``Q = [[a, b], [c, d_entry]]``. Families one to three are returned as
:class:`YbNormalForm`, i.e. rewritten as ``(Q x Q) D P (C x C) (Q x Q)^-1``
with ``D`` diagonal unitary (global phase ``k`` folded in), ``P`` either the
identity or the swap, and ``C`` a permutation. Family four is Clifford up to
a unitary change of basis and is returned as :class:`R4Gate` instead.
"""

from __future__ import annotations

import cmath
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConstraintError, InputError
from .linalg import as_matrix, frob_dist, is_unitary
from .ybe import TwoQuditGate, check_qybe, swap_operator

PARAM_TOL = 1e-9
GATE_TOL = 1e-9
GROUP_ORDER_CAP = 10**6

FAMILIES = ("r1", "r2", "r3", "r4")

S4T = np.array(
    [[1, 0, 0, 1], [0, 1, 1, 0], [0, -1, 1, 0], [-1, 0, 0, 1]], dtype=complex
) / np.sqrt(2)


@dataclass
class FamilyParams:
    """Parameters of one qubit solution family.

    ``c`` is only read for family two; the other families derive it from
    ``c = -a conj(b) / conj(d_entry)``.
    """

    family: str
    a: complex = 1.0
    b: complex = 0.0
    d_entry: complex = 1.0
    c: complex | None = None
    p: complex = 1.0
    q: complex = 1.0
    r_phase: complex = 1.0
    k: complex = 1.0

    def __post_init__(self):
        self.family = self.family.lower()
        if self.family not in FAMILIES:
            raise InputError(f"unknown family {self.family!r}")
        for name in ("a", "b", "d_entry", "p", "q", "r_phase", "k"):
            v = complex(getattr(self, name))
            if not cmath.isfinite(v):
                raise InputError(f"parameter {name} is not finite")
            setattr(self, name, v)
        if self.c is not None:
            self.c = complex(self.c)


def identity_perm(d: int) -> tuple[int, ...]:
    return tuple(range(d))


def perm_matrix(perm: Sequence[int]) -> np.ndarray:
    """Matrix with ``C|s> = |perm[s]>``."""
    d = len(perm)
    m = np.zeros((d, d), dtype=complex)
    m[list(perm), list(range(d))] = 1.0
    return m


def invert_perm(perm: Sequence[int]) -> tuple[int, ...]:
    inv = [0] * len(perm)
    for i, p in enumerate(perm):
        inv[p] = i
    return tuple(inv)


@dataclass(frozen=True, eq=False)
class YbNormalForm:
    """Gate ``(Q x Q) diag(D) P (C x C) (Q x Q)^-1``.

    ``D`` holds the ``d*d`` diagonal phases (with ``k`` already folded in) in
    lexicographic ``(i, j)`` order; ``swap`` selects ``P = T``.
    """

    d: int
    k: complex
    Q: np.ndarray
    D: np.ndarray
    swap: bool
    C: tuple[int, ...]
    family: str = ""
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        Q = as_matrix(self.Q)
        D = np.asarray(self.D, dtype=complex).reshape(-1)
        if Q.shape != (self.d, self.d) or D.shape != (self.d**2,):
            raise InputError("normal form dimensions do not match d")
        if sorted(self.C) != list(range(self.d)):
            raise InputError(f"C={self.C} is not a permutation of [{self.d}]")
        if abs(np.linalg.det(Q)) < 1e-12:
            raise InputError("Q is singular")
        if np.max(np.abs(np.abs(D) - 1)) > 1e-12:
            raise InputError("D must have unit-modulus entries")
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "D", D)
        object.__setattr__(self, "C", tuple(int(c) for c in self.C))
        object.__setattr__(self, "Q_inv", np.linalg.inv(Q))

    @property
    def inner(self) -> np.ndarray:
        """The monomial part ``D P (C x C)``."""
        c = perm_matrix(self.C)
        p = swap_operator(self.d) if self.swap else np.eye(self.d**2)
        return np.diag(self.D) @ p @ np.kron(c, c)

    @property
    def matrix(self) -> np.ndarray:
        qq = np.kron(self.Q, self.Q)
        return qq @ self.inner @ np.kron(self.Q_inv, self.Q_inv)

    def validate(self, tol: float = GATE_TOL) -> None:
        m = self.matrix
        if not is_unitary(m, tol):
            raise ConstraintError("unitarity", "reconstructed gate is not unitary")
        ok, res = check_qybe(m, tol)
        if not ok:
            raise ConstraintError("qybe", f"reconstructed gate fails QYBE (residual {res:.3e})")


@dataclass(frozen=True, eq=False)
class R4Gate:
    """Family-four gate ``k (Q1 x Q1) S4T (Q1 x Q1)^dagger`` with ``Q1`` unitary.

    The inner gate is always the fixed Clifford ``S4T``; the expectation
    algorithm in :mod:`ybsim.clifford` relies on that.
    """

    k: complex
    Q1: np.ndarray
    matrix: np.ndarray
    Q: np.ndarray
    d: int = 2
    family: str = "r4"
    inner_clifford: str = "S4T"


@dataclass
class PropertyGReport:
    group_order: int
    max_sum: float
    witness: tuple[tuple[int, ...], int, int]
    holds: bool


# -- helpers -------------------------------------------------------------


def _q_matrix(a, b, c, d) -> np.ndarray:
    return np.array([[a, b], [c, d]], dtype=complex)


def derived_c(a: complex, b: complex, d_entry: complex) -> complex:
    if abs(d_entry) < 1e-12:
        raise ConstraintError("d_entry-nonzero", "d_entry must be nonzero to derive c = -a conj(b)/conj(d)")
    return -a * b.conjugate() / d_entry.conjugate()


def _require_unit(name: str, v: complex, what: str = "unit-phase") -> None:
    if abs(abs(v) - 1) > PARAM_TOL:
        raise ConstraintError(what, f"|{name}| = {abs(v):.12g}, expected 1")


def _require_invertible(Q: np.ndarray) -> None:
    if abs(np.linalg.det(Q)) < 1e-12:
        raise ConstraintError("Q-invertible", "Q is singular")


def family_s_matrix(family: str, p: complex = 1, q: complex = 1, r: complex = 1) -> np.ndarray:
    """The ``S`` matrix of a qubit family, exactly as tabulated."""
    family = family.lower()
    if family == "r1":
        return np.diag([1, p, q, r]).astype(complex)
    if family in ("r2", "r3"):
        s = np.zeros((4, 4), dtype=complex)
        s[0, 3], s[1, 2], s[2, 1], s[3, 0] = p, 1, 1, q
        return s
    if family == "r4":
        return S4T @ swap_operator(2)
    raise InputError(f"unknown family {family!r}")


def conjugated_gate(k: complex, Q, S) -> np.ndarray:
    """``k (Q x Q) S T (Q x Q)^-1``, the untransformed family formula."""
    Q = as_matrix(Q)
    qq = np.kron(Q, Q)
    qi = np.linalg.inv(Q)
    d = Q.shape[0]
    return k * qq @ as_matrix(S) @ swap_operator(d) @ np.kron(qi, qi)


def family_q(params: FamilyParams) -> np.ndarray:
    """Q as given by the parameters (c derived except for family two)."""
    if params.family == "r2":
        if params.c is None:
            raise ConstraintError("c-required", "family two takes c as an explicit parameter")
        c = params.c
    else:
        c = derived_c(params.a, params.b, params.d_entry)
    return _q_matrix(params.a, params.b, c, params.d_entry)


# -- family builders -----------------------------------------------------


def build_r1(params: FamilyParams) -> YbNormalForm:
    _require_unit("k", params.k, "k-modulus")
    for name in ("p", "q", "r_phase"):
        _require_unit(name, getattr(params, name))
    Q = family_q(params)
    _require_invertible(Q)
    D = params.k * np.array([1, params.p, params.q, params.r_phase])
    nf = YbNormalForm(2, params.k, Q, D, True, (0, 1), family="r1")
    nf.validate()
    return nf


def r2_p(a: complex, b: complex, c: complex, d: complex) -> complex:
    """Family-two ``p`` from the entries of Q."""
    num = (abs(b) ** 2 + abs(d) ** 2) * (a.conjugate() * b + c.conjugate() * d)
    den1 = abs(a) ** 2 + abs(c) ** 2
    den2 = a * b.conjugate() + c * d.conjugate()
    if abs(den1) < 1e-12 or abs(den2) < 1e-12:
        raise ConstraintError("degenerate denominator", "a conj(b) + c conj(d) and |a|^2 + |c|^2 must be nonzero")
    p = num / (den1 * den2)
    if abs(p) < 1e-12:
        raise ConstraintError("degenerate denominator", "p = 0 so q = 1/p is undefined")
    return p


def eig_unitary_2x2(W: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form ``W = U diag(v) U^dagger`` for a normal 2x2 matrix.

    Falls back to ``U = I`` when the eigenvalue is repeated (W is then scalar).
    """
    tr = W[0, 0] + W[1, 1]
    det = W[0, 0] * W[1, 1] - W[0, 1] * W[1, 0]
    disc = cmath.sqrt(tr * tr / 4 - det)
    l1, l2 = tr / 2 + disc, tr / 2 - disc
    scale = max(1.0, float(np.max(np.abs(W))))
    if abs(l1 - l2) < 1e-12 * scale:
        return np.eye(2, dtype=complex), np.array([W[0, 0], W[1, 1]])
    if abs(W[0, 1]) >= abs(W[1, 0]):
        v = np.array([W[0, 1], l1 - W[0, 0]])
    else:
        v = np.array([l1 - W[1, 1], W[1, 0]])
    v = v / np.linalg.norm(v)
    U = np.array([[v[0], -v[1].conjugate()], [v[1], v[0].conjugate()]])
    return U, np.array([l1, l2])


def build_r2(params: FamilyParams) -> YbNormalForm:
    _require_unit("k", params.k, "k-modulus")
    Q = family_q(params)
    _require_invertible(Q)
    a, b, c, d = Q.ravel()
    p = r2_p(a, b, c, d)
    q = 1 / p
    sp = cmath.sqrt(p)
    M = np.array([[0, sp], [1 / sp, 0]], dtype=complex)
    s2 = family_s_matrix("r2", p, q)
    if frob_dist(np.kron(M, M), s2) > 1e-12 * max(1.0, abs(p), abs(q)):
        raise ConstraintError("M-factorization", "M x M differs from S2")
    W = Q @ M @ np.linalg.inv(Q)
    if not is_unitary(W, PARAM_TOL):
        raise ConstraintError("non-unitary", "Q M Q^-1 is not unitary; parameters do not give a unitary gate")
    U, v = eig_unitary_2x2(W)
    # snap eigenvalues onto the unit circle; W is unitary to PARAM_TOL
    v = v / np.abs(v)
    D = params.k * np.kron(v, v)
    nf = YbNormalForm(2, params.k, U, D, True, (0, 1), family="r2", info={"p": p, "q": q, "M": M, "W": W})
    nf.validate()
    return nf


def build_r3(params: FamilyParams) -> YbNormalForm:
    _require_unit("k", params.k, "k-modulus")
    a, d = params.a, params.d_entry
    if abs(a) < 1e-12 or abs(d) < 1e-12:
        raise ConstraintError("a-d-nonzero", "family three needs a and d_entry nonzero")
    p, q = params.p, params.q
    if abs(abs(p) - abs(d) ** 2 / abs(a) ** 2) > PARAM_TOL:
        raise ConstraintError("p-modulus", f"|p| = {abs(p):.12g}, expected |d|^2/|a|^2 = {abs(d)**2 / abs(a)**2:.12g}")
    if abs(abs(q) - abs(a) ** 2 / abs(d) ** 2) > PARAM_TOL:
        raise ConstraintError("q-modulus", f"|q| = {abs(q):.12g}, expected |a|^2/|d|^2 = {abs(a)**2 / abs(d)**2:.12g}")
    if abs(abs(p * q) - 1) > PARAM_TOL:
        raise ConstraintError("pq-modulus", f"|pq| = {abs(p * q):.12g}, expected 1")
    Q = family_q(params)
    _require_invertible(Q)
    quarter = p**0.25
    N = np.diag([1 / quarter, quarter])
    Ninv = np.diag([quarter, 1 / quarter])
    Qp = Q @ Ninv
    NN = np.kron(N, N)
    s3p = NN @ family_s_matrix("r3", p, q) @ np.kron(Ninv, Ninv)
    if abs(s3p[0, 3] - 1) > PARAM_TOL or abs(abs(s3p[3, 0]) - 1) > PARAM_TOL:
        raise ConstraintError("rescaling", "rescaled S3 does not have p = 1 and |q| = 1")
    X = perm_matrix((1, 0))
    Dm = s3p @ np.kron(X, X)
    if np.max(np.abs(Dm - np.diag(np.diagonal(Dm)))) > PARAM_TOL:
        raise ConstraintError("rescaling", "S3'(X x X) is not diagonal")
    dv = np.diagonal(Dm)
    dv = dv / np.abs(dv)
    nf = YbNormalForm(2, params.k, Qp, params.k * dv, True, (1, 0), family="r3",
                      info={"q_rescaled": complex(s3p[3, 0]), "Q_original": Q})
    nf.validate()
    return nf


def build_r4(params: FamilyParams) -> R4Gate:
    _require_unit("k", params.k, "k-modulus")
    a, b, d = params.a, params.b, params.d_entry
    if abs(abs(a) - abs(d)) > PARAM_TOL:
        raise ConstraintError("ad-modulus", f"|a| = {abs(a):.12g} differs from |d_entry| = {abs(d):.12g}")
    Q = family_q(params)
    _require_invertible(Q)
    alpha = np.sqrt(abs(a) ** 2 + abs(b) ** 2)
    Q1 = Q / alpha
    if frob_dist(Q1.conj().T @ Q1, np.eye(2)) > 1e-10:
        raise ConstraintError("scaled-unitary", "Q / alpha is not unitary")
    qq = np.kron(Q1, Q1)
    m = params.k * qq @ S4T @ qq.conj().T
    ok, res = check_qybe(m, GATE_TOL)
    if not ok:
        raise ConstraintError("qybe", f"family-four gate fails QYBE (residual {res:.3e})")
    return R4Gate(params.k, Q1, m, Q)


_BUILDERS = {"r1": build_r1, "r2": build_r2, "r3": build_r3, "r4": build_r4}


def build_family(params: FamilyParams):
    return _BUILDERS[params.family](params)


# -- high-dimensional families ------------------------------------------


def _simultaneous_diagonalizer(A: np.ndarray, B: np.ndarray, tol: float, rng=None) -> np.ndarray:
    # A, B commuting normal => their Hermitian and anti-Hermitian parts all
    # commute; a generic real combination has the common eigenbasis.
    rng = rng or np.random.default_rng(1234)
    parts = [(A + A.conj().T) / 2, (A - A.conj().T) / 2j, (B + B.conj().T) / 2, (B - B.conj().T) / 2j]
    for _ in range(20):
        w = rng.normal(size=4)
        h = sum(wi * pi for wi, pi in zip(w, parts))
        _, U = np.linalg.eigh(h)
        da, db = U.conj().T @ A @ U, U.conj().T @ B @ U
        off = np.linalg.norm(da - np.diag(np.diagonal(da))) + np.linalg.norm(db - np.diag(np.diagonal(db)))
        if off <= tol:
            return U
    raise ConstraintError("commuting", "failed to simultaneously diagonalize A and B")


def build_commuting_swap_solution(A, B, tol: float = 1e-9) -> TwoQuditGate:
    """``T (A x B)`` for commuting unitaries A, B, with its monomial normal form."""
    A, B = as_matrix(A), as_matrix(B)
    if A.shape != B.shape:
        raise InputError("A and B must have equal dimensions")
    if not (is_unitary(A, PARAM_TOL) and is_unitary(B, PARAM_TOL)):
        raise ConstraintError("unitarity", "A and B must be unitary")
    comm = float(np.linalg.norm(A @ B - B @ A))
    if comm > tol:
        raise ConstraintError("commuting", f"A and B do not commute: ||[A,B]||_F = {comm:.6g}")
    d = A.shape[0]
    m = swap_operator(d) @ np.kron(A, B)
    U = _simultaneous_diagonalizer(A, B, max(tol, 1e-9))
    da = np.diagonal(U.conj().T @ A @ U)
    db = np.diagonal(U.conj().T @ B @ U)
    # T (Da x Db) = (Db x Da) T
    D = np.kron(db / np.abs(db), da / np.abs(da))
    nf = YbNormalForm(d, 1.0, U, D, True, identity_perm(d), family="commuting")
    if frob_dist(nf.matrix, m) > 1e-9:
        raise ConstraintError("normal-form", "normal form does not reproduce T (A x B)")
    return TwoQuditGate(d, m, nf)


def build_diagonal_solution(lambdas) -> TwoQuditGate:
    """``S T`` with ``S = diag(lambda_ij)`` in lexicographic order."""
    lam = np.asarray(lambdas, dtype=complex)
    if lam.ndim != 2 or lam.shape[0] != lam.shape[1]:
        raise InputError("lambdas must be a d x d array")
    if np.max(np.abs(np.abs(lam) - 1)) > PARAM_TOL:
        raise ConstraintError("unit-phase", "all lambda_ij must have modulus 1")
    d = lam.shape[0]
    lam = lam / np.abs(lam)
    m = np.diag(lam.ravel()) @ swap_operator(d)
    nf = YbNormalForm(d, 1.0, np.eye(d), lam.ravel(), True, identity_perm(d), family="diag")
    return TwoQuditGate(d, m, nf)


# -- property (G) --------------------------------------------------------


def generate_group(generators: Sequence[Sequence[int]], d: int, cap: int = GROUP_ORDER_CAP) -> list[tuple[int, ...]]:
    """All elements of the permutation group generated by ``generators``."""
    ident = identity_perm(d)
    gens = [tuple(int(x) for x in g) for g in generators]
    for g in gens:
        if sorted(g) != list(ident):
            raise InputError(f"{g} is not a permutation of [{d}]")
    seen = {ident}
    order = [ident]
    queue = deque([ident])
    while queue:
        g = queue.popleft()
        for s in gens:
            h = tuple(s[g[i]] for i in range(d))
            if h not in seen:
                seen.add(h)
                order.append(h)
                queue.append(h)
                if len(seen) > cap:
                    raise InputError(f"group order exceeds cap {cap}")
    return order


def symmetric_group_generators(d: int) -> list[tuple[int, ...]]:
    if d < 2:
        return []
    transposition = (1, 0) + tuple(range(2, d))
    cycle = tuple(range(1, d)) + (0,)
    return [transposition, cycle]


def property_g_sums(Q, perm: Sequence[int]) -> np.ndarray:
    """Matrix of ``sum_j |Q|_{k, perm j} |Q^-1|_{j l}`` indexed by ``(k, l)``."""
    Q = as_matrix(Q)
    A = np.abs(Q)
    B = np.abs(np.linalg.inv(Q))
    return A[:, list(perm)] @ B


def check_property_g(Q, generators: Sequence[Sequence[int]] = (), tol: float = 1e-12) -> PropertyGReport:
    Q = as_matrix(Q)
    if abs(np.linalg.det(Q)) < 1e-12:
        raise InputError("Q is singular")
    d = Q.shape[0]
    group = generate_group(generators, d)
    A = np.abs(Q)
    B = np.abs(np.linalg.inv(Q))
    best, witness = -np.inf, None
    for perm in group:
        sums = A[:, list(perm)] @ B
        k, l = np.unravel_index(np.argmax(sums), sums.shape)
        if sums[k, l] > best:
            best, witness = float(sums[k, l]), (perm, int(k), int(l))
    return PropertyGReport(len(group), best, witness, best <= 1 + tol)


# -- random valid parameters (tests, demos) ------------------------------


def _rand_c(rng, lo=0.5, hi=1.5) -> complex:
    return complex(rng.uniform(lo, hi) * np.exp(1j * rng.uniform(0, 2 * np.pi)))


def _rand_phase(rng) -> complex:
    return complex(np.exp(1j * rng.uniform(0, 2 * np.pi)))


def random_family_params(family: str, rng: np.random.Generator) -> FamilyParams:
    """A random, well-conditioned, valid parameter draw for ``family``."""
    a, b, d = _rand_c(rng), _rand_c(rng), _rand_c(rng)
    k = _rand_phase(rng)
    if family == "r1":
        return FamilyParams("r1", a, b, d, p=_rand_phase(rng), q=_rand_phase(rng), r_phase=_rand_phase(rng), k=k)
    if family == "r2":
        while True:
            c = _rand_c(rng)
            if abs(a * b.conjugate() + c * d.conjugate()) > 0.1:
                return FamilyParams("r2", a, b, d, c=c, k=k)
            a = _rand_c(rng)
    if family == "r3":
        ratio = abs(d) ** 2 / abs(a) ** 2
        return FamilyParams("r3", a, b, d, p=ratio * _rand_phase(rng), q=_rand_phase(rng) / ratio, k=k)
    if family == "r4":
        d = abs(a) * _rand_phase(rng)
        return FamilyParams("r4", a, b, d, k=k)
    raise InputError(f"unknown family {family!r}")
