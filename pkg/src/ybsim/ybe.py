"""Quantum and algebraic Yang-Baxter equation checks."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .linalg import DEFAULT_TOL, as_matrix, frob_dist, is_unitary


@dataclass(frozen=True, eq=False)
class TwoQuditGate:
    """A gate on two qudits of local dimension ``d``.

    ``normal_form`` is set by builders that also know a monomial
    decomposition of the gate (see :mod:`ybsim.solutions`).
    """

    d: int
    matrix: np.ndarray
    normal_form: object = None

    def __post_init__(self):
        m = as_matrix(self.matrix)
        if m.shape != (self.d**2, self.d**2):
            raise InputError(f"two-qudit gate for d={self.d} must be {self.d**2}x{self.d**2}")
        object.__setattr__(self, "matrix", m)

    @property
    def unitary(self) -> bool:
        return is_unitary(self.matrix, 1e-9)


def local_dim(gate) -> int:
    """Infer ``d`` from a ``d^2 x d^2`` matrix."""
    dim = as_matrix(gate).shape[0]
    d = math.isqrt(dim)
    if d * d != dim:
        raise InputError(f"matrix dimension {dim} is not a perfect square")
    return d


def swap_operator(d: int) -> np.ndarray:
    if d < 1:
        raise InputError("d must be >= 1")
    t = np.zeros((d * d, d * d), dtype=complex)
    for a in range(d):
        for b in range(d):
            t[b * d + a, a * d + b] = 1.0
    return t


def qybe_sides(R) -> tuple[np.ndarray, np.ndarray]:
    R = as_matrix(R)
    eye = np.eye(local_dim(R), dtype=complex)
    r12 = np.kron(R, eye)
    r23 = np.kron(eye, R)
    return r12 @ r23 @ r12, r23 @ r12 @ r23


def check_qybe(R, tol: float = DEFAULT_TOL) -> tuple[bool, float]:
    """``(R x I)(I x R)(R x I) == (I x R)(R x I)(I x R)`` within ``tol`` (Frobenius)."""
    lhs, rhs = qybe_sides(R)
    res = frob_dist(lhs, rhs)
    return res <= tol, res


def check_aybe(S, tol: float = DEFAULT_TOL) -> tuple[bool, float]:
    """``S12 S13 S23 == S23 S13 S12`` with ``S13 = (I x T)(S x I)(I x T)``."""
    S = as_matrix(S)
    d = local_dim(S)
    eye = np.eye(d, dtype=complex)
    s12 = np.kron(S, eye)
    s23 = np.kron(eye, S)
    it = np.kron(eye, swap_operator(d))
    s13 = it @ s12 @ it
    res = frob_dist(s12 @ s13 @ s23, s23 @ s13 @ s12)
    return res <= tol, res


def s_from_r(R) -> np.ndarray:
    R = as_matrix(R)
    return R @ swap_operator(local_dim(R))


def r_from_s(S) -> np.ndarray:
    S = as_matrix(S)
    return S @ swap_operator(local_dim(S))
