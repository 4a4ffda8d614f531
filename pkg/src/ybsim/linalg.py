"""Dense complex linear algebra at oracle scale.

Index convention is big-endian throughout the package: wire 0 is the most
significant dit, so ``|x_0 x_1 ... x_{n-1}>`` has index
``sum_j x_j * d**(n-1-j)``.
"""

from __future__ import annotations

from typing import Any, Mapping, Sequence

import numpy as np

from .errors import GateMismatchError, InputError, OracleCapError

ORACLE_CAP = 4096
DEFAULT_TOL = 1e-10


def as_matrix(obj: Any) -> np.ndarray:
    """Return the complex matrix behind a gate-like object."""
    m = getattr(obj, "matrix", obj)
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InputError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InputError("matrix has non-finite entries")
    return m


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def kron_all(mats: Sequence) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for m in mats:
        out = np.kron(out, as_matrix(m))
    return out


def check_oracle_scale(n: int, d: int) -> None:
    if d**n > ORACLE_CAP:
        raise OracleCapError(f"oracle cap exceeded: d^n = {d}^{n} > {ORACLE_CAP}")


def _check_wires(wires: Sequence[int], n: int) -> tuple[int, ...]:
    wires = tuple(int(w) for w in wires)
    if len(set(wires)) != len(wires):
        raise InputError(f"wires must be distinct, got {wires}")
    for w in wires:
        if not 0 <= w < n:
            raise InputError(f"wire {w} out of range for {n} wires")
    return wires


def apply_gate(state: np.ndarray, gate, wires: Sequence[int], n: int, d: int) -> np.ndarray:
    """Apply ``gate`` to the listed wires of ``state``.

    ``state`` has leading dimension ``d**n``; any trailing dimensions are
    treated as a batch (so passing the identity computes the embedded gate).
    """
    g = as_matrix(gate)
    wires = _check_wires(wires, n)
    k = len(wires)
    if g.shape[0] != d**k:
        raise InputError(f"gate dimension {g.shape[0]} does not match d^{k} = {d**k}")
    state = np.asarray(state, dtype=complex)
    batch = state.shape[1:]
    t = state.reshape((d,) * n + batch)
    t = np.moveaxis(t, wires, range(k))
    rest = t.shape[k:]
    t = (g @ t.reshape(d**k, -1)).reshape((d,) * k + rest)
    t = np.moveaxis(t, range(k), wires)
    return t.reshape((d**n,) + batch)


def embed_gate(gate, wires: Sequence[int], n: int, d: int) -> np.ndarray:
    """Full ``d**n`` matrix of ``gate`` acting on ``wires`` (in that order)."""
    check_oracle_scale(n, d)
    return apply_gate(np.eye(d**n, dtype=complex), gate, wires, n, d)


def _resolve(registry: Mapping[str, Any], gate_id: str) -> np.ndarray:
    try:
        obj = registry[gate_id]
    except KeyError:
        raise GateMismatchError(f"unknown gate id {gate_id!r}") from None
    return as_matrix(obj)


def apply_circuit(state: np.ndarray, circuit, registry: Mapping[str, Any]) -> np.ndarray:
    """Apply every op of ``circuit`` to ``state`` in sequence order.

    Inverse-flagged ops use the exact matrix inverse (the conjugate
    transpose when the gate is unitary).
    """
    n, d = circuit.n_wires, circuit.d
    cache: dict[tuple[str, bool], np.ndarray] = {}
    for op in circuit.ops:
        key = (op.gate_id, op.inverse)
        if key not in cache:
            g = _resolve(registry, op.gate_id)
            if op.inverse:
                g = g.conj().T if is_unitary(g) else np.linalg.inv(g)
            cache[key] = g
        state = apply_gate(state, cache[key], op.wires, n, d)
    return state


def dense_circuit(circuit, registry: Mapping[str, Any]) -> np.ndarray:
    """Exact matrix ``U_m ... U_1`` of a circuit (oracle scale only)."""
    check_oracle_scale(circuit.n_wires, circuit.d)
    dim = circuit.d**circuit.n_wires
    return apply_circuit(np.eye(dim, dtype=complex), circuit, registry)


def basis_state(digits: Sequence[int], d: int) -> np.ndarray:
    idx = 0
    for x in digits:
        if not 0 <= x < d:
            raise InputError(f"dit {x} out of range for d={d}")
        idx = idx * d + int(x)
    v = np.zeros(d ** len(digits), dtype=complex)
    v[idx] = 1.0
    return v


def basis_index(digits: Sequence[int], d: int) -> int:
    idx = 0
    for x in digits:
        idx = idx * d + int(x)
    return idx


def frob_dist(a, b) -> float:
    """Frobenius (Euclidean for vectors) norm of ``a - b``."""
    a = np.asarray(getattr(a, "matrix", a), dtype=complex)
    b = np.asarray(getattr(b, "matrix", b), dtype=complex)
    if a.shape != b.shape:
        raise InputError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))


def is_unitary(m, tol: float = DEFAULT_TOL) -> bool:
    m = as_matrix(m)
    return frob_dist(m.conj().T @ m, np.eye(m.shape[0])) <= tol


def is_hermitian(m, tol: float = DEFAULT_TOL) -> bool:
    m = as_matrix(m)
    return frob_dist(m, m.conj().T) <= tol


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR with phase correction."""
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * ph
