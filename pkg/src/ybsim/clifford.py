"""Exact expectation values for family-four circuits via Pauli conjugation.

A family-four gate is ``(Q1 x Q1) S4T (Q1 x Q1)^dagger`` (times a global
phase) with ``Q1`` unitary and ``S4T`` Clifford, so an ``{R4}``-circuit is
``Q1^{x n} V Q1^{dagger x n}`` with ``V`` Clifford. Expanding the rotated
observable in Paulis and pushing each Pauli through ``V`` leaves a sum of
products of single-qubit matrix elements.

Paulis are stored as ``i**phase * prod_j X_j**x_j Z_j**z_j`` (X before Z on
every qubit); in this ordering CNOT conjugation never touches the phase.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping, Sequence

import numpy as np

from .errors import GateMismatchError, InputError
from .linalg import apply_circuit, apply_gate, as_matrix, is_hermitian, kron_all

MAX_OBSERVABLE_QUBITS = 12

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.diag([1, -1]).astype(complex)
_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_P = np.diag([1, 1j])
_CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)

GATE_MATRICES = {"H": _H, "P": _P, "X": _X, "Y": _Y, "Z": _Z, "CNOT": _CNOT}
_PAULI_BASIS = np.stack([_I2, _X, _Y, _Z])  # I, X, Y, Z
_LABELS = "IXYZ"


@dataclass(frozen=True, eq=False)
class PauliElement:
    phase: int
    x: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=bool)
        z = np.asarray(self.z, dtype=bool)
        if x.shape != z.shape or x.ndim != 1:
            raise InputError("x and z bit vectors must be 1-d and equally long")
        object.__setattr__(self, "phase", int(self.phase) % 4)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "z", z)

    @property
    def n(self) -> int:
        return len(self.x)

    @classmethod
    def from_label(cls, label: str, phase: int = 0) -> "PauliElement":
        """``"XIYZ"`` style label (Hermitian Paulis); ``phase`` is an extra ``i**phase``."""
        x = np.array([c in "XY" for c in label])
        z = np.array([c in "YZ" for c in label])
        # Y = i X Z
        return cls(phase + label.count("Y"), x, z)

    def label(self) -> str:
        chars = "".join("IXZY"[int(a) + 2 * int(b)] for a, b in zip(self.x, self.z))
        # each Y already carries one factor of i
        ph = (self.phase - chars.count("Y")) % 4
        return ["+", "+i", "-", "-i"][ph] + chars

    def matrix(self) -> np.ndarray:
        facs = [np.linalg.matrix_power(_X, int(a)) @ np.linalg.matrix_power(_Z, int(b)) for a, b in zip(self.x, self.z)]
        return (1j**self.phase) * kron_all(facs)

    def __eq__(self, other) -> bool:
        return (isinstance(other, PauliElement) and self.phase == other.phase
                and np.array_equal(self.x, other.x) and np.array_equal(self.z, other.z))

    def __repr__(self) -> str:
        return f"PauliElement({self.label()!r})"


@dataclass(frozen=True)
class CliffordCircuit:
    n: int
    gates: tuple[tuple[str, tuple[int, ...]], ...] = ()

    def __post_init__(self):
        gates = []
        for kind, wires in self.gates:
            wires = tuple(int(w) for w in wires)
            arity = 2 if kind == "CNOT" else 1
            if kind not in GATE_MATRICES:
                raise InputError(f"unknown Clifford gate {kind!r}")
            if len(wires) != arity or len(set(wires)) != arity or any(not 0 <= w < self.n for w in wires):
                raise InputError(f"bad wires {wires} for {kind} on {self.n} qubits")
            gates.append((kind, wires))
        object.__setattr__(self, "gates", tuple(gates))

    def inverse(self) -> "CliffordCircuit":
        out = []
        for kind, wires in reversed(self.gates):
            out.extend([(kind, wires)] * (3 if kind == "P" else 1))
        return CliffordCircuit(self.n, tuple(out))

    def on_wires(self, wires: Sequence[int], n: int) -> "CliffordCircuit":
        """Relabel local wire ``i`` to ``wires[i]`` inside an ``n``-qubit register."""
        return CliffordCircuit(n, tuple((k, tuple(wires[w] for w in ws)) for k, ws in self.gates))

    def __add__(self, other: "CliffordCircuit") -> "CliffordCircuit":
        if self.n != other.n:
            raise InputError("qubit counts differ")
        return CliffordCircuit(self.n, self.gates + other.gates)

    def dense(self) -> np.ndarray:
        u = np.eye(2**self.n, dtype=complex)
        for kind, wires in self.gates:
            u = apply_gate(u, GATE_MATRICES[kind], wires, self.n, 2)
        return u


def s4t_clifford() -> CliffordCircuit:
    """Clifford circuit equal (entrywise, no phase) to the ``S4T`` matrix.

    Layers: Z on both wires, CNOT 0->1, X on 0 and Z on 1, H on 0, then a
    closing CNOT 0->1.
    """
    return CliffordCircuit(2, (
        ("Z", (0,)), ("Z", (1,)),
        ("CNOT", (0, 1)),
        ("X", (0,)), ("Z", (1,)),
        ("H", (0,)),
        ("CNOT", (0, 1)),
    ))


# -- conjugation ---------------------------------------------------------


def _conjugate_batch(circuit: CliffordCircuit, phase: np.ndarray, xs: np.ndarray, zs: np.ndarray) -> None:
    """In place ``sigma -> V^dagger sigma V`` for every row."""
    for kind, wires in reversed(circuit.gates):
        if kind == "CNOT":
            c, t = wires
            xs[:, t] ^= xs[:, c]
            zs[:, c] ^= zs[:, t]
            continue
        (w,) = wires
        x, z = xs[:, w], zs[:, w]
        if kind == "H":
            phase += 2 * (x & z)
            xs[:, w], zs[:, w] = z.copy(), x.copy()
        elif kind == "P":
            # P^dagger X P = -Y = -i X Z
            phase += 3 * x
            zs[:, w] ^= x
        elif kind == "X":
            phase += 2 * z
        elif kind == "Z":
            phase += 2 * x
        elif kind == "Y":
            phase += 2 * (x ^ z)
    phase %= 4


def conjugate_pauli(circuit: CliffordCircuit, sigma: PauliElement) -> PauliElement:
    """``V^dagger sigma V`` where ``V`` is the circuit's unitary."""
    if sigma.n != circuit.n:
        raise InputError("Pauli and circuit sizes differ")
    phase = np.array([sigma.phase], dtype=np.int64)
    xs, zs = sigma.x[None, :].copy(), sigma.z[None, :].copy()
    _conjugate_batch(circuit, phase, xs, zs)
    return PauliElement(int(phase[0]), xs[0], zs[0])


# -- observables and states ----------------------------------------------


@dataclass(frozen=True, eq=False)
class Observable:
    wires: tuple[int, ...]
    matrix: np.ndarray

    def __post_init__(self):
        wires = tuple(int(w) for w in self.wires)
        m = len(wires)
        if len(set(wires)) != m or m == 0:
            raise InputError("observable wires must be distinct and non-empty")
        if m > MAX_OBSERVABLE_QUBITS:
            raise InputError(f"observable acts on {m} qubits; cap is {MAX_OBSERVABLE_QUBITS}")
        mat = as_matrix(self.matrix)
        if mat.shape != (2**m, 2**m):
            raise InputError(f"observable on {m} wires must be {2**m}x{2**m}")
        if not is_hermitian(mat):
            raise InputError("observable is not Hermitian")
        object.__setattr__(self, "wires", wires)
        object.__setattr__(self, "matrix", mat)

    @property
    def m(self) -> int:
        return len(self.wires)


@dataclass(frozen=True, eq=False)
class ProductState:
    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex)
        if a.ndim != 2 or a.shape[1] != 2:
            raise InputError("product state must be an (n, 2) array of amplitude pairs")
        if np.any(np.linalg.norm(a, axis=1) == 0):
            raise InputError("every qubit factor must be nonzero")
        object.__setattr__(self, "amplitudes", a)

    @property
    def n(self) -> int:
        return self.amplitudes.shape[0]

    def vector(self) -> np.ndarray:
        v = np.ones(1, dtype=complex)
        for a in self.amplitudes:
            v = np.kron(v, a)
        return v

    @classmethod
    def zeros(cls, n: int) -> "ProductState":
        return cls(np.tile([1.0, 0.0], (n, 1)))


def pauli_coefficients(matrix) -> np.ndarray:
    """``alpha[p_1, ..., p_m] = Tr(sigma_p M) / 2^m`` over ``{I, X, Y, Z}^m``."""
    M = as_matrix(matrix)
    m = int(np.log2(M.shape[0]))
    t = M.reshape((2,) * (2 * m))
    # interleave (row_j, col_j) pairs, then contract each pair with the basis
    t = t.transpose([i for j in range(m) for i in (j, m + j)])
    for j in range(m):
        t = np.tensordot(_PAULI_BASIS.conj(), t, axes=([1, 2], [j, j + 1]))
        t = np.moveaxis(t, 0, j)
    return t / 2**m


def pauli_expand(M: Observable) -> list[tuple[PauliElement, float]]:
    coeffs = pauli_coefficients(M.matrix)
    if np.max(np.abs(coeffs.imag), initial=0.0) > 1e-10:
        raise InputError("observable is not Hermitian")
    out = []
    for idx in np.ndindex(coeffs.shape):
        c = float(coeffs[idx].real)
        if c != 0.0:
            out.append((PauliElement.from_label("".join(_LABELS[i] for i in idx)), c))
    return out


# -- expectation ---------------------------------------------------------


def _r4_gates(circuit, registry: Mapping[str, Any]) -> np.ndarray:
    Q1 = None
    for gid in sorted(circuit.gate_ids()):
        g = registry.get(gid)
        if g is None:
            raise GateMismatchError(f"unknown gate id {gid!r}")
        if getattr(g, "inner_clifford", None) != "S4T":
            raise GateMismatchError("expectation requires family-four gates")
        if Q1 is None:
            Q1 = g.Q1
        elif np.linalg.norm(g.Q1 - Q1) > 1e-12:
            raise GateMismatchError("mixed Q across gates: all family-four gates must share one Q1")
    return np.eye(2, dtype=complex) if Q1 is None else np.asarray(Q1)


def clifford_of(circuit) -> CliffordCircuit:
    """The Clifford circuit ``V`` of an ``{R4}``-circuit (global phases dropped)."""
    base = s4t_clifford()
    inv = base.inverse()
    v = CliffordCircuit(circuit.n_wires)
    for op in circuit.ops:
        v = v + (inv if op.inverse else base).on_wires(op.wires, circuit.n_wires)
    return v


def expectation(circuit, registry: Mapping[str, Any], M: Observable, psi: ProductState, phi: ProductState) -> complex:
    """Exact ``<psi| U^dagger (M x I) U |phi>`` for a circuit of family-four gates."""
    n = circuit.n_wires
    if circuit.d != 2:
        raise GateMismatchError("expectation works on qubits only")
    if psi.n != n or phi.n != n:
        raise InputError(f"product states must have {n} qubits")
    if max(M.wires) >= n:
        raise InputError("observable wire out of range")
    Q1 = _r4_gates(circuit, registry)
    V = clifford_of(circuit)

    # U^dagger M U = Q1 V^dagger (Q1^dagger M Q1) V Q1^dagger
    qm = kron_all([Q1] * M.m)
    rotated = qm.conj().T @ M.matrix @ qm
    coeffs = pauli_coefficients(rotated)
    if np.max(np.abs(coeffs.imag)) > 1e-10:
        raise InputError("observable is not Hermitian")
    coeffs = coeffs.real
    cutoff = 1e-15 * max(1.0, float(np.max(np.abs(coeffs))))
    idx = np.argwhere(np.abs(coeffs) > cutoff)
    if len(idx) == 0:
        return 0j
    alpha = coeffs[tuple(idx.T)]
    T = len(idx)
    xs = np.zeros((T, n), dtype=bool)
    zs = np.zeros((T, n), dtype=bool)
    wires = list(M.wires)
    xs[:, wires] = (idx == 1) | (idx == 2)
    zs[:, wires] = (idx == 2) | (idx == 3)
    phase = np.sum(idx == 2, axis=1).astype(np.int64)

    _conjugate_batch(V, phase, xs, zs)

    # table[j, a, b] = <psi_j| Q1 X^a Z^b Q1^dagger |phi_j>
    left = psi.amplitudes.conj() @ Q1
    right = phi.amplitudes @ Q1.conj()  # rows are (Q1^dagger phi_j)^T
    table = np.empty((n, 2, 2), dtype=complex)
    for a in range(2):
        for b in range(2):
            op = np.linalg.matrix_power(_X, a) @ np.linalg.matrix_power(_Z, b)
            table[:, a, b] = np.einsum("jr,rc,jc->j", left, op, right)
    vals = table[np.arange(n), xs.astype(int), zs.astype(int)]
    terms = (1j ** phase) * np.prod(vals, axis=1)
    return complex(np.sum(alpha * terms))


def dense_expectation(circuit, registry: Mapping[str, Any], M: Observable, psi: ProductState, phi: ProductState) -> complex:
    """Brute-force ``<psi| U^dagger (M x I) U |phi>`` on full state vectors."""
    n = circuit.n_wires
    u_phi = apply_circuit(phi.vector(), circuit, registry)
    u_psi = apply_circuit(psi.vector(), circuit, registry)
    m_u_phi = apply_gate(u_phi, M.matrix, M.wires, n, 2)
    return complex(np.vdot(u_psi, m_u_phi))
