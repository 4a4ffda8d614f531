"""JSON document formats for gate specs, gate files, observables and states.

Complex numbers are encoded as two-element ``[re, im]`` arrays; a bare real
number is accepted on input.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .clifford import Observable, ProductState
from .errors import InputError
from .linalg import as_matrix, frob_dist, is_unitary
from .solutions import (
    FamilyParams,
    R4Gate,
    YbNormalForm,
    build_commuting_swap_solution,
    build_diagonal_solution,
    build_family,
    family_q,
)
from .ybe import TwoQuditGate, local_dim

FAMILY_CONSTRAINTS = {
    "r1": ["k-modulus", "unit-phase(p,q,r_phase)", "c=-a*conj(b)/conj(d_entry)", "Q-invertible"],
    "r2": ["k-modulus", "Q-invertible", "degenerate denominator", "M x M = S2", "Q M Q^-1 unitary"],
    "r3": ["k-modulus", "a,d_entry nonzero", "p-modulus", "q-modulus", "pq-modulus",
           "c=-a*conj(b)/conj(d_entry)", "rescaled p = 1"],
    "r4": ["k-modulus", "ad-modulus", "c=-a*conj(b)/conj(d_entry)", "Q/alpha unitary"],
    "diag": ["unit-phase(lambdas)"],
    "commuting": ["A,B unitary", "[A,B] = 0"],
}


def encode_complex(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def decode_complex(v: Any) -> complex:
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(isinstance(t, (int, float)) for t in v):
        return complex(v[0], v[1])
    raise InputError(f"cannot read complex number from {v!r}; expected [re, im]")


def encode_array(a) -> list:
    a = np.asarray(a, dtype=complex)
    if a.ndim == 0:
        return encode_complex(a)
    return [encode_array(row) for row in a]


def decode_array(v: Any, ndim: int) -> np.ndarray:
    if ndim == 0:
        return np.asarray(decode_complex(v))
    if not isinstance(v, (list, tuple)):
        raise InputError(f"expected a {ndim}-d array of complex numbers")
    return np.array([decode_array(row, ndim - 1) for row in v], dtype=complex)


def decode_matrix(v: Any) -> np.ndarray:
    m = decode_array(v, 2)
    return as_matrix(m)


def read_json(path: str | Path) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise InputError(f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(doc, dict):
        raise InputError(f"{path}: expected a JSON object")
    return doc


def dump_json(doc: Any) -> str:
    return json.dumps(doc, indent=2)


# -- gate specs ----------------------------------------------------------


def params_from_spec(spec: dict) -> FamilyParams:
    family = str(spec.get("family", "")).lower()
    kw: dict[str, Any] = {}
    for name in ("a", "b", "c", "d_entry", "p", "q", "r_phase", "k"):
        if name in spec:
            kw[name] = decode_complex(spec[name])
    if "c" in kw and family != "r2":
        raise InputError(f"family {family} derives c; do not pass it")
    try:
        return FamilyParams(family, **kw)
    except TypeError as exc:
        raise InputError(str(exc)) from None


def build_from_spec(spec: dict):
    """Build the gate described by a spec document."""
    family = str(spec.get("family", "")).lower()
    if family == "diag":
        return build_diagonal_solution(decode_array(spec["lambdas"], 2))
    if family == "commuting":
        tol = float(spec.get("tolerance", 1e-9))
        return build_commuting_swap_solution(decode_matrix(spec["A"]), decode_matrix(spec["B"]), tol)
    if family not in ("r1", "r2", "r3", "r4"):
        raise InputError(f"unknown family {family!r}; expected r1|r2|r3|r4|diag|commuting")
    return build_family(params_from_spec(spec))


# -- gate files ----------------------------------------------------------


def gate_to_dict(gate) -> dict:
    if isinstance(gate, R4Gate):
        return {
            "kind": "r4",
            "family": "r4",
            "d": 2,
            "k": encode_complex(gate.k),
            "Q": encode_array(gate.Q),
            "Q1": encode_array(gate.Q1),
            "inner_clifford": gate.inner_clifford,
            "matrix": encode_array(gate.matrix),
        }
    nf = gate if isinstance(gate, YbNormalForm) else getattr(gate, "normal_form", None)
    if isinstance(nf, YbNormalForm):
        return {
            "kind": "normal_form",
            "family": nf.family,
            "d": nf.d,
            "k": encode_complex(nf.k),
            "Q": encode_array(nf.Q),
            "D": encode_array(nf.D),
            "swap": bool(nf.swap),
            "C": list(nf.C),
            "matrix": encode_array(getattr(gate, "matrix", nf.matrix)),
        }
    m = as_matrix(gate)
    return {"kind": "matrix", "d": local_dim(m), "matrix": encode_array(m)}


def gate_from_dict(doc: dict):
    kind = doc.get("kind")
    if kind is None and "matrix" in doc:
        kind = "matrix"
    try:
        if kind == "r4":
            m = decode_matrix(doc["matrix"])
            return R4Gate(decode_complex(doc["k"]), decode_matrix(doc["Q1"]), m, decode_matrix(doc["Q"]))
        if kind == "normal_form":
            d = int(doc["d"])
            D = decode_array(doc["D"], 1)
            # renormalize phases that lost precision in the decimal round trip
            D = D / np.abs(D)
            return YbNormalForm(d, decode_complex(doc["k"]), decode_matrix(doc["Q"]), D,
                                bool(doc["swap"]), tuple(doc["C"]), family=str(doc.get("family", "")))
        if kind == "matrix":
            m = decode_matrix(doc["matrix"])
            return TwoQuditGate(local_dim(m), m)
    except KeyError as exc:
        raise InputError(f"gate document missing field {exc}") from None
    raise InputError(f"unknown gate kind {kind!r}")


def load_gate(path: str | Path):
    return gate_from_dict(read_json(path))


def q_of(gate) -> np.ndarray | None:
    if isinstance(gate, R4Gate):
        return gate.Q1
    nf = gate if isinstance(gate, YbNormalForm) else getattr(gate, "normal_form", None)
    return nf.Q if isinstance(nf, YbNormalForm) else None


# -- observables and states ---------------------------------------------


def load_observable(doc: dict) -> Observable:
    try:
        return Observable(tuple(int(w) for w in doc["wires"]), decode_matrix(doc["matrix"]))
    except KeyError as exc:
        raise InputError(f"observable document missing field {exc}") from None


def load_states(doc: dict) -> tuple[ProductState, ProductState]:
    if "psi" not in doc:
        raise InputError("states document needs 'psi' (and optionally 'phi')")
    psi = ProductState(decode_array(doc["psi"], 2))
    phi = ProductState(decode_array(doc.get("phi", doc["psi"]), 2))
    return psi, phi


def observable_to_dict(M: Observable) -> dict:
    return {"wires": list(M.wires), "matrix": encode_array(M.matrix)}


def states_to_dict(psi: ProductState, phi: ProductState) -> dict:
    return {"psi": encode_array(psi.amplitudes), "phi": encode_array(phi.amplitudes)}


def unitarity_residual(m) -> float:
    m = as_matrix(m)
    return frob_dist(m.conj().T @ m, np.eye(m.shape[0]))


__all__ = [
    "FAMILY_CONSTRAINTS", "build_from_spec", "decode_array", "decode_complex", "decode_matrix",
    "dump_json", "encode_array", "encode_complex", "family_q", "gate_from_dict", "gate_to_dict",
    "is_unitary", "load_gate", "load_observable", "load_states", "observable_to_dict",
    "params_from_spec", "q_of", "read_json", "states_to_dict", "unitarity_residual",
]
