"""Command-line entry point: ``ybsim gate|braid|simulate|expectation``.

Every command writes one JSON (or ``key: value`` text) document to stdout.
Exit codes: 0 success, 2 input/validation, 3 property (G) refusal,
4 oracle scale cap, 5 gate/algorithm mismatch.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import io
from .braid import braid_to_circuit, parse_braid, parse_circuit
from .clifford import dense_expectation, expectation
from .errors import GateMismatchError, InputError, OracleCapError, PropertyGError, YbsimError
from .linalg import apply_circuit, basis_index, basis_state, check_oracle_scale
from .mc_sim import estimate_amplitude
from .solutions import R4Gate, check_property_g, symmetric_group_generators
from .ybe import check_qybe, local_dim

EXIT_CODES = [(PropertyGError, 3), (OracleCapError, 4), (GateMismatchError, 5), (InputError, 2)]


def _exit_code(exc: Exception) -> int:
    for cls, code in EXIT_CODES:
        if isinstance(exc, cls):
            return code
    return 2


def _emit(doc: dict, fmt: str, out=None) -> None:
    out = out or sys.stdout
    if fmt == "text":
        for key, val in doc.items():
            out.write(f"{key}: {json.dumps(val)}\n")
    else:
        out.write(io.dump_json(doc) + "\n")


def _ditstring(text: str, name: str) -> tuple[int, ...]:
    if not text.isdigit():
        raise InputError(f"{name} must be a plain digit string, got {text!r}")
    return tuple(int(c) for c in text)


def _epsilon(text: str) -> float:
    eps = float(text)
    if not 0 < eps < 1:
        raise argparse.ArgumentTypeError("epsilon must lie in (0, 1)")
    return eps


# -- property (G) reporting ----------------------------------------------


def _group_generators(mode: str, gate, d: int):
    if mode == "trivial":
        return []
    if mode == "full":
        return symmetric_group_generators(d)
    nf = getattr(gate, "normal_form", gate)
    C = tuple(getattr(nf, "C", range(d)))
    return [] if C == tuple(range(d)) else [C]


def _property_g_doc(Q, mode: str, gate, tol: float) -> dict | None:
    if mode == "none" or Q is None:
        return None
    d = Q.shape[0]
    report = check_property_g(Q, _group_generators(mode, gate, d), tol)
    doc = {
        "group": mode,
        "group_order": report.group_order,
        "max_sum": report.max_sum,
        "holds": report.holds,
    }
    if report.witness is not None:
        perm, k, l = report.witness
        doc["witness"] = {"perm": list(perm), "k": k, "l": l}
    return doc


# -- gate ---------------------------------------------------------------


def cmd_gate_build(args) -> dict:
    spec = io.read_json(args.spec)
    gate = io.build_from_spec(spec)
    family = str(spec["family"]).lower()
    m = gate.matrix
    ok, res = check_qybe(m, args.tolerance)
    doc = {
        "family": family,
        "constraints_checked": io.FAMILY_CONSTRAINTS[family],
        "qybe_residual": res,
        "qybe_holds": ok,
        "unitarity_residual": io.unitarity_residual(m),
        "tolerance": args.tolerance,
    }
    pg = _property_g_doc(io.q_of(gate), args.property_g, gate, 1e-12)
    if pg is not None:
        doc["property_g"] = pg
    gate_doc = io.gate_to_dict(gate)
    if args.out:
        Path(args.out).write_text(io.dump_json(gate_doc) + "\n")
        doc["gate_file"] = str(args.out)
    else:
        doc["gate"] = gate_doc
    return doc


def cmd_gate_check(args) -> dict:
    raw = io.read_json(args.file)
    role = raw.get("role")
    if "kind" in raw or role == "gate":
        gate, Q = io.gate_from_dict(raw), None
        Q = io.q_of(gate)
    elif role == "q":
        gate, Q = None, io.decode_matrix(raw["matrix"])
    elif "matrix" in raw:
        m = io.decode_matrix(raw["matrix"])
        root = int(round(np.sqrt(m.shape[0])))
        if root >= 2 and root * root == m.shape[0]:
            gate, Q = io.gate_from_dict({"kind": "matrix", "matrix": raw["matrix"]}), None
        else:
            gate, Q = None, m
    else:
        raise InputError(f"{args.file}: expected a gate document or a matrix file")

    doc: dict = {"tolerance": args.tolerance}
    if gate is not None:
        m = gate.matrix
        ok, res = check_qybe(m, args.tolerance)
        doc.update(role="gate", d=local_dim(m), qybe_holds=ok, qybe_residual=res,
                   unitarity_residual=io.unitarity_residual(m))
    else:
        doc.update(role="q", d=Q.shape[0])
        if Q is not None:
            doc["unitarity_residual"] = io.unitarity_residual(Q)
    doc["unitary"] = doc["unitarity_residual"] <= args.tolerance
    mode = args.property_g
    if mode == "gate" and gate is None:
        mode = "full"
    pg = _property_g_doc(Q, mode, gate, 1e-12)
    if pg is not None:
        doc["property_g"] = pg
    return doc


# -- braid --------------------------------------------------------------


def cmd_braid_parse(args) -> dict:
    word = parse_braid(args.word, args.strands)
    return {
        "n_strands": word.n_strands,
        "letters": [[i, s] for i, s in word.letters],
        "text": word.to_text(),
    }


def cmd_braid_compile(args) -> dict:
    word = parse_braid(args.word, args.strands)
    circuit = braid_to_circuit(word, args.gate_id, args.d)
    return {"n_wires": circuit.n_wires, "d": circuit.d, "circuit": circuit.to_text()}


# -- simulation ---------------------------------------------------------


def _registry(specs: list[str]) -> dict:
    if not specs:
        raise InputError("at least one --gate [ID=]PATH is required")
    reg = {}
    for s in specs:
        gid, sep, path = s.partition("=")
        if not sep:
            gid, path = "R", s
        reg[gid] = io.load_gate(path)
    return reg


def _circuit(args, d: int):
    if args.circuit:
        try:
            text = Path(args.circuit).read_text()
        except FileNotFoundError:
            raise InputError(f"no such file: {args.circuit}") from None
        return parse_circuit(text, d=d)
    if args.braid is None:
        raise InputError("give --braid WORD or --circuit FILE")
    word = parse_braid(args.braid, args.strands)
    return braid_to_circuit(word, args.gate_id, d)


def cmd_simulate(args) -> dict:
    reg = _registry(args.gate)
    d = local_dim(next(iter(reg.values())).matrix)
    circuit = _circuit(args, d)
    x = _ditstring(args.x, "x")
    z = _ditstring(args.z, "z")
    start = time.perf_counter()
    if args.exact:
        check_oracle_scale(circuit.n_wires, circuit.d)
        if len(x) != circuit.n_wires or len(z) != circuit.n_wires:
            raise InputError(f"x and z must have {circuit.n_wires} dits")
        out = apply_circuit(basis_state(z, d), circuit, reg)
        value = complex(out[basis_index(x, d)])
        doc = {"value": io.encode_complex(value), "method": "exact", "n_wires": circuit.n_wires, "d": d}
    else:
        est = estimate_amplitude(circuit, reg, x, z, args.epsilon, seed=args.seed,
                                 n_samples=args.samples, threads=args.threads)
        doc = est.to_dict()
        doc["method"] = "monte_carlo"
    doc["wall_time_ms"] = (time.perf_counter() - start) * 1e3 if args.timing else None
    return doc


def cmd_expectation(args) -> dict:
    reg = _registry(args.gate)
    if not all(isinstance(g, R4Gate) for g in reg.values()):
        raise GateMismatchError("expectation requires family-four gates")
    circuit = _circuit(args, 2)
    M = io.load_observable(io.read_json(args.observable))
    if args.states:
        psi, phi = io.load_states(io.read_json(args.states))
    else:
        from .clifford import ProductState
        psi = phi = ProductState.zeros(circuit.n_wires)
    if args.exact:
        check_oracle_scale(circuit.n_wires, 2)
        value = dense_expectation(circuit, reg, M, psi, phi)
        method = "exact"
    else:
        value = expectation(circuit, reg, M, psi, phi)
        method = "clifford"
    return {"value": io.encode_complex(value), "method": method, "n_wires": circuit.n_wires}


# -- parser -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", choices=["json", "text"], default="json")
    common.add_argument("--tolerance", type=float, default=1e-9)

    p = argparse.ArgumentParser(prog="ybsim", description="Yang-Baxter gate construction and circuit simulation")
    sub = p.add_subparsers(dest="command", required=True)

    gate = sub.add_parser("gate", help="build or check gates")
    gsub = gate.add_subparsers(dest="gate_command", required=True)
    gb = gsub.add_parser("build", parents=[common], help="build a gate from a spec document")
    gb.add_argument("spec")
    gb.add_argument("-o", "--out", help="write the gate document here")
    gb.add_argument("--property-g", choices=["none", "trivial", "gate", "full"], default="gate")
    gb.set_defaults(func=cmd_gate_build)
    gc = gsub.add_parser("check", parents=[common], help="check a gate or matrix file")
    gc.add_argument("file")
    gc.add_argument("--property-g", choices=["none", "trivial", "gate", "full"], default="gate")
    gc.set_defaults(func=cmd_gate_check)

    braid = sub.add_parser("braid", help="parse or compile braid words")
    bsub = braid.add_subparsers(dest="braid_command", required=True)
    for name, func in (("parse", cmd_braid_parse), ("compile", cmd_braid_compile)):
        bp = bsub.add_parser(name, parents=[common])
        bp.add_argument("word")
        bp.add_argument("--strands", type=int)
        if name == "compile":
            bp.add_argument("--gate-id", default="R")
            bp.add_argument("--d", type=int, default=2)
        bp.set_defaults(func=func)

    def circuit_args(sp):
        sp.add_argument("--gate", action="append", default=[], metavar="[ID=]PATH")
        sp.add_argument("--braid", help="braid word compiled with --gate-id")
        sp.add_argument("--circuit", help="line-oriented circuit file")
        sp.add_argument("--strands", type=int)
        sp.add_argument("--gate-id", default="R")
        sp.add_argument("--exact", action="store_true", help="use the dense oracle")
        sp.add_argument("--threads", type=int, default=1)

    sim = sub.add_parser("simulate", parents=[common], help="estimate <x|U|z>")
    circuit_args(sim)
    sim.add_argument("--x", required=True)
    sim.add_argument("--z", required=True)
    sim.add_argument("--epsilon", type=_epsilon, default=0.1)
    sim.add_argument("--samples", type=int)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--timing", action="store_true", help="report wall_time_ms (output no longer reproducible)")
    sim.set_defaults(func=cmd_simulate)

    ex = sub.add_parser("expectation", parents=[common], help="exact <psi|U^dag (M x I) U|phi> for family-four circuits")
    circuit_args(ex)
    ex.add_argument("--observable", required=True)
    ex.add_argument("--states")
    ex.set_defaults(func=cmd_expectation)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        doc = args.func(args)
    except YbsimError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return _exit_code(exc)
    except (KeyError, ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    _emit(doc, args.output)
    return 0


if __name__ == "__main__":
    sys.exit(main())
