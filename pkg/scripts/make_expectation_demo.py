"""Regenerate data/expectation_demo with its dense-oracle reference value."""

from pathlib import Path

import numpy as np

from ybsim import io
from ybsim.braid import Circuit, Op
from ybsim.clifford import Observable, ProductState, dense_expectation
from ybsim.linalg import random_unitary

OUT = Path(__file__).resolve().parent.parent / "data" / "expectation_demo"


def main():
    rng = np.random.default_rng(20240611)
    OUT.mkdir(parents=True, exist_ok=True)
    spec = {"family": "r4", "a": [0.9, 0.3], "b": [-0.4, 0.7], "d_entry": [0.6, -0.7348469228349535],
            "k": [0.6, 0.8]}
    gate = io.build_from_spec(spec)
    n = 6
    ops = []
    for _ in range(12):
        w = int(rng.integers(0, n - 1))
        ops.append(Op("R", (w, w + 1), bool(rng.integers(0, 2))))
    circuit = Circuit(n, 2, tuple(ops))
    h = random_unitary(4, rng)
    M = Observable((4, 1), (h + h.conj().T) / 2)
    amps = rng.normal(size=(2, n, 2)) + 1j * rng.normal(size=(2, n, 2))
    amps /= np.linalg.norm(amps, axis=2, keepdims=True)
    psi, phi = ProductState(amps[0]), ProductState(amps[1])
    value = dense_expectation(circuit, {"R": gate}, M, psi, phi)

    (OUT / "spec.json").write_text(io.dump_json(spec) + "\n")
    (OUT / "gate.json").write_text(io.dump_json(io.gate_to_dict(gate)) + "\n")
    (OUT / "circuit.txt").write_text(circuit.to_text())
    (OUT / "observable.json").write_text(io.dump_json(io.observable_to_dict(M)) + "\n")
    (OUT / "states.json").write_text(io.dump_json(io.states_to_dict(psi, phi)) + "\n")
    (OUT / "expected.json").write_text(io.dump_json({"value": io.encode_complex(value), "tolerance": 1e-9}) + "\n")


if __name__ == "__main__":
    main()
