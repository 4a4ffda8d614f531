import numpy as np
import pytest

from ybsim.solutions import build_family, random_family_params

X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1, -1]).astype(complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
S4T_PRINTED = np.array([[1, 0, 0, 1], [0, 1, 1, 0], [0, -1, 1, 0], [-1, 0, 0, 1]], dtype=complex) / np.sqrt(2)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_gate(family, rng):
    return build_family(random_family_params(family, rng))


def brute_embed(gate, wires, n, d):
    """Embed ``gate`` by enumerating basis states (independent of apply_gate)."""
    dim = d**n
    out = np.zeros((dim, dim), dtype=complex)
    k = len(wires)
    for col in range(dim):
        digits = [(col // d ** (n - 1 - j)) % d for j in range(n)]
        local_in = 0
        for w in wires:
            local_in = local_in * d + digits[w]
        for local_out in range(d**k):
            amp = gate[local_out, local_in]
            if amp == 0:
                continue
            new = list(digits)
            for pos, w in enumerate(wires):
                new[w] = (local_out // d ** (k - 1 - pos)) % d
            row = sum(v * d ** (n - 1 - j) for j, v in enumerate(new))
            out[row, col] += amp
    return out


def random_normal_form(d, rng, Q=None):
    """A monomial-form gate with random phases, swap flag and permutation."""
    from ybsim.solutions import YbNormalForm

    if Q is None:
        from ybsim.linalg import random_unitary

        Q = random_unitary(d, rng)
    D = np.exp(2j * np.pi * rng.random(d * d))
    return YbNormalForm(d, 1.0, Q, D, bool(rng.integers(2)), tuple(rng.permutation(d)))


def random_circuit(n, d, n_gates, rng, gate_ids=("R",), allow_inverse=True, adjacent=False):
    from ybsim.braid import Circuit, Op

    ops = []
    for _ in range(n_gates):
        if adjacent:
            w = int(rng.integers(0, n - 1))
            wires = (w, w + 1)
        else:
            wires = tuple(int(v) for v in rng.permutation(n)[:2])
        inv = bool(allow_inverse and rng.integers(2))
        ops.append(Op(str(rng.choice(gate_ids)), wires, inv))
    return Circuit(n, d, tuple(ops))


def oracle_amplitude(circuit, registry, x, z):
    from ybsim.linalg import apply_circuit, basis_index, basis_state

    out = apply_circuit(basis_state(z, circuit.d), circuit, registry)
    return complex(out[basis_index(x, circuit.d)])


# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
