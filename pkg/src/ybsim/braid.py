"""Braid words, circuits, and the braid-to-circuit compiler.

Braid generators are 1-indexed (``s1 .. s{n-1}``) while circuit wires are
0-indexed; ``s_i`` acts on wires ``(i-1, i)``. Circuits are applied in
sequence order, so the composed operator is ``U_m ... U_1``.

Braid word grammar::

    word := ["n=" N] term (whitespace term)*
    term := "s" INDEX ["^-1"]
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .errors import BraidParseError, InputError
from .linalg import DEFAULT_TOL, as_matrix, check_oracle_scale, embed_gate, frob_dist
from .ybe import local_dim

_TERM = re.compile(r"s(\d+)(\^-1)?")
_DECL = re.compile(r"n=(\d+)")


@dataclass(frozen=True)
class BraidWord:
    n_strands: int
    letters: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.n_strands < 2:
            raise InputError("a braid needs at least 2 strands")
        letters = tuple((int(i), int(s)) for i, s in self.letters)
        for i, s in letters:
            if not 1 <= i < self.n_strands:
                raise InputError(f"generator index {i} out of range for {self.n_strands} strands")
            if s not in (1, -1):
                raise InputError(f"sign must be +1 or -1, got {s}")
        object.__setattr__(self, "letters", letters)

    def inverse(self) -> "BraidWord":
        return BraidWord(self.n_strands, tuple((i, -s) for i, s in reversed(self.letters)))

    def __mul__(self, other: "BraidWord") -> "BraidWord":
        n = max(self.n_strands, other.n_strands)
        return BraidWord(n, self.letters + other.letters)

    def to_text(self) -> str:
        terms = [f"s{i}" + ("^-1" if s < 0 else "") for i, s in self.letters]
        return " ".join([f"n={self.n_strands}"] + terms)

    def __str__(self) -> str:
        return self.to_text()


def parse_braid(text: str, n_strands: int | None = None) -> BraidWord:
    """Parse a braid word; error messages carry the 0-based character offset."""
    letters: list[tuple[int, int]] = []
    declared = None
    for pos, m in enumerate(re.finditer(r"\S+", text)):
        tok, start = m.group(), m.start()
        if pos == 0 and tok.startswith("n="):
            dm = _DECL.fullmatch(tok)
            if not dm:
                raise BraidParseError(f"malformed strand declaration {tok!r}", start)
            declared = int(dm.group(1))
            continue
        tm = _TERM.fullmatch(tok)
        if not tm:
            raise BraidParseError(f"malformed term {tok!r}; expected s<index> or s<index>^-1", start)
        idx = int(tm.group(1))
        if idx == 0:
            raise BraidParseError("generator index must be >= 1", start)
        if declared is not None and idx >= declared:
            raise BraidParseError(f"generator s{idx} needs more than {declared} strands", start)
        letters.append((idx, -1 if tm.group(2) else 1))

    if declared is not None and n_strands is not None and declared != n_strands:
        raise InputError(f"braid declares n={declared} but n={n_strands} was requested")
    n = declared or n_strands
    if n is None:
        n = max([i for i, _ in letters], default=1) + 1
    for i, _ in letters:
        if i >= n:
            raise InputError(f"generator s{i} out of range for {n} strands")
    return BraidWord(n, tuple(letters))


@dataclass(frozen=True)
class Op:
    gate_id: str
    wires: tuple[int, ...]
    inverse: bool = False


@dataclass(frozen=True)
class Circuit:
    n_wires: int
    d: int
    ops: tuple[Op, ...] = field(default_factory=tuple)

    def __post_init__(self):
        ops = tuple(self.ops)
        for op in ops:
            if len(set(op.wires)) != len(op.wires):
                raise InputError(f"op {op} has repeated wires")
            for w in op.wires:
                if not 0 <= w < self.n_wires:
                    raise InputError(f"op {op} has wire {w} out of range")
        object.__setattr__(self, "ops", ops)

    def inverse(self) -> "Circuit":
        return Circuit(self.n_wires, self.d, tuple(Op(o.gate_id, o.wires, not o.inverse) for o in reversed(self.ops)))

    def __add__(self, other: "Circuit") -> "Circuit":
        if (self.n_wires, self.d) != (other.n_wires, other.d):
            raise InputError("cannot concatenate circuits of different shapes")
        return Circuit(self.n_wires, self.d, self.ops + other.ops)

    def gate_ids(self) -> set[str]:
        return {op.gate_id for op in self.ops}

    def to_text(self) -> str:
        lines = [f"n={self.n_wires} d={self.d}"]
        for op in self.ops:
            line = f"{op.gate_id} {','.join(map(str, op.wires))}"
            lines.append(line + (" inv" if op.inverse else ""))
        return "\n".join(lines) + "\n"


def parse_circuit(text: str, n_wires: int | None = None, d: int | None = None) -> Circuit:
    """Parse the line-oriented form ``gate_id wire,wire [inv]``.

    An optional header line ``n=<wires> d=<dim>`` fixes the shape; ``#``
    starts a comment.
    """
    ops = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0].startswith("n="):
            for p in parts:
                key, _, val = p.partition("=")
                if key not in ("n", "d") or not val.isdigit():
                    raise InputError(f"line {lineno}: malformed header {line!r}")
                if key == "n":
                    n_wires = int(val) if n_wires is None else n_wires
                else:
                    d = int(val) if d is None else d
            continue
        if len(parts) not in (2, 3) or (len(parts) == 3 and parts[2] != "inv"):
            raise InputError(f"line {lineno}: expected 'gate_id w,w [inv]', got {line!r}")
        try:
            wires = tuple(int(w) for w in parts[1].split(","))
        except ValueError:
            raise InputError(f"line {lineno}: bad wire list {parts[1]!r}") from None
        ops.append(Op(parts[0], wires, len(parts) == 3))
    if n_wires is None:
        n_wires = max((max(o.wires) for o in ops), default=0) + 1
    return Circuit(n_wires, d or 2, tuple(ops))


def braid_to_circuit(word: BraidWord, gate_id: str = "R", d: int = 2) -> Circuit:
    ops = tuple(Op(gate_id, (i - 1, i), s < 0) for i, s in word.letters)
    return Circuit(word.n_strands, d, ops)


def generator_matrices(gate, n: int) -> list[np.ndarray]:
    """Dense ``rho(s_i)`` for ``i = 1 .. n-1``."""
    R = as_matrix(gate)
    d = local_dim(R)
    check_oracle_scale(n, d)
    return [embed_gate(R, (i - 1, i), n, d) for i in range(1, n)]


def representation_residual(gate, n: int) -> float:
    """Largest Frobenius violation of the braid relations under ``rho(R, n)``."""
    gens = generator_matrices(gate, n)
    worst = 0.0
    for i in range(len(gens)):
        for j in range(i + 2, len(gens)):
            worst = max(worst, frob_dist(gens[i] @ gens[j], gens[j] @ gens[i]))
        if i + 1 < len(gens):
            a, b = gens[i], gens[i + 1]
            worst = max(worst, frob_dist(a @ b @ a, b @ a @ b))
    return worst


def representation_check(gate, n: int, tol: float = DEFAULT_TOL) -> bool:
    return representation_residual(gate, n) <= tol
