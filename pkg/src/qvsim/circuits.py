"""Circuit text format: line-oriented parse and canonical serialization.

Grammar (one directive per line, ``#`` starts a comment):

    dim 3                     required, register dimension
    qvs 2                     required, register size
    variant E                 optional: E | checkE | hybrid:<d_a>
    seed 42                   optional RNG seed
    force 2,0,1               optional forced measurement outcomes
    init 0 +1                 optional product input: q or +q per QV
    gate F 0
    gate P 1 0                P(p): parameter first, then target
    gate X 2 0                X(q): parameter, target
    gate Z 1 0                Z(q): parameter, target
    gate D3 1 0               D3(q'): parameter, target
    gate CZ 0 1
    gate R 0 [0.0,0.3,1.1]    R(theta): target, then a length-d table
    measure 0

Parse errors carry the 1-based line number.  ``parse -> serialize ->
parse`` is a fixed point.
"""

from __future__ import annotations

import re
from dataclasses import dataclass


class CircuitParseError(ValueError):
    """Malformed circuit text; ``line`` is 1-based."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class Circuit:
    """Parsed circuit file."""

    d: int
    n: int
    variant: str = "E"
    d_a: int | None = None
    init: tuple | None = None     # per-QV (kind, label), kind in {"z", "+"}
    ops: tuple = ()
    forced: tuple | None = None
    seed: int | None = None


_TABLE_RE = re.compile(r"^\[([^\[\]]*)\]$")


def _int(tok: str, line: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise CircuitParseError(f"{what} must be an integer, got {tok!r}", line)


def parse_circuit(text: str) -> Circuit:
    d = n = None
    variant, d_a = "E", None
    init = forced = seed = None
    ops = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        key = fields[0]

        if key == "dim":
            if d is not None:
                raise CircuitParseError("duplicate dim line", lineno)
            if len(fields) != 2:
                raise CircuitParseError("dim takes one value", lineno)
            d = _int(fields[1], lineno, "dim")
            if d < 2:
                raise CircuitParseError(f"dim must be >= 2, got {d}", lineno)
        elif key == "qvs":
            if n is not None:
                raise CircuitParseError("duplicate qvs line", lineno)
            if len(fields) != 2:
                raise CircuitParseError("qvs takes one value", lineno)
            n = _int(fields[1], lineno, "qvs")
            if n < 1:
                raise CircuitParseError(f"qvs must be >= 1, got {n}", lineno)
        elif key == "variant":
            if len(fields) != 2:
                raise CircuitParseError("variant takes one value", lineno)
            tok = fields[1]
            if tok in ("E", "checkE"):
                variant = tok
            elif tok.startswith("hybrid:"):
                variant = "hybrid"
                d_a = _int(tok.split(":", 1)[1], lineno, "hybrid ancilla dim")
                if d_a < 2:
                    raise CircuitParseError("hybrid ancilla dim must be >= 2", lineno)
            else:
                raise CircuitParseError(f"unknown variant {tok!r}", lineno)
        elif key == "seed":
            if len(fields) != 2:
                raise CircuitParseError("seed takes one value", lineno)
            seed = _int(fields[1], lineno, "seed")
        elif key == "force":
            if len(fields) != 2:
                raise CircuitParseError("force takes a comma-separated list", lineno)
            forced = tuple(_int(t, lineno, "forced outcome")
                           for t in fields[1].split(","))
        elif key == "init":
            if d is None or n is None:
                raise CircuitParseError("init must come after dim and qvs", lineno)
            if len(fields) != n + 1:
                raise CircuitParseError(f"init needs {n} tokens", lineno)
            spec = []
            for tok in fields[1:]:
                kind = "+" if tok.startswith("+") else "z"
                label = _int(tok.lstrip("+"), lineno, "init label")
                if not 0 <= label < d:
                    raise CircuitParseError(f"init label {label} out of range", lineno)
                spec.append((kind, label))
            init = tuple(spec)
        elif key == "gate":
            if d is None or n is None:
                raise CircuitParseError("gates must come after dim and qvs", lineno)
            ops.append(_parse_gate(fields[1:], d, n, lineno))
        elif key == "measure":
            if d is None or n is None:
                raise CircuitParseError("measure must come after dim and qvs", lineno)
            if len(fields) != 2:
                raise CircuitParseError("measure takes one target", lineno)
            t = _int(fields[1], lineno, "target")
            _check_target(t, n, lineno)
            ops.append(("M", t))
        else:
            raise CircuitParseError(f"unknown keyword {key!r}", lineno)

    if d is None:
        raise CircuitParseError("missing dim line", 1)
    if n is None:
        raise CircuitParseError("missing qvs line", 1)
    return Circuit(d=d, n=n, variant=variant, d_a=d_a, init=init,
                   ops=tuple(ops), forced=forced, seed=seed)


def _check_target(t: int, n: int, line: int):
    if not 0 <= t < n:
        raise CircuitParseError(f"target {t} out of range for {n} QVs", line)


def _parse_gate(fields, d, n, line):
    if not fields:
        raise CircuitParseError("gate needs a name", line)
    name = fields[0]
    args = fields[1:]
    if name == "F":
        if len(args) != 1:
            raise CircuitParseError("F takes one target", line)
        t = _int(args[0], line, "target")
        _check_target(t, n, line)
        return ("F", t)
    if name in ("P", "X", "Z", "D3"):
        if len(args) != 2:
            raise CircuitParseError(f"{name} takes a parameter and a target", line)
        p = _int(args[0], line, "parameter")
        t = _int(args[1], line, "target")
        _check_target(t, n, line)
        limit = 2 * d if name == "P" else d
        if not 0 <= p < limit:
            raise CircuitParseError(
                f"{name} parameter {p} out of range [0, {limit})", line)
        return (name, p, t)
    if name == "CZ":
        if len(args) != 2:
            raise CircuitParseError("CZ takes two targets", line)
        r = _int(args[0], line, "target")
        s = _int(args[1], line, "target")
        _check_target(r, n, line)
        _check_target(s, n, line)
        if r == s:
            raise CircuitParseError("CZ targets must differ", line)
        return ("CZ", r, s)
    if name == "R":
        if len(args) < 2:
            raise CircuitParseError("R takes a target and a phase table", line)
        t = _int(args[0], line, "target")
        _check_target(t, n, line)
        m = _TABLE_RE.match("".join(args[1:]))
        if not m:
            raise CircuitParseError("R table must be [v1,v2,...]", line)
        try:
            table = tuple(float(v) for v in m.group(1).split(","))
        except ValueError:
            raise CircuitParseError("R table entries must be numbers", line)
        if len(table) != d:
            raise CircuitParseError(
                f"R table has {len(table)} entries, expected {d}", line)
        return ("R", table, t)
    raise CircuitParseError(f"unknown gate {name!r}", line)


def serialize_circuit(c: Circuit) -> str:
    """Canonical text form; parse(serialize(parse(t))) == parse(t)."""
    lines = [f"dim {c.d}", f"qvs {c.n}"]
    if c.variant == "hybrid":
        lines.append(f"variant hybrid:{c.d_a}")
    elif c.variant != "E":
        lines.append(f"variant {c.variant}")
    if c.seed is not None:
        lines.append(f"seed {c.seed}")
    if c.forced is not None:
        lines.append("force " + ",".join(str(v) for v in c.forced))
    if c.init is not None:
        toks = [("+" if kind == "+" else "") + str(label) for kind, label in c.init]
        lines.append("init " + " ".join(toks))
    for op in c.ops:
        if op[0] == "M":
            lines.append(f"measure {op[1]}")
        elif op[0] == "F":
            lines.append(f"gate F {op[1]}")
        elif op[0] == "CZ":
            lines.append(f"gate CZ {op[1]} {op[2]}")
        elif op[0] == "R":
            table = ",".join(repr(v) for v in op[1])
            lines.append(f"gate R {op[2]} [{table}]")
        else:
            lines.append(f"gate {op[0]} {op[1]} {op[2]}")
    return "\n".join(lines) + "\n"
