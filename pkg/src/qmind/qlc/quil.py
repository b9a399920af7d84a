"""Emit and parse the Quil subset used by the generated programs.

Supported instructions::

    DECLARE ro BIT[n]
    H q | X q | Z q | RX(angle) q | RZ(angle) q
    CZ a b | CNOT c t | CCNOT c1 c2 t | CONTROLLED ... Z q1 ... qk
    MEASURE q ro[i]
    HALT

Gates may follow a MEASURE as long as they do not touch a measured qubit;
such measurements commute to the end of the program.
"""
from __future__ import annotations

import ast
import math
import operator
import re
from dataclasses import dataclass

from ..errors import CircuitError, ParseError, UnsupportedGateError
from ..qsim import Circuit, GateOp

_PRETTY_DENOMINATORS = (1, 2, 4, 3, 6, 8, 12, 16)


@dataclass(frozen=True)
class AssemblyProgram:
    dialect: str
    text: str

    def __str__(self):
        return self.text


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}


def parse_angle(text: str) -> float:
    """Evaluate an arithmetic angle expression over numbers and ``pi``."""
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"malformed angle {text!r}") from exc

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return node.value
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            try:
                return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
            except ZeroDivisionError:
                raise ParseError(f"malformed angle {text!r}") from None
        raise ParseError(f"malformed angle {text!r}")

    return float(ev(tree))


def format_angle(angle: float) -> str:
    """Lowest-terms multiple of pi when exact, otherwise the shortest round-trip decimal."""
    if angle == 0:
        return "0"
    for den in _PRETTY_DENOMINATORS:
        num = round(angle * den / math.pi)
        if num == 0 or math.gcd(num, den) != 1:
            continue
        sign = "-" if num < 0 else ""
        body = "pi" if abs(num) == 1 else f"{abs(num)}*pi"
        text = sign + body + ("" if den == 1 else f"/{den}")
        if parse_angle(text) == angle:
            return text
    return repr(float(angle))


def _quil_line(op: GateOp) -> str:
    qs = " ".join(str(q) for q in op.qubits)
    if op.kind in ("RX", "RZ"):
        return f"{op.kind}({format_angle(op.angle)}) {qs}"
    if op.kind in ("X", "H", "Z", "CZ"):
        return f"{op.kind} {qs}"
    if op.kind == "CX":
        return f"CNOT {qs}"
    if op.kind == "CCX":
        return f"CCNOT {qs}"
    if op.kind == "MCZ":
        return "CONTROLLED " * (len(op.qubits) - 1) + f"Z {qs}"
    raise UnsupportedGateError(f"no Quil form for {op.kind}")


def emit_quil(circuit, register: str = "ro") -> AssemblyProgram:
    """Quil text for a ``Circuit`` or ``CompiledCircuit``."""
    circuit = getattr(circuit, "circuit", circuit)
    lines = []
    if circuit.classical_bit_count:
        lines.append(f"DECLARE {register} BIT[{circuit.classical_bit_count}]")
    lines.extend(_quil_line(op) for op in circuit.ops)
    lines.extend(f"MEASURE {q} {register}[{b}]" for q, b in circuit.measurements)
    return AssemblyProgram("quil", "\n".join(lines) + "\n")


_DECLARE = re.compile(r"DECLARE\s+(\w+)\s+BIT\[(\d+)\]$")
_MEASURE = re.compile(r"MEASURE\s+(\d+)\s+(\w+)\[(\d+)\]$")
_GATE = re.compile(r"((?:CONTROLLED\s+)*)([A-Z]+)(?:\((.*)\))?((?:\s+\d+)+)$")
_FIXED = {"H": ("H", 1), "X": ("X", 1), "Z": ("Z", 1), "RX": ("RX", 1), "RZ": ("RZ", 1),
          "CZ": ("CZ", 2), "CNOT": ("CX", 2), "CCNOT": ("CCX", 3)}


def parse_quil(text: str) -> Circuit:
    ops: list[GateOp] = []
    measurements: list[tuple[int, int]] = []
    measured: set[int] = set()
    register = None
    bits = None
    top = -1
    for lineno, raw in enumerate(text.splitlines(), 1):
        for stmt in raw.split("#", 1)[0].split(";"):
            stmt = " ".join(stmt.split())
            if not stmt or stmt == "HALT":
                continue
            if m := _DECLARE.match(stmt):
                if register is not None:
                    raise ParseError("only one classical register is supported", lineno)
                register, bits = m.group(1), int(m.group(2))
                continue
            if m := _MEASURE.match(stmt):
                q, name, b = int(m.group(1)), m.group(2), int(m.group(3))
                if register is not None and name != register:
                    raise ParseError(f"undeclared register {name!r}", lineno)
                if q in measured:
                    raise ParseError(f"qubit {q} measured twice", lineno)
                measured.add(q)
                measurements.append((q, b))
                register = register or name
                top = max(top, q)
                continue
            m = _GATE.match(stmt)
            if not m:
                raise ParseError(f"unknown instruction {stmt!r}", lineno)
            prefix, name, arg, qtext = m.groups()
            qubits = tuple(int(q) for q in qtext.split())
            depth = len(prefix.split())
            if depth:
                if name != "Z":
                    raise ParseError(f"unsupported controlled gate {name!r}", lineno)
                kind, arity = "MCZ", depth + 1
            elif name in _FIXED:
                kind, arity = _FIXED[name]
            else:
                raise ParseError(f"unknown instruction {name!r}", lineno)
            if len(qubits) != arity:
                raise ParseError(f"{name} expects {arity} qubit(s)", lineno)
            if (arg is not None) != (kind in ("RX", "RZ")):
                raise ParseError(f"bad parameter list for {name}", lineno)
            angle = None
            if arg is not None:
                try:
                    angle = parse_angle(arg)
                except ParseError as exc:
                    raise ParseError(str(exc), lineno) from None
            if measured & set(qubits):
                raise ParseError("gate acts on a qubit after its measurement", lineno)
            try:
                ops.append(GateOp(kind, qubits, angle))
            except ValueError as exc:
                raise ParseError(str(exc), lineno) from None
            top = max(top, *qubits)
    if top < 0:
        raise ParseError("program addresses no qubits", None)
    if bits is None and measurements:
        bits = max(b for _, b in measurements) + 1
    try:
        return Circuit(top + 1, tuple(ops), tuple(measurements), bits or 0)
    except CircuitError as exc:
        raise ParseError(str(exc), None) from None
