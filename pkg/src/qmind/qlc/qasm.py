"""OpenQASM 2 subset: h, x, z, rx, rz, cx, cz, ccx and measure."""
from __future__ import annotations

import re

from ..errors import CircuitError, ParseError, UnsupportedGateError
from ..qsim import Circuit, GateOp
from .quil import AssemblyProgram, format_angle, parse_angle

_SIMPLE = {"X": "x", "H": "h", "Z": "z", "CX": "cx", "CZ": "cz", "CCX": "ccx"}


def _args(qubits):
    return ",".join(f"q[{q}]" for q in qubits)


def _qasm_lines(op: GateOp) -> list[str]:
    if op.kind in _SIMPLE:
        return [f"{_SIMPLE[op.kind]} {_args(op.qubits)};"]
    if op.kind in ("RX", "RZ"):
        return [f"{op.kind.lower()}({format_angle(op.angle)}) {_args(op.qubits)};"]
    if op.kind == "MCZ":
        qs = op.qubits
        if len(qs) == 1:
            return [f"z {_args(qs)};"]
        if len(qs) == 2:
            return [f"cz {_args(qs)};"]
        if len(qs) == 3:
            t = qs[-1]
            return [f"h q[{t}];", f"ccx {_args(qs)};", f"h q[{t}];"]
    raise UnsupportedGateError(f"no OpenQASM form for {op.kind} on {len(op.qubits)} qubits")


def emit_openqasm(circuit, header: bool = False) -> AssemblyProgram:
    """OpenQASM text; ``header`` adds the version and ``qelib1.inc`` lines."""
    circuit = getattr(circuit, "circuit", circuit)
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";'] if header else []
    lines.append(f"qreg q[{circuit.qubit_count}];")
    if circuit.classical_bit_count:
        lines.append(f"creg c[{circuit.classical_bit_count}];")
    for op in circuit.ops:
        lines.extend(_qasm_lines(op))
    lines.extend(f"measure q[{q}] -> c[{b}];" for q, b in circuit.measurements)
    return AssemblyProgram("openqasm", "\n".join(lines) + "\n")


_REG = re.compile(r"(qreg|creg)\s+(\w+)\[(\d+)\]$")
_MEAS = re.compile(r"measure\s+(\w+)\[(\d+)\]\s*->\s*(\w+)\[(\d+)\]$")
_GATE = re.compile(r"([a-z]+)(?:\((.*)\))?\s+(.+)$")
_OPERAND = re.compile(r"(\w+)\[(\d+)\]$")
_KINDS = {"h": ("H", 1), "x": ("X", 1), "z": ("Z", 1), "rx": ("RX", 1), "rz": ("RZ", 1),
          "cx": ("CX", 2), "cz": ("CZ", 2), "ccx": ("CCX", 3)}


def parse_openqasm(text: str) -> Circuit:
    body = re.sub(r"//[^\n]*", "", text)
    qreg = creg = None
    ops, measurements, measured = [], [], set()
    for n, stmt in enumerate(s.strip() for s in body.split(";")):
        stmt = " ".join(stmt.split())
        if not stmt or stmt.startswith("OPENQASM") or stmt.startswith("include"):
            continue
        if m := _REG.match(stmt):
            if m.group(1) == "qreg":
                qreg = (m.group(2), int(m.group(3)))
            else:
                creg = (m.group(2), int(m.group(3)))
            continue
        if m := _MEAS.match(stmt):
            if qreg is None or creg is None or m.group(1) != qreg[0] or m.group(3) != creg[0]:
                raise ParseError(f"measure on undeclared register: {stmt!r}", n + 1)
            q = int(m.group(2))
            measured.add(q)
            measurements.append((q, int(m.group(4))))
            continue
        m = _GATE.match(stmt)
        if not m or m.group(1) not in _KINDS:
            raise ParseError(f"unknown statement {stmt!r}", n + 1)
        kind, arity = _KINDS[m.group(1)]
        qubits = []
        for operand in m.group(3).split(","):
            om = _OPERAND.match(operand.strip())
            if not om or qreg is None or om.group(1) != qreg[0]:
                raise ParseError(f"bad operand {operand!r}", n + 1)
            qubits.append(int(om.group(2)))
        if len(qubits) != arity:
            raise ParseError(f"{m.group(1)} expects {arity} operand(s)", n + 1)
        if measured & set(qubits):
            raise ParseError("gate acts on a qubit after its measurement", n + 1)
        angle = parse_angle(m.group(2)) if m.group(2) is not None else None
        try:
            ops.append(GateOp(kind, tuple(qubits), angle))
        except CircuitError as exc:
            raise ParseError(str(exc), n + 1) from None
    if qreg is None:
        raise ParseError("missing qreg declaration", None)
    try:
        return Circuit(qreg[1], tuple(ops), tuple(measurements), creg[1] if creg else None)
    except CircuitError as exc:
        raise ParseError(str(exc), None) from None
