"""Rewrite circuits into the RX/RZ/CZ native set, and cancel redundant pairs."""
from __future__ import annotations

import itertools
import math

from ..errors import UnsupportedGateError
from ..qsim import SELF_INVERSE_KINDS, SYMMETRIC_KINDS, Circuit, GateOp, cz, rx, rz

NATIVE_KINDS = frozenset({"RX", "RZ", "CZ"})
PI = math.pi


def _hadamard(q):
    return [rz(PI / 2, q), rx(PI / 2, q), rz(PI / 2, q)]


def _cnot(control, target):
    return [*_hadamard(target), cz(control, target), *_hadamard(target)]


def _multi_cz(qubits):
    """Multi-controlled Z from parity phases.

    For bits x1..xk, x1*...*xk = 2**(1-k) * sum over nonempty subsets S of
    (-1)**(|S|-1) * parity(x_S), so exp(i*pi*x1...xk) factors into one
    parity-controlled phase per subset. Each parity is gathered on the last
    qubit of S with CNOTs and rotated with RZ (exact up to global phase).
    """
    k = len(qubits)
    ops = []
    for size in range(1, k + 1):
        sign = 1 if size % 2 else -1
        angle = sign * PI / 2 ** (k - 1)
        for subset in itertools.combinations(qubits, size):
            sink = subset[-1]
            ladder = [g for c in subset[:-1] for g in _cnot(c, sink)]
            ops.extend(ladder)
            ops.append(rz(angle, sink))
            ops.extend(ladder)
    return ops


def decompose(op: GateOp) -> list[GateOp]:
    """Native sequence equal to ``op`` up to a global phase."""
    kind, qs = op.kind, op.qubits
    if kind in NATIVE_KINDS:
        return [op]
    if kind == "X":
        return [rx(PI, qs[0])]
    if kind == "Z":
        return [rz(PI, qs[0])]
    if kind == "H":
        return _hadamard(qs[0])
    if kind == "CX":
        return _cnot(*qs)
    if kind == "MCZ":
        if len(qs) == 1:
            return [rz(PI, qs[0])]
        if len(qs) == 2:
            return [cz(*qs)]
        return _multi_cz(qs)
    if kind == "CCX":
        t = qs[-1]
        return [*_hadamard(t), *_multi_cz(qs), *_hadamard(t)]
    raise UnsupportedGateError(f"cannot transpile {kind}")


def transpile(circuit: Circuit, merge=True) -> Circuit:
    """Equivalent circuit over RX, RZ and CZ (plus the original measurements).

    With ``merge``, consecutive rotations about the same axis on one qubit
    are fused and rotations by multiples of 2*pi are dropped.
    """
    ops = [g for op in circuit.ops for g in decompose(op)]
    if merge:
        ops = merge_rotations(ops)
    return circuit.with_ops(ops)


def _is_identity_angle(angle):
    # RX/RZ(2*pi*m) is -I or I: a global phase at most
    turns = angle / (2 * PI)
    return abs(turns - round(turns)) < 1e-12


def merge_rotations(ops: list[GateOp]) -> list[GateOp]:
    out: list[GateOp] = []
    last_on: dict[int, int] = {}  # qubit -> index in out of the last op touching it
    for op in ops:
        if op.kind in ("RX", "RZ"):
            q = op.qubits[0]
            j = last_on.get(q)
            if j is not None and out[j] is not None and out[j].kind == op.kind:
                merged = out[j].angle + op.angle
                if _is_identity_angle(merged):
                    out[j] = None
                    del last_on[q]
                else:
                    out[j] = GateOp(op.kind, (q,), merged)
                continue
            if _is_identity_angle(op.angle):
                continue
        out.append(op)
        for q in op.qubits:
            last_on[q] = len(out) - 1
    return [op for op in out if op is not None]


def _same_gate(a: GateOp, b: GateOp) -> bool:
    if a.kind != b.kind or a.angle != b.angle:
        return False
    if a.kind in SYMMETRIC_KINDS:
        return set(a.qubits) == set(b.qubits)
    return set(a.controls) == set(b.controls) and a.targets == b.targets


def peephole_cancel(circuit: Circuit) -> Circuit:
    """Remove pairs of identical self-inverse gates adjacent on their wires.

    Two gates are adjacent when no gate between them touches any of their
    qubits; gates on other wires commute with the pair.
    """
    ops = list(circuit.ops)
    changed = True
    while changed:
        changed = False
        for i, op in enumerate(ops):
            if op.kind not in SELF_INVERSE_KINDS:
                continue
            wires = set(op.qubits)
            for j in range(i + 1, len(ops)):
                if wires & set(ops[j].qubits):
                    if _same_gate(op, ops[j]):
                        del ops[j]
                        del ops[i]
                        changed = True
                    break
            if changed:
                break
    return circuit.with_ops(ops)


def native_gate_count(circuit: Circuit) -> int:
    if any(op.kind not in NATIVE_KINDS for op in circuit.ops):
        raise UnsupportedGateError("circuit contains non-native gates")
    return circuit.gate_count
