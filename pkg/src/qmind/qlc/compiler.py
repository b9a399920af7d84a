"""Phase-logic oracle and amplitude-amplification circuits for Cnf3 expressions.

Qubit layout: variables A, B, C on q0, q1, q2; clause i (1-based) is computed
into ancilla q(2+i). Measured bitstrings therefore read ``|CBA>``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from ..boolexpr import CNF3_VARIABLES, Clause, Cnf3Expression, to_cnf3
from ..errors import CircuitError, ExpressionError
from ..qsim import Circuit, GateOp, StateVector, apply_ops, ccx, final_state, h, mcz, x

VARIABLE_QUBITS: Mapping[str, int] = {"A": 0, "B": 1, "C": 2}
ANCILLA_QUBITS = (3, 4, 5)


class DegenerateGroverWarning(UserWarning):
    """Amplitude amplification is trivial when nothing or everything is marked."""


def compile_clause(clause: Clause, ancilla: int, variable_map=VARIABLE_QUBITS) -> list[GateOp]:
    """Write the clause value into ``ancilla`` (assumed |0>).

    Uses a OR b = NOT(NOT a AND NOT b): positive literals are inverted, a
    Toffoli computes the conjunction of the inverted literals, the inversions
    are undone and the ancilla is flipped.
    """
    qubits = [variable_map[lit.variable] for lit in clause.literals]
    if ancilla in qubits:
        raise CircuitError(f"ancilla q{ancilla} collides with a literal qubit")
    flips = [x(q) for q, lit in zip(qubits, clause.literals) if not lit.negated]
    return [*flips, ccx(qubits[0], qubits[1], ancilla), *flips, x(ancilla)]


def compile_oracle(expr: Cnf3Expression | str) -> list[GateOp]:
    """Compute the clauses, phase-flip their conjunction, then uncompute."""
    if not isinstance(expr, Cnf3Expression):
        expr = to_cnf3(expr)
    blocks = [compile_clause(c, a) for c, a in zip(expr.clauses, ANCILLA_QUBITS)]
    ops = [op for block in blocks for op in block]
    ops.append(mcz(*ANCILLA_QUBITS))
    # every emitted gate is self-inverse, so reversing the sequence inverts it
    for block in reversed(blocks):
        ops.extend(reversed(block))
    return ops


def diffusion(n_vars: int, qubits: Sequence[int] | None = None) -> list[GateOp]:
    """Inversion about the mean over ``qubits`` (default ``0..n_vars-1``)."""
    if n_vars < 2:
        raise CircuitError("diffusion needs at least 2 qubits")
    qubits = list(range(n_vars)) if qubits is None else list(qubits)
    if len(qubits) != n_vars:
        raise CircuitError(f"expected {n_vars} qubits, got {len(qubits)}")
    hs = [h(q) for q in qubits]
    xs = [x(q) for q in qubits]
    return [*hs, *xs, mcz(*qubits), *xs, *hs]


@dataclass(frozen=True)
class CompiledCircuit:
    circuit: Circuit
    expression: Cnf3Expression
    iterations: int
    variable_map: Mapping[str, int] = field(default_factory=lambda: dict(VARIABLE_QUBITS))
    ancilla_map: Mapping[int, int] = field(
        default_factory=lambda: {i + 1: q for i, q in enumerate(ANCILLA_QUBITS)}
    )

    def to_dict(self) -> dict:
        return {
            "expression": str(self.expression),
            "iterations": self.iterations,
            "variable_map": dict(self.variable_map),
            "ancilla_map": {f"clause{i}": q for i, q in self.ancilla_map.items()},
            "circuit": self.circuit.to_dict(),
        }


def compile_grover(expr: Cnf3Expression | str, k: int = 1) -> CompiledCircuit:
    if not isinstance(expr, Cnf3Expression):
        expr = to_cnf3(expr)
    if k < 1:
        raise CircuitError(f"iteration count must be >= 1, got {k}")
    variables = [VARIABLE_QUBITS[v] for v in CNF3_VARIABLES]
    oracle = compile_oracle(expr)
    amplifier = diffusion(len(variables), variables)
    ops = [h(q) for q in variables]
    for _ in range(k):
        ops.extend(oracle)
        ops.extend(amplifier)
    circuit = Circuit(
        len(variables) + len(ANCILLA_QUBITS),
        tuple(ops),
        tuple((q, q) for q in variables),
        len(variables),
    )
    return CompiledCircuit(circuit, expr, k)


def grover_success(N: int, M: int, k: int) -> float:
    """Probability of measuring a marked item after ``k`` iterations."""
    if not 0 <= M <= N or N < 1:
        raise ExpressionError(f"need 0 <= M <= N, got N={N}, M={M}")
    if M == 0 or M == N:
        warnings.warn(
            f"M={M} of N={N}: reflection is trivial, success stays at M/N",
            DegenerateGroverWarning,
            stacklevel=2,
        )
        return M / N
    theta = math.asin(math.sqrt(M / N))
    return math.sin((2 * k + 1) * theta) ** 2


def phase_marked_indices(state: StateVector, n_vars: int = 3, atol: float = 1e-9) -> list[int]:
    """Variable-register basis states whose amplitude carries a minus sign.

    ``state`` must be a phase-marked uniform superposition with all other
    qubits at |0>, i.e. the state between an oracle and the diffusion.
    """
    amps = state.amplitudes
    head = amps[: 1 << n_vars]
    if not np.allclose(np.abs(head) ** 2, 1 / len(head), atol=atol):
        raise CircuitError("state is not a phase-marked uniform superposition")
    return [int(i) for i in np.flatnonzero(head.real < 0)]


def marked_indices_of_program(circuit: Circuit, n_vars: int = 3) -> list[int]:
    """Spin-marked set of a one-iteration search program.

    The trailing diffusion is its own inverse, so applying it once more to
    the final state recovers the marked superposition the oracle produced.
    """
    pre = apply_ops(final_state(circuit), diffusion(n_vars))
    return phase_marked_indices(pre, n_vars)
