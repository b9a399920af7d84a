"""Compile Cnf3 expressions to search circuits, transpile them, and read/write assembly."""
from .compiler import (
    ANCILLA_QUBITS,
    VARIABLE_QUBITS,
    CompiledCircuit,
    DegenerateGroverWarning,
    compile_clause,
    compile_grover,
    compile_oracle,
    diffusion,
    grover_success,
    marked_indices_of_program,
    phase_marked_indices,
)
from .qasm import emit_openqasm, parse_openqasm
from .quil import AssemblyProgram, emit_quil, format_angle, parse_angle, parse_quil
from .transpile import NATIVE_KINDS, decompose, native_gate_count, peephole_cancel, transpile

__all__ = [
    "ANCILLA_QUBITS",
    "VARIABLE_QUBITS",
    "AssemblyProgram",
    "CompiledCircuit",
    "DegenerateGroverWarning",
    "NATIVE_KINDS",
    "compile_clause",
    "compile_grover",
    "compile_oracle",
    "decompose",
    "diffusion",
    "emit_openqasm",
    "emit_quil",
    "format_angle",
    "grover_success",
    "marked_indices_of_program",
    "native_gate_count",
    "parse_angle",
    "parse_openqasm",
    "parse_quil",
    "peephole_cancel",
    "phase_marked_indices",
    "transpile",
]
