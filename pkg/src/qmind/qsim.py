"""Dense state-vector simulation of the gate set used by the compiler.

Basis index ``i`` encodes qubits right to left: bit ``k`` of ``i`` is the
value of qubit ``k``, so ``|q2 q1 q0>`` prints with qubit 0 rightmost.
"""
from __future__ import annotations

import csv
import io
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import CircuitError

MAX_QUBITS = 20
MAX_UNITARY_QUBITS = 10
NORM_TOL = 1e-10

# number of qubits per kind; None means any number >= 1
GATE_ARITY: dict[str, int | None] = {
    "X": 1,
    "H": 1,
    "Z": 1,
    "RX": 1,
    "RZ": 1,
    "CX": 2,
    "CZ": 2,
    "CCX": 3,
    "MCZ": None,
}
ROTATION_KINDS = frozenset({"RX", "RZ"})
SELF_INVERSE_KINDS = frozenset({"X", "H", "Z", "CX", "CZ", "CCX", "MCZ"})
# kinds whose action does not depend on the order of their qubits
SYMMETRIC_KINDS = frozenset({"CZ", "MCZ"})

_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


@dataclass(frozen=True)
class GateOp:
    """One gate application.

    For controlled-X kinds (``CX``, ``CCX``) the last qubit is the target and
    the others are controls. ``MCZ`` flips the sign of every basis state in
    which all of its qubits are 1, so its qubit order carries no meaning.
    """

    kind: str
    qubits: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self):
        kind = self.kind.upper()
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if kind not in GATE_ARITY:
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        arity = GATE_ARITY[kind]
        if arity is None:
            if not self.qubits:
                raise CircuitError("MCZ needs at least one qubit")
        elif len(self.qubits) != arity:
            raise CircuitError(f"{kind} acts on {arity} qubit(s), got {len(self.qubits)}")
        if any(q < 0 for q in self.qubits):
            raise CircuitError(f"negative qubit index in {self}")
        if len(set(self.qubits)) != len(self.qubits):
            raise CircuitError(f"qubit indices collide in {kind} {self.qubits}")
        if kind in ROTATION_KINDS:
            if self.angle is None or not math.isfinite(self.angle):
                raise CircuitError(f"{kind} needs a finite angle")
            object.__setattr__(self, "angle", float(self.angle))
        elif self.angle is not None:
            raise CircuitError(f"{kind} takes no angle")

    @property
    def controls(self) -> tuple[int, ...]:
        if self.kind in ("CX", "CCX"):
            return self.qubits[:-1]
        return ()

    @property
    def targets(self) -> tuple[int, ...]:
        if self.kind in ("CX", "CCX"):
            return self.qubits[-1:]
        return self.qubits

    def __str__(self):
        qs = " ".join(str(q) for q in self.qubits)
        if self.angle is not None:
            return f"{self.kind}({self.angle:g}) {qs}"
        return f"{self.kind} {qs}"


def x(q):
    return GateOp("X", (q,))


def h(q):
    return GateOp("H", (q,))


def z(q):
    return GateOp("Z", (q,))


def rx(theta, q):
    return GateOp("RX", (q,), theta)


def rz(theta, q):
    return GateOp("RZ", (q,), theta)


def cx(control, target):
    return GateOp("CX", (control, target))


def cz(a, b):
    return GateOp("CZ", (a, b))


def ccx(c1, c2, target):
    return GateOp("CCX", (c1, c2, target))


def mcz(*qubits):
    return GateOp("MCZ", tuple(qubits))


@dataclass(frozen=True)
class Circuit:
    """Gate sequence followed by terminal measurements ``(qubit, bit)``."""

    qubit_count: int
    ops: tuple[GateOp, ...] = ()
    measurements: tuple[tuple[int, int], ...] = ()
    classical_bit_count: int | None = None

    def __post_init__(self):
        n = int(self.qubit_count)
        if not 1 <= n <= MAX_QUBITS:
            raise CircuitError(f"qubit_count must be in [1, {MAX_QUBITS}], got {n}")
        object.__setattr__(self, "qubit_count", n)
        ops = tuple(self.ops)
        for op in ops:
            if not isinstance(op, GateOp):
                raise CircuitError(f"not a GateOp: {op!r}")
            if max(op.qubits) >= n:
                raise CircuitError(f"{op} addresses a qubit outside 0..{n - 1}")
        object.__setattr__(self, "ops", ops)
        meas = tuple((int(q), int(b)) for q, b in self.measurements)
        bits = [b for _, b in meas]
        if len(set(bits)) != len(bits):
            raise CircuitError("classical bit written more than once")
        for q, b in meas:
            if not 0 <= q < n:
                raise CircuitError(f"measured qubit {q} outside 0..{n - 1}")
            if b < 0:
                raise CircuitError(f"negative classical bit {b}")
        object.__setattr__(self, "measurements", meas)
        cbits = self.classical_bit_count
        if cbits is None:
            cbits = max(bits) + 1 if bits else 0
        cbits = int(cbits)
        if bits and max(bits) >= cbits:
            raise CircuitError(f"classical bit {max(bits)} outside register of {cbits}")
        object.__setattr__(self, "classical_bit_count", cbits)

    @property
    def gate_count(self) -> int:
        return len(self.ops)

    def measure_all(self) -> Circuit:
        """Copy with every qubit ``k`` measured into bit ``k``."""
        n = self.qubit_count
        return Circuit(n, self.ops, tuple((q, q) for q in range(n)), n)

    def with_ops(self, ops: Iterable[GateOp]) -> Circuit:
        return Circuit(self.qubit_count, tuple(ops), self.measurements, self.classical_bit_count)

    def to_dict(self) -> dict:
        ops = []
        for op in self.ops:
            entry = {"kind": op.kind, "qubits": list(op.qubits)}
            if op.angle is not None:
                entry["angle"] = op.angle
            ops.append(entry)
        return {
            "qubit_count": self.qubit_count,
            "classical_bit_count": self.classical_bit_count,
            "ops": ops,
            "measurements": [list(m) for m in self.measurements],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> Circuit:
        try:
            ops = tuple(
                GateOp(o["kind"], tuple(o["qubits"]), o.get("angle")) for o in data["ops"]
            )
            return cls(
                data["qubit_count"],
                ops,
                tuple(tuple(m) for m in data.get("measurements", ())),
                data.get("classical_bit_count"),
            )
        except (KeyError, TypeError) as exc:
            raise CircuitError(f"malformed circuit document: {exc}") from exc

    def to_json(self, indent=2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_json(cls, text: str) -> Circuit:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise CircuitError(f"circuit document is not JSON: {exc}") from exc
        return cls.from_dict(data)


class StateVector:
    """Normalised amplitudes over ``2**qubit_count`` basis states.

    The amplitude array is read-only; gate application returns a new state.
    """

    __slots__ = ("qubit_count", "amplitudes")

    def __init__(self, amplitudes, *, normalize=False):
        amps = np.array(amplitudes, dtype=complex).reshape(-1)
        n = amps.size.bit_length() - 1
        if amps.size < 2 or 1 << n != amps.size:
            raise CircuitError(f"amplitude count {amps.size} is not a power of two >= 2")
        if n > MAX_QUBITS:
            raise CircuitError(f"{n} qubits exceeds the {MAX_QUBITS}-qubit ceiling")
        norm = float(np.vdot(amps, amps).real)
        if normalize:
            if norm == 0:
                raise CircuitError("cannot normalise the zero vector")
            amps = amps / math.sqrt(norm)
        elif abs(norm - 1.0) > NORM_TOL:
            raise CircuitError(f"state is not normalised (|psi|^2 = {norm!r})")
        amps.flags.writeable = False
        self.qubit_count = n
        self.amplitudes = amps

    def __repr__(self):
        return f"StateVector(qubit_count={self.qubit_count})"

    def __len__(self):
        return self.amplitudes.size


def init_state(n: int) -> StateVector:
    if not 1 <= n <= MAX_QUBITS:
        raise CircuitError(f"qubit count must be in [1, {MAX_QUBITS}], got {n}")
    amps = np.zeros(1 << n, dtype=complex)
    amps[0] = 1.0
    return StateVector(amps)


def basis_state(n: int, index: int) -> StateVector:
    if not 0 <= index < 1 << n:
        raise CircuitError(f"basis index {index} outside {n}-qubit space")
    amps = np.zeros(1 << n, dtype=complex)
    amps[index] = 1.0
    return StateVector(amps)


def gate_matrix(op: GateOp) -> np.ndarray:
    """2x2 matrix of a single-qubit gate."""
    if op.kind == "X":
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if op.kind == "H":
        return _H
    if op.kind == "Z":
        return np.array([[1, 0], [0, -1]], dtype=complex)
    if op.kind == "RX":
        c, s = math.cos(op.angle / 2), math.sin(op.angle / 2)
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if op.kind == "RZ":
        return np.diag([np.exp(-0.5j * op.angle), np.exp(0.5j * op.angle)])
    raise CircuitError(f"{op.kind} is not a single-qubit gate")


def _mask(index: np.ndarray, qubits: Sequence[int]) -> np.ndarray:
    m = np.ones(index.shape, dtype=bool)
    for q in qubits:
        m &= ((index >> q) & 1).astype(bool)
    return m


def _apply(psi: np.ndarray, n: int, op: GateOp) -> np.ndarray:
    """Apply ``op`` along axis 0 of ``psi`` (shape ``(2**n, ...)``)."""
    if max(op.qubits) >= n:
        raise CircuitError(f"{op} addresses a qubit outside 0..{n - 1}")
    kind = op.kind
    if kind in ("Z", "CZ", "MCZ"):
        index = np.arange(psi.shape[0])
        sign = np.where(_mask(index, op.qubits), -1.0, 1.0)
        return psi * sign.reshape((-1,) + (1,) * (psi.ndim - 1))
    if kind in ("X", "CX", "CCX"):
        index = np.arange(psi.shape[0])
        target = op.qubits[-1]
        flipped = index ^ (1 << target)
        perm = np.where(_mask(index, op.controls), flipped, index)
        return psi[perm]
    q = op.qubits[0]
    rest = psi.shape[1:]
    view = psi.reshape((1 << (n - 1 - q), 2, 1 << q) + rest)
    out = np.tensordot(gate_matrix(op), view, axes=([1], [1]))
    return np.moveaxis(out, 0, 1).reshape(psi.shape)


def apply_gate(state: StateVector, op: GateOp) -> StateVector:
    out = _apply(np.asarray(state.amplitudes), state.qubit_count, op)
    return StateVector(out)


def apply_ops(state: StateVector, ops: Iterable[GateOp]) -> StateVector:
    psi = np.array(state.amplitudes)
    n = state.qubit_count
    for op in ops:
        psi = _apply(psi, n, op)
    return StateVector(psi)


def probabilities(state: StateVector) -> np.ndarray:
    return np.abs(state.amplitudes) ** 2


def final_state(circuit: Circuit) -> StateVector:
    """State after every gate op, starting from the ground state."""
    return apply_ops(init_state(circuit.qubit_count), circuit.ops)


def outcome_probabilities(circuit: Circuit, state: StateVector | None = None) -> np.ndarray:
    """Exact distribution over classical register values.

    Element ``v`` is the probability that the register reads ``v`` with
    ``ro[0]`` as the least significant bit. Unwritten bits read 0.
    """
    if not circuit.measurements:
        raise CircuitError("circuit has no measurements")
    if state is None:
        state = final_state(circuit)
    probs = probabilities(state)
    index = np.arange(probs.size)
    value = np.zeros_like(index)
    for q, b in circuit.measurements:
        value |= ((index >> q) & 1) << b
    return np.bincount(value, weights=probs, minlength=1 << circuit.classical_bit_count)


@dataclass(frozen=True)
class ShotHistogram:
    """Counts of measured register values, keyed by bitstring (bit 0 rightmost)."""

    counts: Mapping[str, int]
    shots: int
    width: int = field(default=0)

    def __post_init__(self):
        counts = {str(k): int(v) for k, v in self.counts.items() if int(v) != 0}
        if any(v < 0 for v in counts.values()):
            raise CircuitError("negative count in histogram")
        widths = {len(k) for k in counts}
        width = self.width or (widths.pop() if len(widths) == 1 else 0)
        if any(len(k) != width or set(k) - {"0", "1"} for k in counts):
            raise CircuitError("histogram keys must be equal-length bitstrings")
        if sum(counts.values()) != self.shots:
            raise CircuitError(f"counts sum to {sum(counts.values())}, shots is {self.shots}")
        object.__setattr__(self, "counts", dict(sorted(counts.items())))
        object.__setattr__(self, "width", width)

    @classmethod
    def from_array(cls, counts: Sequence[int], width: int) -> ShotHistogram:
        table = {format(i, f"0{width}b"): int(c) for i, c in enumerate(counts) if c}
        return cls(table, int(sum(table.values())), width)

    def as_array(self) -> np.ndarray:
        """Dense counts indexed by outcome value."""
        out = np.zeros(1 << self.width, dtype=np.int64)
        for key, count in self.counts.items():
            out[int(key, 2)] = count
        return out

    def frequencies(self) -> np.ndarray:
        return self.as_array() / self.shots

    def __add__(self, other: ShotHistogram) -> ShotHistogram:
        if self.width != other.width:
            raise CircuitError("cannot merge histograms of different widths")
        merged = Counter(self.counts)
        merged.update(other.counts)
        return ShotHistogram(dict(merged), self.shots + other.shots, self.width)

    def to_dict(self) -> dict:
        return {"counts": dict(self.counts), "shots": self.shots, "width": self.width}

    def to_json(self, indent=2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, data: Mapping) -> ShotHistogram:
        try:
            return cls(dict(data["counts"]), int(data["shots"]), int(data.get("width", 0)))
        except (KeyError, TypeError, AttributeError) as exc:
            raise CircuitError(f"malformed histogram document: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> ShotHistogram:
        return cls.from_dict(json.loads(text))

    def to_csv(self) -> str:
        """Two columns, decimal outcome and count, one row per possible outcome."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["outcome", "count"])
        for value, count in enumerate(self.as_array()):
            writer.writerow([value, int(count)])
        return buf.getvalue()


def sample_counts(probs: np.ndarray, shots: int, seed: int) -> np.ndarray:
    """Inverse-CDF sampling with numpy's PCG64 generator seeded by ``seed``."""
    if shots < 1:
        raise CircuitError(f"shots must be >= 1, got {shots}")
    cdf = np.cumsum(probs)
    cdf /= cdf[-1]
    rng = np.random.default_rng(seed)
    draws = np.searchsorted(cdf, rng.random(shots), side="right")
    np.minimum(draws, probs.size - 1, out=draws)
    return np.bincount(draws, minlength=probs.size)


def run_circuit(circuit: Circuit, shots: int, seed: int = 0) -> ShotHistogram:
    probs = outcome_probabilities(circuit)
    counts = sample_counts(probs, shots, seed)
    return ShotHistogram.from_array(counts, circuit.classical_bit_count)


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Matrix of the gate ops (measurements ignored), column ``j`` = image of ``|j>``."""
    n = circuit.qubit_count
    if n > MAX_UNITARY_QUBITS:
        raise CircuitError(f"unitary limited to {MAX_UNITARY_QUBITS} qubits, got {n}")
    u = np.eye(1 << n, dtype=complex)
    for op in circuit.ops:
        u = _apply(u, n, op)
    return u


def subsystem_zero_probability(state: StateVector, qubits: Iterable[int]) -> float:
    qubits = list(qubits)
    if any(not 0 <= q < state.qubit_count for q in qubits):
        raise CircuitError(f"qubit index outside 0..{state.qubit_count - 1}")
    index = np.arange(len(state))
    zero = np.ones(index.shape, dtype=bool)
    for q in qubits:
        zero &= ((index >> q) & 1) == 0
    return float(probabilities(state)[zero].sum())


def equal_up_to_phase(a: np.ndarray, b: np.ndarray, atol: float = 1e-9) -> bool:
    """True if ``b == exp(i*phi) * a`` for some real ``phi``."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        return False
    pivot = np.unravel_index(np.argmax(np.abs(a)), a.shape)
    if abs(a[pivot]) < atol:
        return bool(np.allclose(b, 0, atol=atol))
    phase = b[pivot] / a[pivot]
    if abs(abs(phase) - 1) > atol:
        return False
    return bool(np.allclose(b, phase * a, rtol=0, atol=atol))


def total_variation(p: Sequence[float], q: Sequence[float]) -> float:
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())
