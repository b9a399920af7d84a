"""EEG ingestion, spectral analysis and logic-expression construction.

Each clause of the three-clause expression is driven by one row of
electrodes; columns map to variables A, B and C::

    clause 1:  Fp1  T3  O1
    clause 2:  Fz   Cz  Oz
    clause 3:  Fp2  T4  O2

For every row the two electrodes with the largest RMS amplitude become the
clause's terms. A term is a positive literal when its dominant frequency is
in the beta band (15 Hz or above), negative otherwise.
"""
from __future__ import annotations

import csv
import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.signal import windows
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .boolexpr import (
    CNF3_VARIABLES,
    Clause,
    Cnf3Expression,
    Expression,
    Literal,
    Not,
    Var,
    conj,
    disj,
    format_expr,
)
from .errors import EegError

logger = logging.getLogger(__name__)

CLAUSE_ELECTRODES: tuple[tuple[str, str, str], ...] = (
    ("Fp1", "T3", "O1"),
    ("Fz", "Cz", "Oz"),
    ("Fp2", "T4", "O2"),
)
REQUIRED_ELECTRODES = tuple(e for row in CLAUSE_ELECTRODES for e in row)
SPECTRUM_CEILING_HZ = 40.0
BETA_THRESHOLD_HZ = 15.0
MIN_WINDOW_S = 0.5
MIN_RATE_HZ = 80.0
TIMESTEP_JITTER = 0.01


class Band(enum.Enum):
    DELTA = "delta"
    THETA = "theta"
    ALPHA = "alpha"
    BETA = "beta"
    OUT_OF_BAND = "out-of-band"


_BAND_EDGES = ((4.0, Band.DELTA), (8.0, Band.THETA), (15.0, Band.ALPHA), (40.0, Band.BETA))


def band_of(freq: float) -> Band:
    """Rhythm band of ``freq`` (Hz); intervals are closed on the left."""
    if freq < 0 or math.isnan(freq):
        raise EegError(f"frequency must be non-negative, got {freq}")
    for upper, band in _BAND_EDGES:
        if freq < upper:
            return band
    return Band.OUT_OF_BAND


@dataclass(frozen=True, eq=False)
class EegRecording:
    """Equal-length channels of microvolt samples at a fixed rate."""

    labels: tuple[str, ...]
    rate: float
    samples: np.ndarray  # shape (channels, n_samples), μV

    def __post_init__(self):
        labels = tuple(self.labels)
        if len(set(labels)) != len(labels):
            raise EegError("channel labels must be unique")
        if not self.rate > MIN_RATE_HZ:
            raise EegError(f"sample rate must exceed {MIN_RATE_HZ} Hz, got {self.rate}")
        data = np.array(self.samples, dtype=float)
        if data.ndim != 2 or data.shape[0] != len(labels):
            raise EegError(f"samples must have shape ({len(labels)}, n), got {data.shape}")
        if not np.all(np.isfinite(data)):
            raise EegError("samples contain non-finite values")
        data.flags.writeable = False
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "rate", float(self.rate))
        object.__setattr__(self, "samples", data)

    @property
    def n_samples(self) -> int:
        return self.samples.shape[1]

    @property
    def duration(self) -> float:
        return self.n_samples / self.rate

    def channel(self, label: str) -> np.ndarray:
        try:
            return self.samples[self.labels.index(label)]
        except ValueError:
            raise EegError(f"no channel {label!r} in recording") from None

    def __eq__(self, other):
        if not isinstance(other, EegRecording):
            return NotImplemented
        return (
            self.labels == other.labels
            and self.rate == other.rate
            and np.array_equal(self.samples, other.samples)
        )


def read_csv(path, required: Sequence[str] = REQUIRED_ELECTRODES) -> EegRecording:
    """Load ``time,<label>,...`` rows; the rate is inferred from the timestep."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or not rows[0] or rows[0][0].strip().lower() != "time":
        raise EegError(f"{path}: header must start with 'time'")
    labels = [h.strip() for h in rows[0][1:]]
    missing = [e for e in required if e not in labels]
    if missing:
        raise EegError(f"{path}: missing required electrode(s): {', '.join(missing)}")
    body = [r for r in rows[1:] if any(c.strip() for c in r)]
    if len(body) < 2:
        raise EegError(f"{path}: need at least two samples")
    try:
        table = np.array([[float(c) for c in r] for r in body])
    except ValueError as exc:
        raise EegError(f"{path}: non-numeric cell ({exc})") from None
    if table.shape[1] != len(labels) + 1:
        raise EegError(f"{path}: ragged rows")
    steps = np.diff(table[:, 0])
    step = float(np.median(steps))
    if step <= 0 or np.max(np.abs(steps - step)) > TIMESTEP_JITTER * step:
        raise EegError(f"{path}: timestamps are not uniformly spaced")
    # timestamps are printed decimals; snap the rate to micro-hertz
    return EegRecording(tuple(labels), round(1.0 / step, 6), table[:, 1:].T)


def write_csv(recording: EegRecording, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["time", *recording.labels])
        t = np.arange(recording.n_samples) / recording.rate
        for i in range(recording.n_samples):
            writer.writerow([repr(float(t[i]))] + [repr(float(v)) for v in recording.samples[:, i]])


def synth_eeg(
    spec: Mapping[str, Sequence[tuple[float, float]]],
    duration: float,
    rate: float = 250.0,
    noise: float = 0.0,
    seed: int = 0,
) -> EegRecording:
    """Sum-of-sinusoids test recording.

    ``spec`` maps each label to ``(frequency Hz, amplitude μV)`` partials;
    uniform noise in ``[-noise, noise]`` μV is added from a seeded generator.
    """
    n = int(round(duration * rate))
    if n < 2:
        raise EegError("duration too short for the sample rate")
    t = np.arange(n) / rate
    rng = np.random.default_rng(seed)
    data = np.zeros((len(spec), n))
    for row, partials in zip(data, spec.values()):
        for freq, amp in partials:
            if not 0 <= freq < rate / 2:
                raise EegError(f"{freq} Hz aliases at {rate} Hz sampling")
            row += amp * np.sin(2 * np.pi * freq * t)
        if noise:
            row += rng.uniform(-noise, noise, n)
    return EegRecording(tuple(spec), rate, data)


def _window_slice(recording: EegRecording, t_start: float, duration: float) -> slice:
    if duration < MIN_WINDOW_S:
        raise EegError(f"window of {duration} s is shorter than {MIN_WINDOW_S} s")
    start = int(round(t_start * recording.rate))
    n = int(round(duration * recording.rate))
    if t_start < 0 or start + n > recording.n_samples:
        raise EegError(
            f"window [{t_start}, {t_start + duration}] s outside recording of {recording.duration} s"
        )
    return slice(start, start + n)


@dataclass(frozen=True, eq=False)
class SpectralFrame:
    channel: str
    freqs: np.ndarray  # Hz, ascending, <= 40
    power: np.ndarray  # μV²

    def dominant_frequency(self) -> float:
        """Centre of the strongest non-DC bin; ties resolve to the lower bin."""
        if self.freqs.size < 2 or not np.any(self.power[1:] > 0):
            raise EegError(f"channel {self.channel} has no spectral power")
        return float(self.freqs[1 + int(np.argmax(self.power[1:]))])


def power_spectrum(recording: EegRecording, channel: str, t_start: float = 0.0, duration: float = 1.0) -> SpectralFrame:
    """Hann-windowed periodogram of one channel, truncated at 40 Hz.

    Power is ``|DFT|^2 / (sum of window)^2`` so that a sinusoid of amplitude
    ``a`` on a bin centre shows a peak of ``a^2 / 4``.
    """
    seg = recording.channel(channel)[_window_slice(recording, t_start, duration)]
    w = windows.hann(seg.size, sym=False)
    spectrum = np.fft.rfft(seg * w)
    freqs = np.fft.rfftfreq(seg.size, 1.0 / recording.rate)
    power = np.abs(spectrum) ** 2 / w.sum() ** 2
    keep = freqs <= SPECTRUM_CEILING_HZ
    return SpectralFrame(channel, freqs[keep], power[keep])


def rms(recording: EegRecording, channel: str, t_start: float = 0.0, duration: float = 1.0) -> float:
    seg = recording.channel(channel)[_window_slice(recording, t_start, duration)]
    return float(np.sqrt(np.mean(seg**2)))


@dataclass(frozen=True)
class TermReport:
    electrode: str
    variable: str
    frequency: float
    rms: float
    band: Band
    positive: bool

    def to_dict(self) -> dict:
        return {
            "electrode": self.electrode,
            "variable": self.variable,
            "frequency_hz": self.frequency,
            "rms_uv": self.rms,
            "band": self.band.value,
            "literal": self.variable if self.positive else "¬" + self.variable,
        }


@dataclass(frozen=True)
class ClauseReport:
    index: int
    clause: Clause
    terms: tuple[TermReport, TermReport]
    warnings: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        out = {
            "clause": self.index,
            "text": str(self.clause),
            "terms": [t.to_dict() for t in self.terms],
        }
        if self.warnings:
            out["warnings"] = list(self.warnings)
        return out


@dataclass(frozen=True)
class AnalysisReport:
    t_start: float
    duration: float
    clauses: tuple[ClauseReport, ...]
    expression: Cnf3Expression = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "expression", Cnf3Expression(tuple(c.clause for c in self.clauses)))

    def to_dict(self) -> dict:
        return {
            "t_start_s": self.t_start,
            "duration_s": self.duration,
            "expression": str(self.expression),
            "clauses": [c.to_dict() for c in self.clauses],
        }


def build_clause(
    recording: EegRecording, t_start: float, duration: float, row: int
) -> tuple[Clause, ClauseReport]:
    """Clause ``row`` (0-based) from the two strongest electrodes of its row.

    Literals appear in rank order: the electrode with the larger RMS first.
    Equal RMS keeps column order (A before B before C).
    """
    electrodes = CLAUSE_ELECTRODES[row]
    levels = [rms(recording, e, t_start, duration) for e in electrodes]
    if not any(levels):
        raise EegError(f"clause {row + 1}: all electrodes silent in window")
    ranked = sorted(range(3), key=lambda col: -levels[col])[:2]
    terms, warnings = [], []
    for col in ranked:
        electrode = electrodes[col]
        freq = power_spectrum(recording, electrode, t_start, duration).dominant_frequency()
        band = band_of(freq)
        if band is Band.OUT_OF_BAND:
            warnings.append(f"{electrode} dominant frequency {freq} Hz is above 40 Hz; literal forced negative")
            logger.warning(warnings[-1])
        positive = BETA_THRESHOLD_HZ <= freq < SPECTRUM_CEILING_HZ
        terms.append(TermReport(electrode, CNF3_VARIABLES[col], freq, levels[col], band, positive))
    clause = Clause(tuple(Literal(t.variable, not t.positive) for t in terms))
    return clause, ClauseReport(row + 1, clause, tuple(terms), tuple(warnings))


def build_expression(
    recording: EegRecording, t_start: float = 0.0, duration: float = 1.0
) -> tuple[Cnf3Expression, AnalysisReport]:
    missing = [e for e in REQUIRED_ELECTRODES if e not in recording.labels]
    if missing:
        raise EegError(f"recording lacks electrode(s): {', '.join(missing)}")
    reports = tuple(build_clause(recording, t_start, duration, row)[1] for row in range(3))
    report = AnalysisReport(t_start, duration, reports)
    return report.expression, report


def window_starts(recording: EegRecording, duration: float, hop: float | None = None) -> list[float]:
    """Start times of consecutive analysis windows (non-overlapping by default)."""
    hop = duration if hop is None else hop
    if hop <= 0:
        raise EegError("hop must be positive")
    n_win = int(round(duration * recording.rate))
    n_hop = int(round(hop * recording.rate))
    if n_win > recording.n_samples:
        raise EegError(f"recording of {recording.duration} s is shorter than one {duration} s window")
    count = (recording.n_samples - n_win) // n_hop + 1
    return [i * n_hop / recording.rate for i in range(count)]


def encode_rhythm_snapshot(
    prominent: Mapping[str, str], electrodes: Sequence[str], combine: str = "and"
) -> Expression:
    """One conjunction per rhythm: its prominent electrode positive, the rest negated.

    Variables are named ``"<rhythm>.<electrode>"``; rhythm terms are joined
    with AND, or OR when ``combine="or"``.
    """
    if combine not in ("and", "or"):
        raise EegError(f"combine must be 'and' or 'or', got {combine!r}")
    terms = []
    for rhythm, hot in prominent.items():
        if hot not in electrodes:
            raise EegError(f"{rhythm} electrode {hot!r} not in {list(electrodes)}")
        lits = [Var(f"{rhythm}.{e}") if e == hot else Not(Var(f"{rhythm}.{e}")) for e in electrodes]
        terms.append(conj(*lits))
    if not terms:
        raise EegError("no rhythms given")
    return conj(*terms) if combine == "and" else disj(*terms)


class ExpressionEncoder(BaseEstimator, TransformerMixin):
    """scikit-learn transformer from an EEG sample matrix to expression strings.

    ``X`` has shape ``(n_samples, n_channels)`` in μV with columns named by
    ``channels``. ``transform`` returns one ASCII expression per window.
    """

    def __init__(self, channels=REQUIRED_ELECTRODES, rate=250.0, window=1.0, hop=None):
        self.channels = channels
        self.rate = rate
        self.window = window
        self.hop = hop

    def _recording(self, X):
        X = check_array(X, dtype=float, ensure_min_samples=2)
        if X.shape[1] != len(self.channels):
            raise EegError(f"expected {len(self.channels)} channels, got {X.shape[1]}")
        return EegRecording(tuple(self.channels), self.rate, X.T)

    def fit(self, X, y=None):
        rec = self._recording(X)
        missing = [e for e in REQUIRED_ELECTRODES if e not in rec.labels]
        if missing:
            raise EegError(f"channels lack electrode(s): {', '.join(missing)}")
        if self.window < MIN_WINDOW_S:
            raise EegError(f"window must be >= {MIN_WINDOW_S} s")
        self.n_features_in_ = X.shape[1] if hasattr(X, "shape") else len(X[0])
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        rec = self._recording(X)
        out = []
        for t in window_starts(rec, self.window, self.hop):
            expr, _ = build_expression(rec, t, self.window)
            out.append(format_expr(expr.to_expression(), ascii=True))
        return np.array(out, dtype=object)
