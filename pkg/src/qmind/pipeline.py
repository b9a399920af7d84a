"""Batch loop over EEG time lapses: expression, circuit, shots, sound.

Each lapse writes its report, Quil program, histogram (JSON and CSV) and WAV
into the output directory; the session WAV is the lapse sounds back to back.
Lapse ``i`` samples with ``seed + i`` so every run is reproducible.
"""
from __future__ import annotations

import dataclasses
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .eeg import MIN_WINDOW_S, AnalysisReport, EegRecording, build_expression, window_starts
from .errors import QmindError
from .qlc import CompiledCircuit, compile_grover, emit_quil
from .qsim import ShotHistogram, run_circuit
from .sonify import DEFAULT_FREQS, SoundSpec, concatenate, histogram_to_bank, synthesize, write_wav

logger = logging.getLogger(__name__)


class ConfigError(QmindError, ValueError):
    pass


@dataclass(frozen=True)
class SessionConfig:
    window: float = 1.0
    hop: float | None = None
    k: int = 1
    shots: int = 5000
    seed: int = 0
    freqs: tuple[float, ...] = DEFAULT_FREQS
    sound_duration: float = 5.0
    sample_rate: int = 44100
    output_dir: str = "qmind-out"
    continue_on_error: bool = False

    def __post_init__(self):
        if self.window < MIN_WINDOW_S:
            raise ConfigError(f"window must be >= {MIN_WINDOW_S} s, got {self.window}")
        if self.hop is not None and self.hop <= 0:
            raise ConfigError(f"hop must be positive, got {self.hop}")
        if self.shots < 1:
            raise ConfigError(f"shots must be >= 1, got {self.shots}")
        if self.k < 1:
            raise ConfigError(f"k must be >= 1, got {self.k}")
        object.__setattr__(self, "freqs", tuple(float(f) for f in self.freqs))
        # validates duration and rate
        SoundSpec(self.sound_duration, self.sample_rate)

    @property
    def sound(self) -> SoundSpec:
        return SoundSpec(self.sound_duration, self.sample_rate)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["freqs"] = list(self.freqs)
        return d

    @classmethod
    def from_dict(cls, data: Mapping) -> SessionConfig:
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_json(cls, text: str) -> SessionConfig:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(data)


@dataclass(frozen=True)
class LapseResult:
    index: int
    timestamp: float
    report: AnalysisReport | None
    compiled: CompiledCircuit | None
    histogram: ShotHistogram | None
    paths: Mapping[str, str] = field(default_factory=dict)
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None

    def to_dict(self) -> dict:
        out = {"lapse": self.index, "t_start_s": self.timestamp, "files": dict(self.paths)}
        if self.error:
            out["error"] = self.error
        else:
            out["expression"] = str(self.report.expression)
            out["counts"] = dict(self.histogram.counts)
        return out


def dump_json(data, path: Path) -> None:
    path.write_text(json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n", encoding="utf-8")


def process_lapse(recording: EegRecording, t_start: float, index: int, config: SessionConfig, out: Path):
    expr, report = build_expression(recording, t_start, config.window)
    compiled = compile_grover(expr, config.k)
    hist = run_circuit(compiled.circuit, config.shots, config.seed + index)
    buffer = synthesize(histogram_to_bank(hist, config.freqs), config.sound)
    stem = f"lapse_{index:03d}"
    paths = {
        "report": f"{stem}_report.json",
        "program": f"{stem}.quil",
        "histogram": f"{stem}_histogram.json",
        "csv": f"{stem}_histogram.csv",
        "wav": f"{stem}.wav",
    }
    dump_json(report.to_dict(), out / paths["report"])
    (out / paths["program"]).write_text(emit_quil(compiled).text)
    dump_json(hist.to_dict(), out / paths["histogram"])
    (out / paths["csv"]).write_text(hist.to_csv())
    write_wav(buffer, out / paths["wav"])
    return LapseResult(index, t_start, report, compiled, hist, paths), buffer


def run_session(recording: EegRecording, config: SessionConfig = SessionConfig()) -> list[LapseResult]:
    """Process every lapse in order and write the session artifacts.

    A failing lapse aborts the session unless ``continue_on_error`` is set,
    in which case it is recorded with its error and skipped in the audio.
    """
    starts = window_starts(recording, config.window, config.hop)
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    results, buffers = [], []
    for i, t in enumerate(starts):
        try:
            result, buffer = process_lapse(recording, t, i, config, out)
        except QmindError as exc:
            if not config.continue_on_error:
                raise type(exc)(f"lapse {i}: {exc}") from exc
            logger.warning("lapse %d failed: %s", i, exc)
            results.append(LapseResult(i, t, None, None, None, error=str(exc)))
            continue
        results.append(result)
        buffers.append(buffer)
    summary = {"config": config.to_dict(), "lapses": [r.to_dict() for r in results]}
    if buffers:
        write_wav(concatenate(buffers), out / "session.wav")
        summary["session_wav"] = "session.wav"
    dump_json(summary, out / "session.json")
    return results
