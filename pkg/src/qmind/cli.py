"""``qmind`` command line.

Subcommands chain through files: ``analyze`` prints the expression that
``compile`` takes, ``compile`` writes programs that ``simulate`` runs,
``simulate`` writes histograms that ``sonify`` renders. Failures print one
JSON line ``{"error": <type>, "message": ...}`` on stderr and exit 1.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .boolexpr import format_expr
from .eeg import build_expression, read_csv
from .errors import QmindError
from .pipeline import SessionConfig, dump_json, run_session
from .qlc import compile_grover, emit_openqasm, emit_quil, parse_openqasm, parse_quil, transpile
from .qsim import Circuit, ShotHistogram, run_circuit
from .sonify import DEFAULT_FREQS, SoundSpec, histogram_to_bank, synthesize, write_wav

OUTPUT_DIR_ENV = "QMIND_OUTPUT_DIR"


def default_output_dir() -> Path:
    return Path(os.environ.get(OUTPUT_DIR_ENV, "."))


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def load_circuit(path: str) -> Circuit:
    """Circuit from a ``.quil``, ``.qasm`` or JSON file (bare or compiled form)."""
    text = Path(path).read_text(encoding="utf-8")
    suffix = Path(path).suffix.lower()
    if suffix == ".quil":
        return parse_quil(text)
    if suffix == ".qasm":
        return parse_openqasm(text)
    data = json.loads(text)
    if isinstance(data, dict) and "circuit" in data:
        data = data["circuit"]
    return Circuit.from_dict(data)


def cmd_analyze(args) -> None:
    rec = read_csv(args.eeg)
    _, report = build_expression(rec, args.t, args.window)
    doc = report.to_dict()
    doc["expression_ascii"] = format_expr(report.expression.to_expression(), ascii=True)
    _emit(json.dumps(doc, indent=2, ensure_ascii=False) + "\n", args.out)


def cmd_compile(args) -> None:
    compiled = compile_grover(args.expression, args.k)
    circuit = transpile(compiled.circuit) if args.transpile else compiled.circuit
    if args.emit == "quil":
        text = emit_quil(circuit).text
    elif args.emit == "qasm":
        text = emit_openqasm(circuit, header=True).text
    else:
        doc = compiled.to_dict()
        doc["circuit"] = circuit.to_dict()
        text = json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
    _emit(text, args.out)


def cmd_simulate(args) -> None:
    hist = run_circuit(load_circuit(args.program), args.shots, args.seed)
    if args.csv:
        Path(args.csv).write_text(hist.to_csv(), encoding="utf-8")
    _emit(hist.to_json() + "\n", args.out)


def cmd_sonify(args) -> None:
    hist = ShotHistogram.from_json(Path(args.histogram).read_text(encoding="utf-8"))
    freqs = tuple(float(f) for f in args.freqs.split(",")) if args.freqs else DEFAULT_FREQS
    buffer = synthesize(histogram_to_bank(hist, freqs), SoundSpec(args.duration, args.rate))
    out = Path(args.out) if args.out else default_output_dir() / (Path(args.histogram).stem + ".wav")
    write_wav(buffer, out)
    print(out)


def cmd_run(args) -> None:
    data = {}
    if args.config:
        data = json.loads(Path(args.config).read_text(encoding="utf-8"))
        if not isinstance(data, dict):
            raise QmindError("config must be a JSON object")
    if args.out:
        data["output_dir"] = args.out
    elif "output_dir" not in data and OUTPUT_DIR_ENV in os.environ:
        data["output_dir"] = os.environ[OUTPUT_DIR_ENV]
    config = SessionConfig.from_dict(data)
    results = run_session(read_csv(args.eeg), config)
    for r in results:
        print(f"{r.index}\t{r.timestamp:g}\t{r.report.expression if r.ok else 'ERROR ' + r.error}")


def cmd_parse(args) -> None:
    _emit(load_circuit(args.program).to_json() + "\n", args.out)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qmind", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="EEG CSV window -> expression report (JSON)")
    a.add_argument("eeg")
    a.add_argument("--t", type=float, default=0.0, help="window start in seconds")
    a.add_argument("--window", type=float, default=1.0, help="window length in seconds")
    a.add_argument("--out")
    a.set_defaults(func=cmd_analyze)

    c = sub.add_parser("compile", help="expression -> search circuit")
    c.add_argument("expression")
    c.add_argument("--k", type=int, default=1, help="amplification rounds")
    c.add_argument("--emit", choices=("quil", "qasm", "json"), default="quil")
    c.add_argument("--transpile", action="store_true", help="rewrite into RX/RZ/CZ")
    c.add_argument("--out")
    c.set_defaults(func=cmd_compile)

    s = sub.add_parser("simulate", help="program (.quil/.qasm/.json) -> histogram JSON")
    s.add_argument("program")
    s.add_argument("--shots", type=int, default=5000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--csv", help="also write decimal-outcome CSV here")
    s.add_argument("--out")
    s.set_defaults(func=cmd_simulate)

    w = sub.add_parser("sonify", help="histogram JSON -> WAV")
    w.add_argument("histogram")
    w.add_argument("--freqs", help="comma-separated oscillator frequencies in Hz")
    w.add_argument("--duration", type=float, default=5.0)
    w.add_argument("--rate", type=int, default=44100)
    w.add_argument("--out")
    w.set_defaults(func=cmd_sonify)

    r = sub.add_parser("run", help="full session over an EEG CSV")
    r.add_argument("eeg")
    r.add_argument("--config", help="session config JSON")
    r.add_argument("--out", help="output directory (overrides config)")
    r.set_defaults(func=cmd_run)

    q = sub.add_parser("parse", help="validate a program and print circuit JSON")
    q.add_argument("program")
    q.add_argument("--out")
    q.set_defaults(func=cmd_parse)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (QmindError, OSError, json.JSONDecodeError) as exc:
        line = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(line, ensure_ascii=False), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
