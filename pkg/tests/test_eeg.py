import numpy as np
import pytest
from conftest import EXPRESSIONS, TABLE_A1_1, TABLE_A1_2, TABLE_A1_3, TABLE_A1_4, table_recording, table_spec
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.signal import windows
from sklearn.base import clone

from qmind.boolexpr import format_expr, parse, to_cnf3
from qmind.eeg import (
    CLAUSE_ELECTRODES,
    REQUIRED_ELECTRODES,
    Band,
    EegRecording,
    ExpressionEncoder,
    band_of,
    build_clause,
    build_expression,
    encode_rhythm_snapshot,
    power_spectrum,
    read_csv,
    rms,
    synth_eeg,
    window_starts,
    write_csv,
)
from qmind.errors import EegError


def quiet_rows(**overrides):
    """Spec with every electrode at a weak 6 Hz tone, plus ``overrides``."""
    spec = {e: [(6.0, 1.0)] for e in REQUIRED_ELECTRODES}
    spec.update(overrides)
    return spec


@pytest.mark.parametrize(
    "freq,band",
    [(33.18, Band.BETA), (10.36, Band.ALPHA), (15.0, Band.BETA), (14.999, Band.ALPHA),
     (0.0, Band.DELTA), (4.0, Band.THETA), (8.0, Band.ALPHA), (39.99, Band.BETA), (40.0, Band.OUT_OF_BAND)],
)
def test_band_of(freq, band):
    assert band_of(freq) is band


def test_band_of_rejects_negative():
    with pytest.raises(EegError):
        band_of(-1.0)


def test_pure_tone_spectrum():
    rec = synth_eeg({"Fp1": [(20.0, 10.0)]}, 1.0)
    frame = power_spectrum(rec, "Fp1")
    assert frame.dominant_frequency() == 20.0
    assert frame.freqs[-1] <= 40.0
    peak = frame.power[frame.freqs == 20.0][0]
    assert peak == pytest.approx(100 / 4, rel=1e-9)
    # Hann leakage: the centre bin holds 2/3, each neighbour 1/6
    assert peak / frame.power.sum() == pytest.approx(2 / 3, rel=1e-9)


def test_pure_tone_main_lobe_holds_the_power():
    rec = synth_eeg({"Fp1": [(20.0, 10.0)]}, 1.0)
    frame = power_spectrum(rec, "Fp1")
    lobe = frame.power[(frame.freqs >= 19) & (frame.freqs <= 21)].sum()
    assert lobe / frame.power.sum() >= 0.95


def test_zero_signal_spectrum():
    rec = synth_eeg({"Fp1": []}, 1.0)
    frame = power_spectrum(rec, "Fp1")
    assert not frame.power.any()
    with pytest.raises(EegError):
        frame.dominant_frequency()


def test_two_equal_tones():
    rec = synth_eeg({"Fp1": [(10.0, 5.0), (30.0, 5.0)]}, 1.0)
    frame = power_spectrum(rec, "Fp1")
    p10, p30 = frame.power[frame.freqs == 10.0][0], frame.power[frame.freqs == 30.0][0]
    assert p10 == pytest.approx(p30, rel=0.05)


def test_window_errors():
    rec = synth_eeg({"Fp1": [(20.0, 1.0)]}, 2.0)
    with pytest.raises(EegError):
        power_spectrum(rec, "Fp1", 0.0, 0.4)
    with pytest.raises(EegError):
        power_spectrum(rec, "Fp1", 1.5, 1.0)
    with pytest.raises(EegError):
        power_spectrum(rec, "Fp1", -0.1, 1.0)
    with pytest.raises(EegError):
        power_spectrum(rec, "Cz", 0.0, 1.0)


def test_synth_rejects_aliasing_and_is_deterministic():
    with pytest.raises(EegError):
        synth_eeg({"Fp1": [(130.0, 1.0)]}, 1.0, rate=250)
    a = synth_eeg({"Fp1": [(20.0, 10.0)]}, 1.0, noise=2.0, seed=4)
    b = synth_eeg({"Fp1": [(20.0, 10.0)]}, 1.0, noise=2.0, seed=4)
    assert np.array_equal(a.samples, b.samples)
    assert not np.array_equal(a.samples, synth_eeg({"Fp1": [(20.0, 10.0)]}, 1.0, noise=2.0, seed=5).samples)


def test_recording_validation():
    with pytest.raises(EegError):
        EegRecording(("a", "a"), 250, np.zeros((2, 10)))
    with pytest.raises(EegError):
        EegRecording(("a",), 50, np.zeros((1, 10)))
    with pytest.raises(EegError):
        EegRecording(("a",), 250, np.full((1, 10), np.nan))


def test_csv_roundtrip(tmp_path):
    rec = table_recording(TABLE_A1_1, noise=1.0, seed=2)
    path = tmp_path / "eeg.csv"
    write_csv(rec, path)
    assert read_csv(path) == rec


def test_csv_errors(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("t,Fp1\n0,1\n")
    with pytest.raises(EegError):
        read_csv(path)
    path.write_text("time,Fp1\n0,1\n0.004,2\n")
    with pytest.raises(EegError):
        read_csv(path)  # missing electrodes
    header = "time," + ",".join(REQUIRED_ELECTRODES)
    path.write_text(header + "\n0," + ",".join("1" * 9) + "\n0.004," + ",".join("x" * 9) + "\n")
    with pytest.raises(EegError):
        read_csv(path)
    rows = [f"{t}," + ",".join("1" * 9) for t in (0, 0.004, 0.009, 0.012)]
    path.write_text(header + "\n" + "\n".join(rows) + "\n")
    with pytest.raises(EegError):
        read_csv(path)  # jittered timestamps


def test_worked_example_clause():
    spec = quiet_rows(Fp1=[(33.18, 30.0)], O1=[(23.61, 20.0)])
    rec = synth_eeg(spec, 1.0)
    clause, report = build_clause(rec, 0.0, 1.0, 0)
    assert str(clause) == "(A ∨ C)"
    assert [t.electrode for t in report.terms] == ["Fp1", "O1"]
    spec["Fp1"] = [(10.36, 30.0)]
    clause, _ = build_clause(synth_eeg(spec, 1.0), 0.0, 1.0, 0)
    assert str(clause) == "(¬A ∨ C)"


@pytest.mark.parametrize(
    "table,key",
    [(TABLE_A1_1, "A1_1"), (TABLE_A1_2, "A1_2"), (TABLE_A1_3, "A1_3"), (TABLE_A1_4, "A1_4")],
)
def test_appendix_tables(table, key):
    expr, report = build_expression(table_recording(table))
    assert expr == to_cnf3(EXPRESSIONS[key])
    for clause_report, row in zip(report.clauses, table):
        assert [t.electrode for t in clause_report.terms] == [row[0][0], row[1][0]]
        for term, (_, freq) in zip(clause_report.terms, row):
            assert abs(term.frequency - freq) <= 0.5


def test_all_beta_gives_positive_clauses():
    spec = {e: [(20.0, 10.0 + i)] for i, e in enumerate(REQUIRED_ELECTRODES)}
    expr, _ = build_expression(synth_eeg(spec, 1.0))
    assert all(not lit.negated for c in expr.clauses for lit in c.literals)


def test_rms_ties_keep_column_order():
    spec = quiet_rows(Fp1=[(20.0, 10.0)], T3=[(20.0, 10.0)], O1=[(20.0, 10.0)])
    clause, _ = build_clause(synth_eeg(spec, 1.0), 0.0, 1.0, 0)
    assert str(clause) == "(A ∨ B)"


def test_silent_row_is_an_error():
    spec = quiet_rows(Fp1=[], T3=[], O1=[])
    with pytest.raises(EegError):
        build_clause(synth_eeg(spec, 1.0), 0.0, 1.0, 0)


def test_missing_electrode_is_an_error():
    spec = quiet_rows()
    del spec["Oz"]
    with pytest.raises(EegError):
        build_expression(synth_eeg(spec, 1.0))


def test_out_of_band_forces_negative_with_warning():
    # a tone on the 40 Hz bin edge is kept by the spectrum but is not beta
    spec = quiet_rows(Fz=[(40.0, 30.0)], Cz=[(20.0, 20.0)])
    clause, report = build_clause(synth_eeg(spec, 1.0), 0.0, 1.0, 1)
    assert str(clause) == "(¬A ∨ B)"
    assert report.warnings and "40" in report.warnings[0]
    assert report.terms[0].band is Band.OUT_OF_BAND


def test_report_json_layout():
    _, report = build_expression(table_recording(TABLE_A1_1))
    d = report.to_dict()
    assert d["expression"] == EXPRESSIONS["A1_1"]
    term = d["clauses"][0]["terms"][0]
    assert term["electrode"] == "O1" and term["variable"] == "C" and term["literal"] == "¬C"
    assert term["band"] == "alpha"


def test_window_starts():
    rec = synth_eeg({"Fp1": []}, 3.0)
    assert window_starts(rec, 1.0) == [0.0, 1.0, 2.0]
    assert window_starts(rec, 1.0, 0.5) == [0.0, 0.5, 1.0, 1.5, 2.0]
    with pytest.raises(EegError):
        window_starts(rec, 4.0)


def test_rhythm_snapshot_t0():
    expr = encode_rhythm_snapshot({"beta": "Fp2", "alpha": "T5"}, ["Fp2", "Fz", "T3", "C3", "T4", "T5"])
    text = format_expr(expr)
    assert text.startswith("beta.Fp2 ∧ ¬beta.Fz ∧ ¬beta.T3 ∧ ¬beta.C3 ∧ ¬beta.T4 ∧ ¬beta.T5")
    assert text.endswith("¬alpha.Fp2 ∧ ¬alpha.Fz ∧ ¬alpha.T3 ∧ ¬alpha.C3 ∧ ¬alpha.T4 ∧ alpha.T5")
    assert parse(text) == expr


def test_rhythm_snapshot_variants():
    single = encode_rhythm_snapshot({"beta": "Cz"}, ["Cz"])
    assert format_expr(single) == "beta.Cz"
    either = encode_rhythm_snapshot({"beta": "T4", "alpha": "C3"}, ["T4", "C3"], combine="or")
    assert format_expr(either) == "beta.T4 ∧ ¬beta.C3 ∨ ¬alpha.T4 ∧ alpha.C3"
    with pytest.raises(EegError):
        encode_rhythm_snapshot({"beta": "O1"}, ["Cz"])


def test_expression_encoder():
    rec = synth_eeg(table_spec(TABLE_A1_4), 3.0)
    X = rec.samples.T
    enc = ExpressionEncoder(channels=rec.labels, rate=rec.rate)
    out = enc.fit_transform(X)
    assert list(out) == ["(A | B) & (B | A) & (B | C)"] * 3
    twin = clone(enc)
    assert twin.get_params() == enc.get_params()
    with pytest.raises(Exception):
        twin.transform(X)
    with pytest.raises(EegError):
        ExpressionEncoder(channels=rec.labels[:-1]).fit(X)


# property tests


@settings(max_examples=60, deadline=None)
@given(st.floats(0.0, 39.999), st.floats(0.0, 100.0))
def test_band_partition(freq, other):
    band = band_of(freq)
    assert band is not Band.OUT_OF_BAND
    assert (band_of(other) is Band.OUT_OF_BAND) == (other >= 40)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 39), st.floats(0.5, 50.0))
def test_spectral_linearity(freq, amp):
    one = power_spectrum(synth_eeg({"Fp1": [(float(freq), amp)]}, 1.0), "Fp1")
    two = power_spectrum(synth_eeg({"Fp1": [(float(freq), 2 * amp)]}, 1.0), "Fp1")
    i = one.freqs == freq
    assert two.power[i][0] == pytest.approx(4 * one.power[i][0], rel=0.01)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.floats(0.5, 120.0), st.floats(0.0, 50.0)), max_size=4), st.integers(0, 99))
def test_retained_power_bounded_by_windowed_energy(partials, seed):
    rec = synth_eeg({"Fp1": partials}, 1.0, noise=1.0, seed=seed)
    frame = power_spectrum(rec, "Fp1")
    w = windows.hann(rec.n_samples, sym=False)
    seg = rec.channel("Fp1") * w
    # one-sided retained periodogram vs the windowed signal's total energy
    total = np.sum(np.abs(np.fft.fft(seg)) ** 2) / w.sum() ** 2
    assert frame.power.sum() <= total * (1 + 1e-9)


@st.composite
def eeg_specs(draw):
    spec = {}
    for e in REQUIRED_ELECTRODES:
        partials = draw(st.lists(st.tuples(st.floats(1.0, 39.0), st.floats(1.0, 40.0)), min_size=1, max_size=2))
        spec[e] = partials
    return spec


@settings(max_examples=30, deadline=None)
@given(eeg_specs(), st.integers(0, 999))
def test_clause_polarity_matches_report(spec, seed):
    rec = synth_eeg(spec, 1.0, noise=0.5, seed=seed)
    expr, report = build_expression(rec)
    for clause, clause_report in zip(expr.clauses, report.clauses):
        for lit, term in zip(clause.literals, clause_report.terms):
            assert lit.variable == term.variable
            assert (not lit.negated) == (15.0 <= term.frequency < 40.0)
    again, again_report = build_expression(rec)
    assert again == expr and again_report == report


def test_rms_of_sine():
    rec = synth_eeg({"Fp1": [(10.0, 2.0)]}, 1.0)
    assert rms(rec, "Fp1") == pytest.approx(2 / np.sqrt(2), rel=1e-9)


def test_clause_rows_cover_required():
    assert sorted(e for row in CLAUSE_ELECTRODES for e in row) == sorted(REQUIRED_ELECTRODES)
