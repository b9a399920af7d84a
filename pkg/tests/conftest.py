from pathlib import Path

import pytest

from qmind.eeg import CLAUSE_ELECTRODES, synth_eeg

DATA = Path(__file__).parent / "data"

FIG18 = "(A ∨ B) ∧ (¬B ∨ ¬C) ∧ (A ∨ C)"

# Appendix examples: per clause, the two selected electrodes in rank order
# with the frequency each one showed.
TABLE_A1_1 = (
    (("O1", 13.1649), ("T3", 24.7721)),
    (("Oz", 31.1541), ("Fz", 31.5992)),
    (("O2", 8.22338), ("T4", 27.0611)),
)
TABLE_A1_2 = (
    (("T3", 20.6042), ("Fp1", 21.2267)),
    (("Oz", 18.7471), ("Fz", 32.5744)),
    (("Fp2", 8.0119), ("O2", 10.3202)),
)
TABLE_A1_3 = (
    (("O1", 13.7849), ("Fp1", 23.9491)),
    (("Oz", 17.5519), ("Fz", 18.6791)),
    (("T4", 12.6194), ("Fp2", 13.1322)),
)
TABLE_A1_4 = (
    (("Fp1", 15.0409), ("T3", 18.6357)),
    (("Cz", 30.1681), ("Fz", 32.1824)),
    (("T4", 18.4086), ("O2", 19.1024)),
)
EXPRESSIONS = {
    "A1_1": "(¬C ∨ B) ∧ (C ∨ A) ∧ (¬C ∨ B)",
    "A1_2": "(B ∨ A) ∧ (C ∨ A) ∧ (¬A ∨ ¬C)",
    "A1_3": "(¬C ∨ A) ∧ (C ∨ A) ∧ (¬B ∨ ¬A)",
    "A1_4": "(A ∨ B) ∧ (B ∨ A) ∧ (B ∨ C)",
}


def table_spec(table, amps=(30.0, 20.0, 5.0), idle_freq=6.0):
    """Partial spec whose RMS ranking and dominant frequencies follow ``table``.

    The unselected electrode of each row gets a weak ``idle_freq`` tone.
    """
    spec = {}
    for row, ((first, f1), (second, f2)) in zip(CLAUSE_ELECTRODES, table):
        for e in row:
            if e == first:
                spec[e] = [(f1, amps[0])]
            elif e == second:
                spec[e] = [(f2, amps[1])]
            else:
                spec[e] = [(idle_freq, amps[2])]
    return spec


def table_recording(table, duration=1.0, **kw):
    return synth_eeg(table_spec(table), duration, **kw)


@pytest.fixture
def data_dir():
    return DATA


def read_data(name):
    return (DATA / name).read_text()


# ranked electrodes that produce (A ∨ B) ∧ (¬B ∨ ¬C) ∧ (A ∨ C)
TABLE_FIG18 = (
    (("Fp1", 22.0), ("T3", 31.0)),
    (("Cz", 10.0), ("Oz", 9.0)),
    (("Fp2", 18.0), ("O2", 25.0)),
)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(l.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
