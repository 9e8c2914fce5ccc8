"""Worked rows of the classification, pinned to their published values."""

import pytest

from emptysextic import pipeline, roots


def run_set(label):
    if label == "0":
        return pipeline.process_singularity_set(roots.RootSystem(()))
    return pipeline.process_singularity_set(roots.parse_label(label))


def test_smooth_case():
    rows = run_set("0")
    assert len(rows) == 1
    t = rows[0]
    assert t.d == 1 and len(t.forms) == 1
    assert t.forms[0].record.families == 1


def test_2a1():
    rows = run_set("2A1")
    assert len(rows) == 1
    rec = rows[0].forms[0].record
    assert rows[0].d == 1 and len(rows[0].forms) == 1
    assert rec.families == 1
    assert rec.c_complex == 0 and rec.s_complex == 0


def test_2a9_two_families():
    rows = run_set("2A9")
    assert len(rows) == 1
    t = rows[0]
    assert t.d == 1 and len(t.forms) == 1
    rec = t.forms[0].record
    assert rec.families == 2
    assert rec.same_t is True


def test_8a2_affirmative():
    rows = run_set("8A2")
    assert len(rows) == 1
    t = rows[0]
    assert t.d == 3
    assert t.c_complex == 0 and t.s_complex == 4
    assert len(t.forms) == 1
    rec = t.forms[0].record
    assert rec.s_real == (1, 1, 1)
    assert rec.m_complex == 1 and rec.m_real == 1


def test_6a3():
    rows = run_set("6A3")
    assert len(rows) == 1
    t = rows[0]
    assert t.d == 4 and t.c_complex == 3 and t.s_complex == 6
    rec = t.forms[0].record
    assert rec.c_real == (3, 0)
    assert rec.s_real == (0, 0, 3)
    assert rec.m_complex == 3


def test_4d4_two_forms():
    rows = run_set("4D4")
    assert len(rows) == 1
    t = rows[0]
    assert t.d == 2 and t.c_complex == 3 and t.s_complex == 0
    got = sorted(f.record.c_real for f in t.forms)
    assert got == [(1, 1), (3, 0)]
    for f in t.forms:
        assert f.record.families == 1
        assert f.record.m_complex == 3


def test_2a7_4a1():
    rows = run_set("2A7+4A1")
    assert len(rows) == 1
    t = rows[0]
    assert t.d == 4 and t.c_complex == 3 and t.s_complex == 2
    rec = t.forms[0].record
    assert rec.c_real == (1, 1) and rec.s_real == (1, 1, 0)
    assert rec.m_complex == 3


def test_aposteriori_regressions_on_samples():
    for label in ("2A9", "8A2", "6A3", "4D4"):
        for t in run_set(label):
            pairs = set()
            for f in t.forms:
                rec = f.record
                assert rec.m_real == rec.m_complex
                assert rec.check_identities()
                key = (rec.c_real, rec.s_real)
                assert key not in pairs
                pairs.add(key)
                if rec.s_complex > 0:
                    assert t.d > 2 or rec.s_complex == 0
