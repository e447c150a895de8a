import json
from pathlib import Path

import pytest

from maxbent.survey import (
    REFERENCE_TABLES, SurveyConfig, emit_reports, reference_discrepancies, run_survey, survey_csv,
    survey_json, survey_text,
)

GOLDEN = Path(__file__).parent / "golden"


def test_m4_counts_and_order(survey4):
    cats = survey4.categories
    assert survey4.total == 1344 == sum(c.members for c in cats)
    assert [c.members for c in cats] == [2, 180, 750, 15, 11, 280, 105, 1]
    assert [c.ref_cat for c in cats] == [1, 2, 3, 4, 6, 5, 7, 8]
    assert all(c.ref_count == c.members for c in cats)
    assert not survey4.revalidation_failures and survey4.revalidated > 0
    assert reference_discrepancies(survey4) == []


def test_categories_are_signature_classes(survey4):
    sigs = [(c.walsh, c.diff) for c in survey4.categories]
    assert len(set(sigs)) == len(sigs)
    for c in survey4.categories:
        assert (c.profile.walsh_signature(), c.profile.diff_signature()) == (c.walsh, c.diff)
        assert sum(c.by_top.values()) == c.members
        assert 1 <= len(c.witnesses) <= 4


def test_golden_csv(survey4):
    assert survey_csv(survey4) == (GOLDEN / "survey_m4_r1.csv").read_text()
    assert survey_csv(survey4).splitlines()[1] == '1,"(4^10, 6^5)","{0, 2}_240",2,"r=1;L=x"'


def test_json_contents(survey4):
    doc = json.loads(survey_json(survey4))
    assert doc["header"]["base_field"]["modulus"] == 0x13
    assert doc["header"]["ext_field"]["modulus"] == 0x11d
    assert doc["header"]["base_field"]["generator"] == 2
    assert doc["total"] == doc["published_total"] == 1344
    assert doc["categories"][0]["certificates"]
    assert doc["violated"] == 0


def test_text_report(survey4):
    text = survey_text(survey4)
    assert "(4^12, 6^2, 8^1)" in text and "total 1344" in text


def test_output_independent_of_workers(survey4):
    par = run_survey(SurveyConfig(m=4, r=1, revalidate_rate=0.05, workers=2))
    assert survey_csv(par) == survey_csv(survey4)
    assert survey_json(par) == survey_json(survey4)


def test_emit_reports(tmp_path, survey4):
    paths = emit_reports(survey4, str(tmp_path / "out"))
    assert [Path(p).suffix for p in paths] == [".csv", ".json", ".txt"]
    assert Path(paths[0]).read_bytes().count(b"\r") == 0


def test_emit_reports_error_names_path(tmp_path, survey4):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OSError, match="file"):
        emit_reports(survey4, str(blocker))


def test_m3_survey_certifies_every_member():
    res = run_survey(SurveyConfig(m=3, r=1, revalidate_rate=1.0))
    assert res.total == 24 and res.revalidated == 24
    assert not res.revalidation_failures
    assert not [c for cat in res.categories for c in cat.certs if c.verdict == "violated"]


def test_config_validation():
    with pytest.raises(ValueError):
        SurveyConfig(m=7)
    with pytest.raises(ValueError):
        SurveyConfig(m=4, normalization="other")


def test_published_tables_are_self_consistent():
    # every published Walsh row accounts for all 2^m - 1 subfield components
    for m, rows in REFERENCE_TABLES.items():
        for walsh, diff, _ in rows:
            assert sum(walsh.values()) == (1 << m) - 1
