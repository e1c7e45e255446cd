"""Report rendering: fixture aggregates, rounding notes, cross-render equality."""

import json
import random
from fractions import Fraction

import pytest

from posteval.agreement import AgreementRow, AgreementTable, Dimension, band
from posteval.model import (
    Annotation,
    ErrorCategory,
    Project,
    ScoringConfig,
    Segment,
    Severity,
    SystemOutput,
)
from posteval.reports import (
    REPORT_KINDS,
    UNDEFINED_KAPPA,
    agreement_report,
    agreement_report_from,
    build_report,
    format_kappa,
    pattern_report,
    pattern_report_from,
    render,
    scores_report,
    scores_report_from,
    severity_report,
    severity_report_from,
)
from posteval.scoring import Bucket, CategoryTotals, SeverityDistribution, segment_scores

from oracles import random_project

CFG = ScoringConfig()


def dist(system, noedit, minor, major):
    return SeverityDistribution(
        system_id=system,
        counts={Bucket.NO_EDIT: noedit, Bucket.MINOR: minor, Bucket.MAJOR: major},
        total_segments=noedit + minor + major)


def totals(system, flu, prn, trm, gsmis, adp):
    values = {
        ErrorCategory.FLU: flu, ErrorCategory.PRN: prn, ErrorCategory.TRM: trm,
        ErrorCategory.GSMIS: gsmis, ErrorCategory.ADP: adp,
    }
    return CategoryTotals(system_id=system, totals=values,
                          grand_total=sum(values.values(), Fraction(0)))


# three-system benchmark aggregates used as rendering fixtures
FIXTURE_DISTRIBUTIONS = [
    dist("Jais", 72, 68, 60),
    dist("GPT-3.5", 78, 52, 70),
    dist("NLLB-200", 38, 38, 124),
]

FIXTURE_TOTALS = [
    totals("Jais", Fraction(18), Fraction(105, 2), Fraction(48), Fraction(55), Fraction(14)),
    totals("GPT-3.5", Fraction(65, 4), Fraction(38), Fraction(52), Fraction(64), Fraction(26)),
    totals("NLLB-200", Fraction(30), Fraction(85, 2), Fraction(105), Fraction(112), Fraction(8)),
]

FIXTURE_AGREEMENT = AgreementTable(
    rows=tuple(
        AgreementRow(dimension, "Jais", kappa, band(kappa), 200)
        for dimension, kappa in [
            (Dimension.FLUENCY, 0.507),
            (Dimension.MEANING_TRANSFER, 0.529),
            (Dimension.ADAPTATION, 0.171),
            (Dimension.OVERALL, 0.608),
        ]
    ),
    annotators=("r1", "r2"),
    excluded=(),
)


# -- severity ------------------------------------------------------------------

def test_severity_fixture_percentages():
    report = severity_report_from(FIXTURE_DISTRIBUTIONS)
    jais, gpt, nllb = report.doc["systems"]
    assert jais["percentages"] == {"NoEdit": 36, "Minor": 34, "Major": 30}
    assert gpt["percentages"] == {"NoEdit": 39, "Minor": 26, "Major": 35}
    assert nllb["percentages"] == {"NoEdit": 19, "Minor": 19, "Major": 62}
    text = render(report, "text")
    assert "Jais" in text and " 36 " in text + " "
    for number in ("36", "34", "30", "39", "26", "35", "62"):
        assert number in text


def test_severity_minor_share_is_computed_not_stored():
    # shifting two segments between buckets must move the rendered share
    shifted = [dist("NLLB-200", 38, 58, 104)]
    report = severity_report_from(shifted)
    assert report.doc["systems"][0]["percentages"]["Minor"] == 29


def test_severity_all_noedit_single_row():
    report = severity_report_from([dist("only", 10, 0, 0)])
    assert report.doc["systems"][0]["percentages"] == {"NoEdit": 100, "Minor": 0, "Major": 0}
    assert report.doc["notes"] == []


def test_severity_sum_99_note():
    report = severity_report_from([dist("sys", 1, 1, 1)])
    assert report.doc["systems"][0]["percentages"] == {"NoEdit": 33, "Minor": 33, "Major": 33}
    assert any("99" in n and "100" in n for n in report.doc["notes"])
    assert "Note:" in render(report, "text")


def test_severity_byte_stable():
    a = render(severity_report_from(FIXTURE_DISTRIBUTIONS), "text")
    b = render(severity_report_from(
        [dist("Jais", 72, 68, 60), dist("GPT-3.5", 78, 52, 70), dist("NLLB-200", 38, 38, 124)]),
        "text")
    assert a == b
    assert a.endswith("\n") and not a.endswith("\n\n")


# -- pattern -------------------------------------------------------------------

def test_pattern_fixture_grand_totals():
    report = pattern_report_from(FIXTURE_TOTALS)
    grands = [s["grand_total"] for s in report.doc["systems"]]
    assert grands == ["187.50", "196.25", "297.50"]
    for fmt in ("text", "delimited", "structured"):
        out = render(report, fmt)
        for number in ("187.50", "196.25", "297.50"):
            assert number in out


def test_pattern_trm_gsmis_dominance_inputs():
    report = pattern_report_from(FIXTURE_TOTALS)
    nllb = report.doc["systems"][2]
    # (105 + 112) / 297.5 = 72.94...% -> 73
    assert nllb["trm_gsmis_share"] == 73


def test_pattern_single_trm_annotation_share_100():
    p = Project(name="t")
    p.add_segment(Segment("s1", "da", "msa"))
    p.add_output(SystemOutput("s1", "sysA", "hyp"))
    p.annotators.append("a1")
    p.add_annotation(Annotation(
        annotator_id="a1", segment_id="s1", system_id="sysA",
        severities={ErrorCategory.TRM: Severity.MAJOR}, adp_applicable=False))
    report = pattern_report(p, CFG)
    system = report.doc["systems"][0]
    assert system["shares"]["TRM"] == 100
    assert system["trm_gsmis_share"] == 100
    assert system["grand_total"] == "2.00"


def test_pattern_shares_sum_near_100_on_random_projects():
    rng = random.Random(909)
    for _ in range(30):
        p = random_project(rng, n_segments=6)
        report = pattern_report(p, p.config)
        for system in report.doc["systems"]:
            total = sum(system["shares"].values())
            if system["grand_total"] == "0.00":
                assert total == 0
                continue
            assert 97 <= total <= 103
            if total != 100:
                assert any(system["system"] in n and str(total) in n
                           for n in report.doc["notes"])


def test_pattern_zero_error_system_note():
    report = pattern_report_from([totals("clean", *(Fraction(0),) * 5)])
    assert report.doc["systems"][0]["grand_total"] == "0.00"
    assert any("clean" in n for n in report.doc["notes"])


# -- agreement -----------------------------------------------------------------

def test_agreement_fixture_column():
    report = agreement_report_from(FIXTURE_AGREEMENT)
    text = render(report, "text")
    assert "0.507 (Moderate)" in text
    assert "0.529 (Moderate)" in text
    assert "0.171 (Slight)" in text
    assert "0.608 (Substantial)" in text
    kappas = [c["kappa"] for c in report.doc["cells"]]
    assert kappas == ["0.507", "0.529", "0.171", "0.608"]


def test_agreement_undefined_rendering():
    table = AgreementTable(
        rows=(AgreementRow(Dimension.ADAPTATION, "sysA", None, None, 0),
              AgreementRow(Dimension.FLUENCY, "sysA", 1.0, band(1.0), 3)),
        annotators=("r1", "r2"), excluded=())
    report = agreement_report_from(table)
    assert format_kappa(None) == UNDEFINED_KAPPA
    text = render(report, "text")
    assert UNDEFINED_KAPPA in text
    assert "1.000 (Almost Perfect)" in text


def test_agreement_identical_annotators_all_perfect():
    p = Project(name="t")
    p.annotators = ["r1", "r2"]
    for i in range(3):
        seg = Segment(f"s{i}", f"da {i}", f"msa {i}")
        p.add_segment(seg)
        p.add_output(SystemOutput(seg.id, "sysA", f"hyp {i}"))
        for r in ("r1", "r2"):
            p.add_annotation(Annotation(
                annotator_id=r, segment_id=seg.id, system_id="sysA",
                severities={ErrorCategory.FLU: Severity(i % 3)},
                adp_applicable=True))
    report = agreement_report(p, CFG)
    for cell in report.doc["cells"]:
        if cell["items"] > 0:
            assert cell["kappa"] == "1.000"
            assert cell["band"] == "Almost Perfect"


def test_agreement_excluded_items_surface():
    table = AgreementTable(
        rows=(AgreementRow(Dimension.FLUENCY, "sysA", 0.5, band(0.5), 2),),
        annotators=("r1", "r2"), excluded=(("sysA", "s9"),))
    report = agreement_report_from(table)
    assert report.doc["excluded"] == [{"system": "sysA", "segment": "s9"}]
    assert "Excluded one-sided items: 1" in render(report, "text")


# -- scores --------------------------------------------------------------------

def small_project():
    p = Project(name="t")
    sets = [({}, True),
            ({ErrorCategory.ADP: Severity.MINOR}, True),
            ({ErrorCategory.FLU: Severity.MINOR, ErrorCategory.GSMIS: Severity.MINOR}, False),
            ({ErrorCategory.TRM: Severity.MAJOR}, False)]
    p.annotators = ["a1"]
    for i, (severities, adp_ok) in enumerate(sets):
        seg = Segment(f"s{i}", f"da {i}", f"msa {i}")
        p.add_segment(seg)
        p.add_output(SystemOutput(seg.id, "sysA", f"hyp {i}"))
        p.add_annotation(Annotation(
            annotator_id="a1", segment_id=seg.id, system_id="sysA",
            severities=severities, adp_applicable=adp_ok))
    return p


def test_scores_report_totals_and_mean():
    report = scores_report(small_project(), CFG)
    system = report.doc["systems"][0]
    assert [s["segs"] for s in system["segments"]] == ["0.00", "0.50", "2.00", "2.00"]
    assert [s["bucket"] for s in system["segments"]] == ["NoEdit", "Minor", "Major", "Major"]
    assert system["total"] == "4.50"
    assert system["mean"] == "1.13"  # 1.125 rounded half-up
    text = render(report, "text")
    assert "Total: 4.50  Mean: 1.13" in text


def test_scores_report_from_matches_project_builder():
    p = small_project()
    direct = scores_report_from([segment_scores(p, "sysA", CFG)])
    assert direct == scores_report(p, CFG)


# -- cross-cutting -------------------------------------------------------------

def test_structured_output_is_valid_json_with_schema():
    for report in (severity_report_from(FIXTURE_DISTRIBUTIONS),
                   pattern_report_from(FIXTURE_TOTALS),
                   agreement_report_from(FIXTURE_AGREEMENT),
                   scores_report(small_project(), CFG)):
        doc = json.loads(render(report, "structured"))
        assert doc == report.doc
        assert doc["schema"] == "posteval-report/1"
        assert doc["kind"] in REPORT_KINDS


def test_delimited_contains_same_numbers_as_structured():
    report = pattern_report_from(FIXTURE_TOTALS)
    tsv = render(report, "delimited")
    lines = tsv.splitlines()
    assert lines[0].split("\t") == [
        "system", "flu", "prn", "trm", "gsmis", "adp", "grand_total", "trm_gsmis_share"]
    jais = lines[1].split("\t")
    assert jais == ["Jais", "18.00", "52.50", "48.00", "55.00", "14.00", "187.50", "55"]


def test_all_kinds_render_all_formats():
    p = random_project(random.Random(3), n_annotators=2)
    for kind in REPORT_KINDS:
        report = build_report(kind, p, p.config)
        for fmt in ("text", "delimited", "structured"):
            out = render(report, fmt)
            assert out.endswith("\n")
            a = render(build_report(kind, p, p.config), fmt)
            assert a == out  # byte-stable


def test_unknown_kind_and_format_rejected():
    with pytest.raises(ValueError):
        build_report("nope", small_project(), CFG)
    with pytest.raises(ValueError):
        render(scores_report(small_project(), CFG), "yaml")
