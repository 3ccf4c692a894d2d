import json

import pytest

from lienard_audit.audit import (
    ANCHORS,
    IMPLEMENTED_EQUATIONS,
    REPORT_ONLY,
    AuditCheck,
    AuditConfig,
    AuditReport,
    render_report,
    run_full_audit,
)


@pytest.fixture(scope="module")
def report():
    return run_full_audit()


def test_every_check_has_an_implemented_anchor(report):
    assert set(ANCHORS) == {c.id for c in report.checks}
    for c in report.checks:
        assert c.paper_anchor == ANCHORS[c.id]
        assert c.paper_anchor in IMPLEMENTED_EQUATIONS


def test_ids_unique_and_ordered(report):
    ids = [c.id for c in report.checks]
    assert len(ids) == len(set(ids))
    assert ids == list(ANCHORS)


def test_default_run_is_green(report):
    assert report.ok
    failing = [c.id for c in report.checks if c.status == "FAIL"]
    assert failing == []


def test_report_only_never_gates(report):
    for c in report.checks:
        assert (c.status == "REPORT-ONLY") == (c.id in REPORT_ONLY)


def test_named_values(report):
    assert report.by_id("theta_c").residual < 1e-12
    assert report.by_id("eq29_t0").residual == pytest.approx(5.0, abs=1e-9)
    assert report.by_id("eq57_alpha_minus").residual == pytest.approx(0.3038232, abs=1e-6)
    assert report.by_id("consistent_G_vs_eq34").residual == pytest.approx(0.4730, abs=1e-3)
    c = report.by_id("commutator_nonzero")
    assert c.status == "PASS" and "2.625828577461439i" in c.witness


def test_json_schema(report):
    data = json.loads(render_report(report, "json"))
    assert data["schema"] == 1
    assert data["config"]["branch"] == "upper"
    assert all("wall_time" not in c for c in data["checks"])
    assert {c["status"] for c in data["checks"]} <= {"PASS", "FAIL", "REPORT-ONLY"}


def test_timings_opt_in():
    r = AuditReport(AuditConfig(timings=True), [AuditCheck("x", "Eq 7", 0.0, 1.0, True, None, 0.5)])
    assert json.loads(render_report(r))["checks"][0]["wall_time"] == 0.5


def test_empty_report():
    data = json.loads(render_report(AuditReport(AuditConfig())))
    assert data["checks"] == [] and "config" in data


def test_table_rows():
    r = AuditReport(AuditConfig(), [
        AuditCheck("ok", "Eq 7", 0.0, 1.0, True),
        AuditCheck("bad", "Eq 8", 2.0, 1.0, True, "the witness"),
    ])
    lines = render_report(r, "table").splitlines()
    assert "PASS" in lines[1]
    assert "FAIL" in lines[2] and "the witness" in lines[2]
    assert not r.ok
    with pytest.raises(ValueError):
        render_report(r, "xml")


def test_non_finite_residual_is_null():
    r = AuditReport(AuditConfig(), [AuditCheck("x", "Eq 7", float("inf"), 1.0, False)])
    assert json.loads(render_report(r))["checks"][0]["residual"] is None


def test_deterministic_json():
    cfg = AuditConfig(branch="lower")
    assert render_report(run_full_audit(cfg)) == render_report(run_full_audit(cfg))


@pytest.mark.parametrize("branch, k", [("upper", 1), ("lower", 2)])
def test_complex_roots_stay_green(branch, k):
    r = run_full_audit(AuditConfig(branch=branch, root_index=k))
    assert r.ok
    assert r.by_id("bernoulli_branch").status == "REPORT-ONLY"


def test_tight_tolerance_fails_gate():
    assert not run_full_audit(AuditConfig(tol=1e-30)).ok
