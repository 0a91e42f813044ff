import json

import numpy as np

from agslice import verify


def test_subset_and_round_trip():
    timings = {}
    rep = verify.run_suite(3, only={"01", "02", "10"}, timings=timings)
    assert [c.key for c in rep.checks] == ["01", "02", "10"]
    assert set(timings) == {"01", "02", "10"}
    assert rep.summary == {"total": 3, "passed": 3, "failed": 0}
    back = verify.VerificationReport.from_dict(json.loads(rep.to_json()))
    assert back.to_json() == rep.to_json()
    assert all(c.anchor and c.seed == 3 for c in rep.checks)


def test_crashed_check_is_a_failure(monkeypatch):
    def boom(seed):
        raise RuntimeError("broken")
    monkeypatch.setitem(verify.CHECKS, "01", boom)
    rep = verify.run_suite(7, only={"01"})
    (c,) = rep.checks
    assert c.status == "FAIL" and c.detail["error"] == "RuntimeError: broken"
    assert json.loads(rep.to_json())["checks"][0]["max_error"] == "inf"


def test_seed_changes_samples():
    a = verify.run_suite(1, only={"03"}).to_json()
    b = verify.run_suite(2, only={"03"}).to_json()
    assert a != b


def test_clean_types():
    out = verify._clean({1: (np.float64(0.5), np.int64(2), np.bool_(True), float("nan"))})
    assert out == {"1": [0.5, 2, True, "nan"]}
    assert type(out["1"][1]) is int and type(out["1"][2]) is bool
