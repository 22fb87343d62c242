import json
import subprocess

import pytest

from rbocoop import io


def test_cli_outputs_readable(cli, tmp_path):
    subprocess.run(
        [cli, "run", "--preset", "single-change-demo", "--policies", "rbo-coop-ucb,glr-ucb",
         "--reps", "2", "--seed", "5", "--out", str(tmp_path)],
        check=True, capture_output=True,
    )
    summary = io.read_summary(tmp_path / "summary.json")
    assert set(summary["policies"]) == {"rbo-coop-ucb", "glr-ucb"}
    for name in summary["policies"]:
        trace = io.read_trace(tmp_path / f"{name}.trace.csv")
        regret = io.read_regret(tmp_path / f"{name}.regret.csv")
        io.read_events(tmp_path / f"{name}.events.csv")
        assert {r["replication"] for r in trace} == {1, 2}
        assert regret[-1]["t"] == max(r["t"] for r in trace)
        assert all(r["cum_group_regret"] >= -1e-9 for r in trace)


def test_header_mismatch(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("t,mean\n1,0.5\n")
    with pytest.raises(ValueError, match="header"):
        io.read_regret(p)


def test_field_count_mismatch(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("t,mean,std\n1,0.5\n")
    with pytest.raises(ValueError, match="line 2"):
        io.read_regret(p)


def test_unknown_event_kind(tmp_path):
    p = tmp_path / "ev.csv"
    p.write_text("replication,t,agent,kind,arm,obs_index\n1,5,1,alarm,2,3\n")
    with pytest.raises(ValueError, match="kind"):
        io.read_events(p)


def test_summary_schema(tmp_path):
    p = tmp_path / "s.json"
    p.write_text(json.dumps({"policies": {}}))
    with pytest.raises(ValueError):
        io.read_summary(p)
