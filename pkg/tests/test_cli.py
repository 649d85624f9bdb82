import json

import pytest

from collabsec.cli import main


def run_ok(*argv):
    assert main([str(a) for a in argv]) == 0


@pytest.fixture
def enriched(tmp_path):
    records = tmp_path / "records.jsonl"
    records.write_text(
        "\n".join(
            json.dumps(r)
            for r in [
                {"paper_id": "p1", "emails": ["A@uni.edu", "b@uni.edu", "c@uni.edu"]},
                {"paper_id": "p2", "emails": ["a@uni.edu", "b@uni.edu", "x@other.org"]},
                {"paper_id": "p3", "emails": ["c@uni.edu", "d@uni.edu"]},
                {"paper_id": "p4", "emails": ["y@uni.edu", "z@uni.edu"]},
            ]
        )
        + "\n"
    )
    fixture = tmp_path / "fixture.json"
    breach = {"Name": "Svc", "Domain": "svc.com", "BreachDate": "2019-01-01", "DataClasses": []}
    fixture.write_text(json.dumps({"a@uni.edu": [breach] * 3, "c@uni.edu": [breach] * 2}))
    run_ok("build", "--records", records, "--domain", "uni.edu", "--out", tmp_path / "g.json")
    run_ok("enrich", "--network", tmp_path / "g.json", "--fixture", fixture, "--out", tmp_path / "e.json")
    return tmp_path / "e.json"


def test_build_and_enrich(enriched):
    data = json.loads(enriched.read_text())
    assert [n["email"] for n in data["nodes"]] == ["a@uni.edu", "b@uni.edu", "c@uni.edu", "d@uni.edu"]
    assert [n["breach_count"] for n in data["nodes"]] == [3, 0, 2, 0]
    assert {(e["u"], e["v"]): e["weight"] for e in data["edges"]}[(0, 1)] == 2


def test_characterize(enriched, tmp_path):
    run_ok("metrics", "--network", enriched, "--out", tmp_path / "m.json")
    metrics = json.loads((tmp_path / "m.json").read_text())
    assert metrics["n_nodes"] == 4 and metrics["n_edges"] == 4
    run_ok("mst", "--network", enriched, "--out", tmp_path / "t.json")
    tree = json.loads((tmp_path / "t.json").read_text())
    assert len(tree["edges"]) == 3 and tree["total_weight"] == 4
    run_ok("communities", "--network", enriched, "--k", 2, "--seed", 1,
           "--out", tmp_path / "c.json", "--dot", tmp_path / "c.dot", "--redact")
    part = json.loads((tmp_path / "c.json").read_text())
    assert set(part["assignment"].values()) == {0, 1}
    assert "fillcolor" in (tmp_path / "c.dot").read_text()
    run_ok("histogram", "--network", enriched, "--out", tmp_path / "h.json")
    assert json.loads((tmp_path / "h.json").read_text()) == {"0": 2, "2": 1, "3": 1}


def test_simulate_and_report(enriched, tmp_path):
    out = tmp_path / "sim"
    run_ok("simulate", "--network", enriched, "--runs", 3, "--iterations", 20, "--seed", 9, "--out-dir", out)
    assert sorted(p.name for p in out.iterdir()) == [
        "trace_0.csv", "trace_1.csv", "trace_2.csv", "trends.csv", "vulnerability.json",
    ]
    assert (out / "trends.csv").read_text().splitlines()[0] == "t,s_mean,e_mean,i_mean,r_mean"
    assert len((out / "trace_0.csv").read_text().splitlines()) == 22
    run_ok("report", "--network", enriched, "--trends", out / "trends.csv",
           "--vulnerability", out / "vulnerability.json", "--out-dir", tmp_path / "fig")
    assert {p.name for p in (tmp_path / "fig").iterdir()} == {"trends.svg", "histogram.svg", "network.svg"}


def test_redacted_vulnerability_feeds_report(enriched, tmp_path):
    out = tmp_path / "sim"
    run_ok("simulate", "--network", enriched, "--runs", 2, "--redact", "--out-dir", out)
    assert "@" not in (out / "vulnerability.json").read_text()
    run_ok("report", "--network", enriched, "--trends", out / "trends.csv",
           "--vulnerability", out / "vulnerability.json", "--out-dir", tmp_path / "fig")


def test_export(enriched, tmp_path):
    run_ok("export", "--network", enriched, "--format", "graphml", "--redact", "--out", tmp_path / "g.graphml")
    assert "@" not in (tmp_path / "g.graphml").read_text()
    run_ok("export", "--network", enriched, "--format", "dot", "--out", tmp_path / "g.dot")
    assert "a@uni.edu" in (tmp_path / "g.dot").read_text()


def test_extract(tmp_path):
    snippets = tmp_path / "snippets.txt"
    snippets.write_text("Contact a@x.edu, b@x.edu.\n\n{c, d}@x.edu and none\n")
    run_ok("extract", "--snippets", snippets, "--out", tmp_path / "r.jsonl")
    lines = [json.loads(l) for l in (tmp_path / "r.jsonl").read_text().splitlines()]
    assert lines == [
        {"paper_id": "snippet-1", "emails": ["a@x.edu", "b@x.edu"]},
        {"paper_id": "snippet-3", "emails": ["d@x.edu"]},
    ]


def test_synth(tmp_path):
    run_ok("synth", "--nodes", 30, "--edges", 60, "--breaches", "0:10,3:20", "--seed", 2, "--out", tmp_path / "s.json")
    data = json.loads((tmp_path / "s.json").read_text())
    assert len(data["nodes"]) == 30 and len(data["edges"]) == 60


def test_error_json(tmp_path, capsys):
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"paper_id": "p1"}\n')
    assert main(["build", "--records", str(bad), "--domain", "x.edu", "--out", str(tmp_path / "g.json")]) == 1
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "record_parse" and "line 1" in err["message"]


def test_no_seed_error(tmp_path, capsys):
    run_ok("synth", "--nodes", 5, "--edges", 4, "--breaches", "0:5", "--out", tmp_path / "s.json")
    assert main(["simulate", "--network", str(tmp_path / "s.json"), "--out-dir", str(tmp_path / "o")]) == 1
    assert json.loads(capsys.readouterr().err)["error"] == "no_seed"


def test_missing_file(tmp_path, capsys):
    assert main(["metrics", "--network", str(tmp_path / "nope.json"), "--out", str(tmp_path / "m.json")]) == 1
    assert json.loads(capsys.readouterr().err)["error"] == "io"
