import csv
import json
import shutil
import subprocess
import sys

import pytest

from discourse_fca.cli import RunConfig, main
from discourse_fca.ingest import dump_jsonl
from discourse_fca.reports import read_context
from discourse_fca.synth import demo_corpus_spec, generate_corpus


@pytest.fixture(scope="module")
def synth_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("synth")
    assert main(["synth", "--out", str(out)]) == 0
    return out


@pytest.fixture(scope="module")
def ingested(synth_dir, tmp_path_factory):
    out = tmp_path_factory.mktemp("ingest")
    assert main(["ingest", str(synth_dir / "corpus.jsonl"), "--out", str(out)]) == 0
    return out


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_synth_outputs(synth_dir):
    report = json.loads((synth_dir / "synth_report.json").read_text())
    assert report["corpus_records"] == 4160
    assert report["column_sums_A"] == report["column_sums_B"]
    assert report["focus_participation"]["A"] >= 1 and report["focus_participation"]["B"] == 0
    lines = (synth_dir / "corpus.jsonl").read_text().splitlines()
    assert len(lines) == 4160


def test_synth_is_deterministic(synth_dir, tmp_path):
    assert main(["synth", "--out", str(tmp_path)]) == 0
    for name in ("corpus.jsonl", "context_A.json", "context_B.json", "synth_report.json"):
        assert (tmp_path / name).read_bytes() == (synth_dir / name).read_bytes()


def test_synth_infeasible_spec(tmp_path, capsys):
    spec = {
        "n_objects": 100, "seed": 1, "vocabulary": ["a", "b"],
        "target_marginals": {"a": 0.1, "b": 0.5},
        "coupling_plan": [{"attributes": ["a", "b"], "joint": 0.3}],
    }
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(spec))
    assert main(["synth", "--spec", str(path), "--out", str(tmp_path / "o")]) == 2
    assert "Frechet" in capsys.readouterr().err


def test_ingest_writes_both_conditions(ingested):
    for cond in ("VI", "HI"):
        weekly = read_context(ingested / "contexts" / f"{cond}_weekly.json")
        comments = read_context(ingested / "contexts" / f"{cond}_comments.json")
        assert weekly.n_attributes == comments.n_attributes == 25
        assert weekly.n_objects == 52 and comments.n_objects == 2080
    report = json.loads((ingested / "ingest_report.json").read_text())
    assert report["rejected"] == [] and report["rows_read"] == 4160


def test_ingest_empty_file(tmp_path, capsys):
    empty = tmp_path / "empty.jsonl"
    empty.write_text("")
    assert main(["ingest", str(empty), "--out", str(tmp_path / "o")]) == 2
    assert "no valid records" in capsys.readouterr().err


def test_ingest_missing_file(tmp_path):
    assert main(["ingest", str(tmp_path / "nope.jsonl"), "--out", str(tmp_path / "o")]) == 2


def test_ingest_three_bad_rows(synth_dir, tmp_path):
    lines = (synth_dir / "corpus.jsonl").read_text().splitlines()[:1000]
    bad_lines = [10, 500, 999]
    for n in bad_lines:
        row = json.loads(lines[n - 1])
        row["openness"] = 1.7
        lines[n - 1] = json.dumps(row)
    path = tmp_path / "bad.jsonl"
    path.write_text("\n".join(lines) + "\n")
    assert main(["ingest", str(path), "--out", str(tmp_path / "o")]) == 0
    report = json.loads((tmp_path / "o" / "ingest_report.json").read_text())
    assert [r["line"] for r in report["rejected"]] == bad_lines
    assert all("trait out of range" in r["reason"] for r in report["rejected"])


def test_ingest_schema_abort(tmp_path):
    path = tmp_path / "junk.jsonl"
    path.write_text("{}\n[1]\nnot json\n")
    assert main(["ingest", str(path), "--out", str(tmp_path / "o")]) == 2


def test_concepts_report(ingested, tmp_path):
    out = tmp_path / "c"
    assert main(["concepts", "--contexts", str(ingested / "contexts"), "--out", str(out)]) == 0
    payload = json.loads((out / "concepts.json").read_text())
    for cond in ("VI", "HI"):
        block = payload["conditions"][cond]
        assert block["raw_count"] >= block["filtered_count"] > 0
        assert all(len(c["intent"]) >= 3 and c["support"] >= 0.2 for c in block["filtered"])
    assert payload["config"]["min_support"] == 0.2


def test_concepts_two_by_two_grid(ingested, tmp_path):
    out = tmp_path / "c"
    args = ["concepts", "--contexts", str(ingested / "contexts"), "--out", str(out),
            "--grid-support", "0.1,0.2", "--grid-intent", "3,4"]
    assert main(args) == 0
    rows = read_csv(out / "concept_grid.csv")[1:]
    assert len(rows) == 4
    table = {(float(r[2]), int(r[1][2:])): (int(r[4]), int(r[6])) for r in rows}
    assert len({r[3] for r in rows}) == 1
    for (s, k), counts in table.items():
        for (s2, k2), counts2 in table.items():
            if s2 >= s and k2 >= k:
                assert counts2[0] <= counts[0] and counts2[1] <= counts[1]


def test_concepts_cap(ingested, tmp_path, capsys):
    args = ["concepts", "--contexts", str(ingested / "contexts"), "--out", str(tmp_path), "--max-concepts", "5"]
    assert main(args) == 3
    assert "resource cap" in capsys.readouterr().err


def test_rules_cap(ingested, tmp_path):
    args = ["rules", "--contexts", str(ingested / "contexts"), "--out", str(tmp_path), "--max-rules", "3"]
    assert main(args) == 3


def test_concepts_missing_contexts(tmp_path):
    assert main(["concepts", "--contexts", str(tmp_path), "--out", str(tmp_path / "o")]) == 2


def test_rules_sorted_deterministic_monotone(ingested, tmp_path):
    args = ["rules", "--contexts", str(ingested / "contexts")]
    assert main(args + ["--out", str(tmp_path / "r1")]) == 0
    assert main(args + ["--out", str(tmp_path / "r2"), "--workers", "2"]) == 0
    for name in ("rules.json", "rules.csv", "rule_summary.csv", "rule_grid.csv"):
        assert (tmp_path / "r1" / name).read_bytes() == (tmp_path / "r2" / name).read_bytes()
    payload = json.loads((tmp_path / "r1" / "rules.json").read_text())
    vi = payload["conditions"]["VI"]["rules"]
    assert vi
    keys = [(-r["lift"], -r["support"]) for r in vi]
    assert keys == sorted(keys)
    grid = {(g["min_support"], g["min_confidence"]): (g["HI"], g["VI"]) for g in payload["grid"]}
    assert len(grid) == 6
    for (s, c), n in grid.items():
        for (s2, c2), n2 in grid.items():
            if s2 >= s and c2 >= c:
                assert n2[0] <= n[0] and n2[1] <= n[1]


def test_compare_focus_in_one_condition(ingested, synth_dir, tmp_path):
    out = tmp_path / "cmp"
    args = ["compare", "--contexts", str(ingested / "contexts"), "--records", str(synth_dir / "corpus.jsonl"),
            "--out", str(out)]
    assert main(args) == 0
    payload = json.loads((out / "compare.json").read_text())
    part = payload["focus_participation"]
    assert (part["VI"] > 0) != (part["HI"] > 0)
    assert part["VI"] > 0
    for name in ("prevalence.csv", "concept_histograms.csv", "topic_profiles.csv", "crosssection.csv"):
        assert (out / name).exists()
    assert len(read_csv(out / "crosssection.csv")) == 7


def test_compare_identical_inputs(ingested, tmp_path):
    ctx_dir = tmp_path / "ctx"
    ctx_dir.mkdir()
    for kind in ("weekly", "comments"):
        src = ingested / "contexts" / f"VI_{kind}.json"
        shutil.copy(src, ctx_dir / f"VI_{kind}.json")
        shutil.copy(src, ctx_dir / f"HI_{kind}.json")
    assert main(["compare", "--contexts", str(ctx_dir), "--out", str(tmp_path / "o")]) == 0
    intents = json.loads((tmp_path / "o" / "compare.json").read_text())["intents"]
    assert intents["HI_only"] == [] and intents["VI_only"] == [] and intents["shared"]


def test_compare_missing_condition(tmp_path, capsys):
    records = generate_corpus(demo_corpus_spec(), "VI", n_weeks=4)
    path = tmp_path / "vi.jsonl"
    path.write_text(dump_jsonl(records))
    assert main(["ingest", str(path), "--out", str(tmp_path / "i")]) == 0
    rc = main(["compare", "--contexts", str(tmp_path / "i" / "contexts"), "--out", str(tmp_path / "o")])
    assert rc == 2
    assert "HI" in capsys.readouterr().err


def test_provenance_excludes_run_specific_fields():
    cfg = RunConfig(input="/some/where/data.jsonl", out="/tmp/x", workers=4, contexts="/tmp/c")
    prov = cfg.provenance()
    assert prov["input"] == "data.jsonl"
    assert "out" not in prov and "workers" not in prov and "contexts" not in prov
    assert prov["rule_min_lift"] == 1.2 and prov["min_intent"] == 3


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "discourse_fca.cli", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    for cmd in ("ingest", "concepts", "rules", "compare", "synth", "report"):
        assert cmd in proc.stdout
