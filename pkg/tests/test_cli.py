import csv
import io
import json
import subprocess
import sys

import pytest

from holospt import cli
from holospt.experiments import REGISTRY, Experiment


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.main(argv, out, err)
    return code, out.getvalue(), err.getvalue()


def write_config(tmp_path, cfg, name="c.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return str(p)


def test_list_catalog():
    code, out, _ = run(["list", "--json"])
    assert code == 0
    cat = json.loads(out)
    assert len(cat) >= 8
    assert all(e["anchor"] for e in cat)
    assert [e["name"] for e in cat] == list(REGISTRY)
    code, text, _ = run(["list"])
    assert code == 0 and len(text.strip().splitlines()) == len(cat)


def test_duality_check_records(tmp_path):
    cfg = write_config(tmp_path, {"experiment": "duality-check", "params": {"N": 3, "replicas": 4}})
    out_path = tmp_path / "r.ndjson"
    csv_path = tmp_path / "r.csv"
    code, out, _ = run(["run", "--config", cfg, "--output", str(out_path), "--csv", str(csv_path), "--json"])
    assert code == 0
    recs = [json.loads(line) for line in out_path.read_text().splitlines()]
    assert len(recs) == 3
    for r in recs:
        for key in ("module_version", "config_hash", "tolerance", "anchor", "seed", "timestamp"):
            assert key in r
        v = r["values"]
        assert {"twisted_renyi", "strange_correlator", "max_deviation"} <= set(v)
        assert v["max_deviation"] < 1e-10
    summary = json.loads(out)
    assert summary["records"] == 3
    rows = list(csv.reader(csv_path.open()))
    assert rows[0] == ["experiment", "index", "key", "value"] and len(rows) > 3


def test_corner_family_record():
    code, out, _ = run(["run", "--config", "/dev/null"])
    assert code == 2
    jobs = cli.validate_config({"experiment": "corner-family", "params": {"presets": ["conjugation"]}})
    recs = cli.run_jobs(jobs, cli.DEFAULT_SEED)
    assert len(recs) == 2
    assert {"family_dimension", "negativity_max", "bell_states_satisfy"} <= set(recs[0]["values"])


def test_kmatrix_record():
    jobs = cli.validate_config({"experiment": "kmatrix", "params": {"theories": ["sspt4d"]}})
    rec = cli.run_jobs(jobs, 1)[0]["values"]
    assert rec["allowed"] == [[1, -1, 1, -1]]
    assert rec["gappable"]["residual_modes"] == 2


def test_same_seed_same_values():
    jobs = cli.validate_config({"experiment": "uhlmann", "params": {"pairs": 3}})
    a = cli.run_jobs(jobs, 42)
    b = cli.run_jobs(jobs, 42)
    c = cli.run_jobs(jobs, 43)
    assert cli.records_digest(a) == cli.records_digest(b)
    assert a[0]["config_hash"] != c[0]["config_hash"]


def test_digest_ignores_timestamp():
    r = [{"experiment": "x", "values": {"a": 1}}]
    assert cli.records_digest(r) == cli.records_digest([{**r[0], "timestamp": "now"}])


@pytest.mark.parametrize("cfg", [
    {"experiment": "nope"},
    {"experiment": "renyi2", "params": {"N": [99]}},
    {"experiment": "renyi2", "params": {"bogus": 1}},
    {"experiment": "renyi2", "experiments": [{"experiment": "renyi2"}]},
    {"experiment": "renyi2", "seed": -1},
    {"experiment": "renyi2", "extra": True},
])
def test_invalid_configs_exit_2(tmp_path, cfg):
    code, _, err = run(["validate", "--config", write_config(tmp_path, cfg)])
    assert code == 2 and "invalid config" in err
    code, _, _ = run(["run", "--config", write_config(tmp_path, cfg)])
    assert code == 2


def test_validate_fills_defaults(tmp_path):
    code, out, _ = run(["validate", "--config", write_config(tmp_path, {"experiment": "renyi2"})])
    assert code == 0
    assert json.loads(out)["jobs"][0]["params"] == {"N": [3, 4]}


def test_size_cap_exit_4(tmp_path):
    cfg = write_config(tmp_path, {"experiment": "channel", "params": {"lattices": [[3, 3]]}})
    code, _, err = run(["run", "--config", cfg])
    assert code == 4 and "size cap" in err


def test_numerical_failure_exit_3(tmp_path, monkeypatch):
    def boom(p, rng):
        raise ZeroDivisionError("normalization vanishes")

    monkeypatch.setitem(REGISTRY, "boom", Experiment("boom", "test", boom))
    code, _, err = run(["run", "--config", write_config(tmp_path, {"experiment": "boom"})])
    assert code == 3 and "numerical failure" in err


def test_bad_seed_and_missing_args():
    assert run(["run", "--all", "--seed", str(2**64)])[0] == 2
    assert run(["run"])[0] == 2
    assert run(["frobnicate"])[0] == 2


def test_parallel_matches_sequential():
    jobs = cli.validate_config({"experiments": [{"experiment": "renyi2"}, {"experiment": "hotsc-block"},
                                                {"experiment": "symmetry-1d", "params": {"N": [2]}}]})
    assert cli.records_digest(cli.run_jobs(jobs, 7)) == cli.records_digest(cli.run_jobs(jobs, 7, n_workers=3))


def test_console_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "holospt.cli", "list", "--json"], capture_output=True, text=True)
    assert res.returncode == 0
    assert len(json.loads(res.stdout)) == len(REGISTRY)
