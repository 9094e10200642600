import csv
import io
import json

import numpy as np
import pytest

from rwsqaoa.bench.cli import main
from rwsqaoa.bench.config import ConfigError, InstanceFamily, load_config, parse_config
from rwsqaoa.bench.records import ExperimentRecord, RecordStore, read_records, records_to_csv
from rwsqaoa.bench.suite import (crossover_report, format_table, instance_family, paired_margins,
                                 qaoa_pipeline, run_suite, summary_table)
from rwsqaoa.classical.multistart import parallel_multistart
from rwsqaoa.graphs import brute_force_maxcut, generate_random_regular, laplacian_qubo
from rwsqaoa.qaoa import QaoaSchedule
from rwsqaoa.warmstart import OptimizerConfig, optimize_warmstart, rws_energy

SMALL = {"instances": {"n": 12, "degree": 3, "count": 10, "seed": 0},
         "solvers": {"brute": {}, "bm": {"rounds": 3}, "bm-ls": {"rounds": 3}}}


@pytest.fixture(scope="module")
def small_records():
    return run_suite(parse_config(SMALL))


class TestSuite:
    def test_roster_on_ten_instances(self, small_records):
        assert len(small_records) == 30
        brute = {r.instance_id: r.cut_value for r in small_records if r.solver == "brute"}
        for r in small_records:
            assert r.cut_value <= brute[r.instance_id]
            assert r.approx_ratio == pytest.approx(r.cut_value / brute[r.instance_id])

    def test_empty_roster(self):
        assert run_suite(parse_config({"instances": {"n": 12}})) == []

    def test_rerun_reproduces_cut_columns(self, small_records):
        again = run_suite(parse_config(SMALL))
        assert [(r.instance_id, r.solver, r.cut_value) for r in again] == \
               [(r.instance_id, r.solver, r.cut_value) for r in small_records]

    def test_parallel_matches_serial(self, small_records):
        cfg = parse_config(SMALL).with_overrides(workers=2)
        assert [r.cut_value for r in run_suite(cfg)] == [r.cut_value for r in small_records]

    def test_store_and_csv(self, tmp_path):
        cfg = parse_config({**SMALL, "instances": {"n": 12, "count": 2},
                            "output": {"records": str(tmp_path / "r.jsonl"), "csv": str(tmp_path / "r.csv")}})
        recs = run_suite(cfg)
        stored = read_records(tmp_path / "r.jsonl")
        assert [r.cut_value for r in stored] == [r.cut_value for r in recs]
        rows = list(csv.DictReader(io.StringIO((tmp_path / "r.csv").read_text())))
        assert len(rows) == len(recs) and rows[0]["instance_id"] == recs[0].instance_id

    def test_replay_from_record(self, small_records):
        r = next(r for r in small_records if r.solver == "bm-ls")
        i = int(r.instance_id.rsplit("-", 1)[1])
        g = generate_random_regular(12, 3, seed=[0, i])
        again = parallel_multistart(g, "bm-ls", r.metrics["runs"], 0.0, seed=r.seed, params={"rounds": 3})
        assert again.best.value == r.cut_value

    def test_instance_ids(self):
        ids = [iid for iid, _ in instance_family(InstanceFamily(n=10, degree=3, count=3, seed=5))]
        assert ids == ["rr3-n10-s5-0", "rr3-n10-s5-1", "rr3-n10-s5-2"]


class TestCrossover:
    def test_half_is_always_reached(self, small_records):
        rows = crossover_report(small_records, 0.5)
        assert rows and all(r["status"] == "reached" and r["reached"] == r["instances"] for r in rows)
        assert all(r["mean_time_s"] > 0 for r in rows)

    def test_above_one_is_unreached(self, small_records):
        rows = crossover_report(small_records, 1.01)
        assert all(r["status"] == "unreached" and r["mean_time_s"] is None for r in rows)

    def test_brute_force_target(self):
        cfg = parse_config({"instances": {"n": 12, "count": 20, "seed": 3},
                            "solvers": {"brute": {}, "bm": {"rounds": 20, "runs": 3}}})
        recs = run_suite(cfg)
        target = {r.instance_id: r.cut_fraction for r in recs if r.solver == "brute"}
        row = next(r for r in crossover_report(recs, target) if r["solver"] == "bm")
        assert row["reached"] >= 0.95 * row["instances"]

    def test_callable_target(self, small_records):
        rows = crossover_report(small_records, lambda iid: 0.5)
        assert rows == crossover_report(small_records, 0.5)


@pytest.fixture(scope="module")
def family():
    return [g for _, g in instance_family(InstanceFamily(n=16, degree=3, count=20, seed=1))]


class TestPipeline:
    def test_depth_one_beats_warm_start_on_average(self, family):
        p0 = [qaoa_pipeline(g, 3, 0).cut_fraction for g in family]
        p1 = [qaoa_pipeline(g, 3, 1).cut_fraction for g in family]
        assert np.mean(p1) > np.mean(p0)

    def test_depth_zero_is_warm_start_energy(self, family):
        g = family[0]
        rec = qaoa_pipeline(g, 3, 0)
        ws = optimize_warmstart(g, 0.6, OptimizerConfig(seed=0))
        energy = rws_energy(laplacian_qubo(g), ws.probs)
        assert rec.cut_fraction == pytest.approx(-energy / g.m, abs=1e-12)
        assert rec.metrics["warm_start_fraction"] == pytest.approx(rec.cut_fraction, abs=1e-12)

    def test_zero_schedule_equals_depth_zero(self, family):
        g = family[1]
        zero = qaoa_pipeline(g, 3, 2, "explicit", QaoaSchedule((0.0, 0.0), (0.0, 0.0)))
        assert zero.cut_fraction == pytest.approx(qaoa_pipeline(g, 3, 0).cut_fraction, abs=1e-12)

    def test_lightcone_engine_for_larger_graphs(self):
        g = generate_random_regular(40, 3, seed=0)
        rec = qaoa_pipeline(g, 3, 1)
        assert rec.metrics["engine"] == "lightcone" and 0 < rec.cut_fraction < 1

    def test_sampling_metrics(self, family):
        g = family[2]
        f_max = brute_force_maxcut(g).f_max
        rec = qaoa_pipeline(g, 3, 1, shots=200, local_search=True, f_max=f_max)
        m = rec.metrics
        assert m["best_sample_ls_value"] >= m["best_sample_value"]
        assert m["best_sample_ratio"] <= 1.0

    def test_bad_source(self, family):
        with pytest.raises(ValueError):
            qaoa_pipeline(family[0], 3, 1, "fitted")
        with pytest.raises(ValueError):
            qaoa_pipeline(family[0], 3, 1, "magic", QaoaSchedule((0.1,), (0.1,)))

    def test_suite_runs_qaoa_depths(self):
        cfg = parse_config({"instances": {"n": 10, "count": 3},
                            "solvers": {"bm": {}, "rws-qaoa": {"p": [0, 1]}}})
        recs = run_suite(cfg)
        assert [r.label for r in recs[:3]] == ["bm", "rws-qaoa[p=0]", "rws-qaoa[p=1]"]
        rows = paired_margins(recs, "bm")
        assert {r["solver"] for r in rows} == {"rws-qaoa[p=0]", "rws-qaoa[p=1]"}
        assert {r["solver"] for r in summary_table(recs)} == {"bm", "rws-qaoa[p=0]", "rws-qaoa[p=1]"}


class TestConfig:
    def test_unknown_keys(self):
        for bad in ({"bogus": 1}, {"instances": {"size": 3}}, {"solvers": {"bm": {"speed": 2}}},
                    {"solvers": {"qbsolv": {}}}, {"workers": 0}, {"crossover": {"target": "x"}},
                    {"solvers": {"rws-qaoa": {"source": "fitted"}}}):
            with pytest.raises(ConfigError):
                parse_config(bad)

    def test_env_override(self, monkeypatch):
        monkeypatch.setenv("RWSQAOA_WORKERS", "3")
        assert parse_config({"workers": 1}).workers == 3
        monkeypatch.setenv("RWSQAOA_WORKERS", "many")
        with pytest.raises(ConfigError):
            parse_config({})

    def test_toml_file(self, tmp_path):
        (tmp_path / "c.toml").write_text('# comment\nworkers = 2\n[instances]\nn = 14\n[solvers.sb]\nsteps = 100\n')
        cfg = load_config(tmp_path / "c.toml")
        assert cfg.workers == 2 and cfg.instances.n == 14 and cfg.solvers == {"sb": {"steps": 100}}
        (tmp_path / "bad.toml").write_text("workers = \n")
        with pytest.raises(ConfigError):
            load_config(tmp_path / "bad.toml")


class TestRecords:
    def rec(self, **kw):
        base = dict(instance_id="a", solver="bm", config={}, seed=0, wall_ms=1.0, cut_value=3, cut_fraction=0.5)
        base.update(kw)
        return ExperimentRecord(**base)

    def test_invariants(self):
        with pytest.raises(ValueError):
            self.rec(cut_fraction=1.2)
        with pytest.raises(ValueError):
            self.rec(success=True, approx_ratio=0.9)
        assert self.rec(success=True, approx_ratio=1.0).success

    def test_round_trip_and_truncated_tail(self, tmp_path):
        store = RecordStore(tmp_path / "s.jsonl")
        store.extend([self.rec(seed=1), self.rec(seed=2)])
        with open(store.path, "a") as fh:
            fh.write('{"instance_id": "a", "sol')
        recs = store.read()
        assert [r.seed for r in recs] == [1, 2]

    def test_corruption_mid_file_raises(self, tmp_path):
        p = tmp_path / "s.jsonl"
        p.write_text("{broken\n" + self.rec().to_json() + "\n")
        with pytest.raises(json.JSONDecodeError):
            read_records(p)

    def test_csv(self):
        text = records_to_csv([self.rec(metrics={"p": 2}, solver="rws-qaoa")])
        row = list(csv.DictReader(io.StringIO(text)))[0]
        assert row["label"] == "rws-qaoa[p=2]" and row["success"] == ""

    def test_format_table(self):
        rows = [{"a": 1, "b": 0.5}, {"a": 2, "b": None}]
        assert json.loads(format_table(rows, "json")) == rows
        assert format_table(rows, "csv").splitlines()[0] == "a,b"
        assert format_table(rows).splitlines()[0].split() == ["a", "b"]
        assert format_table([]) == ""


class TestCli:
    def test_gen_and_solve(self, tmp_path, capsys):
        gpath = tmp_path / "g.json"
        assert main(["gen", "--n", "12", "--degree", "3", "--seed", "1", "--out", str(gpath)]) == 0
        assert main(["solve", "bm-ls", "--graph", str(gpath), "--runs", "2", "--target", "0.5"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["cut_value"] <= brute_force_maxcut(generate_random_regular(12, 3, seed=1)).f_max

    def test_warmstart_and_qaoa(self, tmp_path, capsys):
        gpath, wpath = tmp_path / "g.json", tmp_path / "w.json"
        main(["gen", "--n", "10", "--out", str(gpath)])
        assert main(["warmstart", "--graph", str(gpath), "--lam", "0.6", "--out", str(wpath)]) == 0
        capsys.readouterr()
        assert main(["qaoa-expect", "--graph", str(gpath), "--p", "1", "--warmstart", str(wpath)]) == 0
        a = json.loads(capsys.readouterr().out)
        assert main(["qaoa-expect", "--graph", str(gpath), "--p", "1", "--warmstart", str(wpath), "--lightcone"]) == 0
        b = json.loads(capsys.readouterr().out)
        assert a["expected_cut"] == pytest.approx(b["expected_cut"], abs=1e-10)
        assert main(["qaoa-sample", "--graph", str(gpath), "--p", "1", "--shots", "100"]) == 0
        assert json.loads(capsys.readouterr().out)["shots"] == 100

    def test_resources(self, capsys):
        assert main(["resources", "--n", "1000", "100000"]) == 0
        rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
        assert [int(r["distance"]) for r in rows] == [15, 19]

    def test_fit_params(self, tmp_path, capsys):
        out = tmp_path / "s.json"
        assert main(["fit-params", "--n", "20", "--graphs", "2", "--K", "20", "--restarts", "1",
                     "--steps", "5", "--out", str(out)]) == 0
        assert QaoaSchedule.from_json(out.read_text()).p == 1

    def test_suite_and_crossover(self, tmp_path, capsys):
        cfg = tmp_path / "c.toml"
        rec = tmp_path / "r.jsonl"
        cfg.write_text('[instances]\nn = 10\ncount = 2\n[solvers.bm]\n[solvers.ls]\n[crossover]\ntarget = 0.5\n')
        assert main(["suite", "--config", str(cfg), "--records", str(rec), "--format", "csv"]) == 0
        assert "mean_margin" in capsys.readouterr().out
        assert main(["crossover", "--records", str(rec), "--target", "0.5"]) == 0
        assert "reached" in capsys.readouterr().out

    def test_exit_codes(self, tmp_path, capsys):
        assert main(["gen", "--n", "5", "--degree", "3"]) == 3
        bad = tmp_path / "bad.toml"
        bad.write_text("[solvers.nope]\n")
        assert main(["suite", "--config", str(bad)]) == 2
        assert main(["suite", "--config", str(tmp_path / "missing.toml")]) == 2
        with pytest.raises(SystemExit) as exc:
            main(["solve", "nope", "--graph", "x"])
        assert exc.value.code == 2
