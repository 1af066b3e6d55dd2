import csv
import math

import numpy as np
import pytest

from islandea.experiment import (ConfigError, ExperimentConfig, ModeSpec,
                                 emit_reports, gate_curve, load_config,
                                 parse_config, read_raw_csv,
                                 render_markdown, reports_from_raw_rows,
                                 run_experiment, run_seed_entropy)

from conftest import circle_instance


def write_instance(path, inst):
    lines = ["NAME : " + inst.name, "TYPE : TSP", f"DIMENSION : {inst.dimension}",
             "EDGE_WEIGHT_TYPE : EUC_2D", "NODE_COORD_SECTION"]
    for i, (x, y) in enumerate(inst.coords, start=1):
        lines.append(f"{i} {float(x)!r} {float(y)!r}")
    lines.append("EOF")
    path.write_text("\n".join(lines))


TINY_CFG = """\
# tiny grid for tests
instance = {instance}
modes = classic,gated
alphas = 0.5
betas = 1.0
intervals = 10,20
repetitions = 2
islands = 2
subpop = 6
migration_size = 1
rounds = 5
seed = 7
out_dir = {out_dir}
"""


@pytest.fixture
def tiny_config(tmp_path):
    inst_path = tmp_path / "ring12.tsp"
    write_instance(inst_path, circle_instance(12))
    cfg_path = tmp_path / "tiny.cfg"
    cfg_path.write_text(TINY_CFG.format(instance="ring12.tsp",
                                        out_dir="results"))
    return cfg_path


class TestConfigParsing:
    def test_defaults_follow_protocol_table(self, tmp_path):
        (tmp_path / "x.tsp").write_text("")
        cfg = parse_config("instance = x.tsp\nintervals = 100",
                           base_dir=tmp_path)
        assert cfg.repetitions == 30
        assert cfg.islands == 16
        assert cfg.subpop == 100
        assert cfg.migration_size == 1
        assert cfg.rounds == 2000
        assert cfg.velocity_threshold == 5000.0
        assert cfg.p_mu0 == 0.02
        assert cfg.p_ma0 == 0.05

    def test_relative_paths_resolved_against_config(self, tiny_config):
        cfg = load_config(tiny_config)
        assert cfg.instance_path == tiny_config.parent / "ring12.tsp"
        assert cfg.out_dir == tiny_config.parent / "results"

    def test_gated_grid_expansion(self, tmp_path):
        text = ("instance = x.tsp\nintervals = 5\n"
                "modes = classic,gated\nalphas = 0.5,1.0,2.0\nbetas = 0.5,1.0,2.0")
        cfg = parse_config(text, base_dir=tmp_path)
        gated = [m for m in cfg.modes if m.name == "gated"]
        assert len(gated) == 9
        assert len(cfg.modes) == 10

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown key"):
            parse_config("instance = x.tsp\nintervals = 5\nbogus = 1")

    def test_duplicate_key_rejected(self):
        with pytest.raises(ConfigError, match="duplicate"):
            parse_config("instance = a.tsp\ninstance = b.tsp\nintervals = 5")

    def test_missing_instance_rejected(self):
        with pytest.raises(ConfigError, match="instance"):
            parse_config("intervals = 5")

    def test_repetitions_below_two_rejected(self):
        with pytest.raises(ConfigError):
            parse_config("instance = x.tsp\nintervals = 5\nrepetitions = 1")

    def test_comments_and_blanks_ignored(self, tmp_path):
        cfg = parse_config(
            "\n# comment\ninstance = x.tsp  # trailing\n\nintervals = 5\n",
            base_dir=tmp_path)
        assert cfg.intervals == [5]


class TestSeedDerivation:
    def test_reproducible(self):
        mode = ModeSpec("gated", alpha=0.5, beta=1.0)
        assert run_seed_entropy(7, mode, 100, 3) == run_seed_entropy(7, mode, 100, 3)

    def test_all_distinct_over_grid(self):
        modes = [ModeSpec("classic")] + [
            ModeSpec("gated", alpha=a, beta=b)
            for a in (0.5, 1.0, 2.0) for b in (0.5, 1.0, 2.0)]
        seen = set()
        for mode in modes:
            for interval in (100, 200, 300):
                for rep in range(30):
                    seen.add(run_seed_entropy(42, mode, interval, rep))
        assert len(seen) == 10 * 3 * 30

    def test_mode_parameters_enter_the_seed(self):
        a = run_seed_entropy(1, ModeSpec("gated", alpha=0.5, beta=1.0), 10, 0)
        b = run_seed_entropy(1, ModeSpec("gated", alpha=1.0, beta=0.5), 10, 0)
        assert a != b


class TestRunExperiment:
    def test_bookkeeping(self, tiny_config):
        cfg = load_config(tiny_config)
        reports = run_experiment(cfg, jobs=1)
        # 2 modes x 2 intervals = 4 cells, 2 runs each
        assert len(reports) == 4
        assert all(len(r.best_lengths) == 2 for r in reports)

    def test_deterministic_reports(self, tiny_config):
        cfg = load_config(tiny_config)
        a = run_experiment(cfg, jobs=1)
        b = run_experiment(cfg, jobs=1)
        assert [(r.mode.label(), r.interval, r.best_lengths) for r in a] == \
               [(r.mode.label(), r.interval, r.best_lengths) for r in b]

    def test_parallel_equals_serial(self, tiny_config):
        cfg = load_config(tiny_config)
        serial = run_experiment(cfg, jobs=1)
        parallel = run_experiment(cfg, jobs=2)
        assert [(r.mode.label(), r.interval, r.best_lengths) for r in serial] == \
               [(r.mode.label(), r.interval, r.best_lengths) for r in parallel]

    def test_gated_cells_carry_t_test(self, tiny_config):
        cfg = load_config(tiny_config)
        reports = run_experiment(cfg, jobs=1)
        for r in reports:
            if r.mode.name == "gated":
                assert r.p_value is not None
                assert r.significant is not None
            else:
                assert r.p_value is None

    def test_config_optimum_override(self, tiny_config):
        cfg = load_config(tiny_config)
        cfg.optimum = 1000
        reports = run_experiment(cfg, jobs=1)
        assert all(r.optimum == 1000 for r in reports)
        assert all(r.df == (r.mean - 1000) / 1000 for r in reports)


class TestEmission:
    @pytest.fixture
    def reports(self, tiny_config):
        cfg = load_config(tiny_config)
        return cfg, run_experiment(cfg, jobs=1)

    def test_raw_row_count(self, reports, tmp_path):
        _, reps = reports
        out = tmp_path / "out"
        emit_reports(reps, out)
        with (out / "runs.csv").open() as fh:
            rows = list(csv.reader(fh))
        assert len(rows) == 1 + 4 * 2   # header + cells x repetitions

    def test_csv_round_trip_exact(self, reports, tmp_path):
        cfg, reps = reports
        out = tmp_path / "out"
        emit_reports(reps, out)
        rows = read_raw_csv(out / "runs.csv")
        rebuilt = reports_from_raw_rows(rows, optimum=cfg.optimum)
        key = lambda r: (r.mode.label(), r.interval)
        orig = {key(r): r for r in reps}
        assert len(rebuilt) == len(reps)
        for r in rebuilt:
            o = orig[key(r)]
            assert r.best_lengths == o.best_lengths
            assert r.mean == o.mean
            assert r.stddev == o.stddev
            assert r.t_stat == o.t_stat
            assert r.p_value == o.p_value
            assert r.significant == o.significant

    def test_raw_rows_mean_matches_report(self, reports, tmp_path):
        _, reps = reports
        out = tmp_path / "out"
        emit_reports(reps, out)
        rows = read_raw_csv(out / "runs.csv")
        for rep in reps:
            cell = [r["best_length"] for r in rows
                    if (r["mode"] == rep.mode.name
                        and r["interval"] == rep.interval)]
            assert sum(cell) / len(cell) == rep.mean

    def test_markdown_flags_match_t_test(self, reports, tmp_path):
        _, reps = reports
        md = render_markdown(reps)
        for r in reps:
            if r.significant:
                assert f"{r.mean:.1f}*" in md
        assert "Welch" in md

    def test_summary_header_schema(self, reports, tmp_path):
        _, reps = reports
        out = tmp_path / "out"
        emit_reports(reps, out)
        with (out / "summary.csv").open() as fh:
            header = next(csv.reader(fh))
        assert header == ["instance", "mode", "alpha", "beta", "interval",
                          "mean", "stddev", "optimum", "DF", "t_stat",
                          "p_value", "significant"]

    def test_empty_reports_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            emit_reports([], tmp_path)


class TestGateCurve:
    def test_endpoints_and_monotone(self):
        curve = gate_curve(0.5, 1.0)
        assert len(curve) == 1001
        assert curve[0] == (0.0, 1.0)
        assert curve[-1][1] == 0.0
        ps = [p for _, p in curve]
        assert all(x >= y for x, y in zip(ps, ps[1:]))
