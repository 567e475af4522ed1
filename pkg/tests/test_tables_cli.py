import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chernoffdp import cli
from chernoffdp.cli import SWEEP_COLUMNS, SweepConfig, main, run_figure2_sweep
from chernoffdp.tables import Table, round12


class TestTable:
    def test_append_dict_and_list(self):
        t = Table(["a", "b"])
        t.append({"a": 1, "b": 2})
        t.append([3, math.inf])
        assert t.column("b") == [2.0, math.inf]
        assert t.records()[0] == {"a": 1.0, "b": 2.0}

    def test_wrong_width(self):
        with pytest.raises(ValueError):
            Table(["a"]).append([1, 2])

    def test_inf_spelling(self):
        t = Table(["x"])
        t.append([math.inf])
        assert t.to_csv().splitlines()[1] == "inf"
        assert '"inf"' in t.to_json()

    def test_unknown_format(self):
        with pytest.raises(ValueError):
            Table(["x"]).dumps("xml")

    @settings(max_examples=200)
    @given(st.lists(st.lists(st.floats(allow_nan=False), min_size=3, max_size=3), max_size=10))
    def test_roundtrip(self, rows):
        t = Table(["a", "b", "c"])
        for r in rows:
            t.append(r)
        assert Table.from_csv(t.to_csv()) == t
        assert Table.from_json(t.to_json()) == t

    @given(st.floats(allow_nan=False, allow_infinity=False))
    def test_round12_idempotent(self, v):
        assert round12(round12(v)) == round12(v)


class TestSweep:
    def test_shape_and_sentinel(self):
        cfg = SweepConfig(epsilon_grid=[0.1, 0.5], delta_mu_multipliers=[1, 2], theta_values=[1, 1.5])
        t = run_figure2_sweep(cfg)
        assert t.columns == SWEEP_COLUMNS
        assert len(t.rows) == 8
        for r in t.records():
            if r["theta"] == 1:
                assert math.isfinite(r["epsilon_dp_level"])
                assert abs(r["epsilon_dp_level"] - r["delta_mu_multiplier"] * r["epsilon"]) < 1e-6
            else:
                assert r["epsilon_dp_level"] == math.inf
            assert r["chernoff_numeric"] <= r["kl_numeric"] + 1e-9
            assert abs(r["kl_numeric"] - r["kl_closed_form"]) < 1e-6

    @pytest.mark.parametrize(
        "kw",
        [
            dict(epsilon_grid=[]),
            dict(epsilon_grid=[0.5, 0.1]),
            dict(epsilon_grid=[1.2]),
            dict(theta_values=[0.5]),
            dict(sensitivity=0),
            dict(format="xml"),
        ],
    )
    def test_config_validation(self, kw):
        with pytest.raises(cli.ConfigError):
            SweepConfig(**kw)


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


class TestCli:
    def test_divergence(self, capsys):
        code, out, _ = run(["divergence", "--epsilon", "1", "--delta-mu", "1"], capsys)
        assert code == 0
        d = json.loads(out)
        assert abs(d["kl_numeric"] - math.exp(-1)) < 1e-6
        assert d["epsilon_dp_level"] == pytest.approx(1.0, abs=1e-6)
        assert d["chernoff_closed_form_minus_numeric"] > 0

    def test_divergence_unbounded_level(self, capsys):
        code, out, _ = run(["divergence", "--epsilon", "1", "--multiplier", "1", "--theta", "2"], capsys)
        assert code == 0
        assert json.loads(out)["epsilon_dp_level"] == "inf"

    def test_bounds_csv(self, capsys):
        code, out, _ = run(["bounds", "--epsilons", "0.5,0.9"], capsys)
        assert code == 0
        t = Table.from_csv(out)
        assert abs(t.column("chernoff_ub")[0] - 1.34107) < 1e-5
        assert abs(t.column("chernoff_ub")[1] - 4.99839) < 1e-5
        assert abs(t.column("kl_bound")[0] - 0.122459331) < 1e-9

    def test_bad_domain_exit_code(self, capsys):
        assert run(["bounds", "--epsilons", "1.5"], capsys)[0] == 2
        assert run(["divergence", "--epsilon", "-1"], capsys)[0] == 2
        assert run(["sweep", "--thetas", "0.5"], capsys)[0] == 2

    def test_unparseable_flag(self, capsys):
        assert run(["bounds", "--epsilons", "a,b"], capsys)[0] == 2

    def test_help_is_success(self, capsys):
        assert run(["--help"], capsys)[0] == 0

    def test_classify_requires_seed(self, capsys):
        code, _, err = run(["classify", "--epsilon", "1"], capsys)
        assert code == 2
        assert "--seed" in err

    def test_classify_deterministic(self, tmp_path, capsys):
        argv = ["classify", "--epsilon", "1", "--delta-mu", "1", "--m-grid", "2,4,6,8", "--trials", "20000", "--seed", "5"]
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert main(argv + ["--output", str(a)]) == 0
        assert main(argv + ["--output", str(b), "--workers", "3"]) == 0
        assert a.read_bytes() == b.read_bytes()
        report = json.loads(a.read_text())
        assert report["seed"] == 5 and len(report["rates"]) == 4

    def test_classify_flags_degenerate(self, capsys):
        code, out, _ = run(
            ["classify", "--epsilon", "1", "--delta-mu", "0", "--m-grid", "1,2,3,4", "--trials", "1000", "--seed", "1"],
            capsys,
        )
        assert code == 0
        assert json.loads(out)["degenerate"] is True

    def test_compose(self, capsys):
        code, out, _ = run(["compose", "--budget", "1", "--budget", "2,0.01", "--pair", "0,1:1,1"], capsys)
        assert code == 0
        d = json.loads(out)
        assert d["composed"] == {"epsilon": 3.0, "delta": 0.01}
        assert d["additivity"]["kl_additive"] is True

    def test_compose_needs_budget(self, capsys):
        assert run(["compose"], capsys)[0] == 2

    def test_bad_budget(self, capsys):
        assert run(["compose", "--budget", "-1"], capsys)[0] == 2

    def test_config_and_override(self, tmp_path, capsys):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"epsilon": 0.5, "delta_mu": 2.0, "theta": 1.0}))
        _, out, _ = run(["--config", str(cfg), "divergence"], capsys)
        assert json.loads(out)["scenario"]["epsilon"] == 0.5
        _, out, _ = run(["--config", str(cfg), "divergence", "--epsilon", "0.25"], capsys)
        d = json.loads(out)["scenario"]
        assert d["epsilon"] == 0.25 and d["delta_mu"] == 2.0

    def test_bad_config(self, tmp_path, capsys):
        cfg = tmp_path / "c.json"
        cfg.write_text("{not json")
        assert run(["--config", str(cfg), "divergence"], capsys)[0] == 2
        assert run(["--config", str(tmp_path / "missing.json"), "divergence"], capsys)[0] == 4

    def test_output_dir_env(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("CHERNOFFDP_OUTPUT_DIR", str(tmp_path))
        assert main(["bounds", "--epsilons", "0.5", "--output", "sub/b.json"]) == 0
        data = json.loads((tmp_path / "sub" / "b.json").read_text())
        assert data["columns"][0] == "epsilon"

    def test_unwritable_output(self, tmp_path, capsys):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        assert run(["bounds", "--epsilons", "0.5", "--output", str(blocker / "out.csv")], capsys)[0] == 4

    def test_sweep_json_roundtrip(self, tmp_path):
        out = tmp_path / "s.json"
        assert main(["sweep", "--epsilons", "0.3", "--multipliers", "1", "--thetas", "1,2", "--output", str(out)]) == 0
        t = Table.from_json(out.read_text())
        assert t.column("epsilon_dp_level")[1] == math.inf

    def test_non_convergence_exit_code(self, monkeypatch, capsys):
        from chernoffdp.numeric import NonConvergenceError

        def boom(*a, **k):
            raise NonConvergenceError("forced")

        monkeypatch.setattr(cli, "run_divergence", boom)
        assert run(["divergence"], capsys)[0] == 3
