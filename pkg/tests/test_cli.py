import cli


def _lines(path):
    return path.read_text(encoding="utf-8").splitlines()


def test_regulated_dynamics_ends_at_the_equilibrium(tmp_path):
    out = tmp_path / "regulated.csv"
    assert cli.main(["dynamics", "--regulated", "--output", str(out)]) == cli.EXIT_OK

    lines = _lines(out)
    assert lines[0] == "step,mover,p_i,p_j,d_i,d_j,r_i,r_j"
    assert len(lines) == 1 + 80 + 1

    final = lines[-2].split(",")
    assert final[0] == "80"
    assert final[1] == "j"
    assert final[2] == "0.333333333"
    assert final[3] == "0.666666667"
    assert lines[-1].startswith("verdict,converged p_i=0.333333333 p_j=0.666666667")


def test_unregulated_dynamics_to_stdout(capsys):
    assert cli.main(["dynamics"]) == cli.EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 1 + 41 + 1
    assert lines[1].split(",")[:4] == ["1", "i", "0.505000000", "0.010000000"]
    assert lines[-1] == "verdict,cycle period=38,,,,,,"


def test_config_file_and_distribution_flag(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("regulated = true\nmax_changes = 4\ndistribution = uniform\n", encoding="utf-8")
    out = tmp_path / "out.csv"

    code = cli.main(["dynamics", "--config", str(cfg), "--distribution", "f2", "--output", str(out)])
    assert code == cli.EXIT_OK
    lines = _lines(out)
    assert len(lines) == 1 + 4 + 1
    assert lines[-1].startswith("verdict,converged")


def test_equilibrium_rows(tmp_path):
    cfg = tmp_path / "eq.cfg"
    cfg.write_text("gamma_min = 0.1\ngamma_max = 0.3\ngamma_step = 0.1\n", encoding="utf-8")
    out = tmp_path / "eq.csv"

    assert cli.main(["equilibrium", "--config", str(cfg), "--output", str(out)]) == cli.EXIT_OK
    lines = _lines(out)
    assert lines[0] == "gamma,F,feasible,k_i,k_j,p_i,p_j"
    assert len(lines) == 4

    first = lines[1].split(",")
    assert first[0] == "0.100000000"
    assert first[2] == "True"
    assert float(first[3]) < float(first[4])

    last = lines[3].split(",")
    assert last[0] == "0.300000000"
    assert last[2] == "False"
    assert last[3:] == ["", "", "", ""]


def test_sweep_tax_reports_the_revenue_peak(tmp_path):
    out = tmp_path / "tax.csv"
    assert cli.main(["sweep-tax", "--output", str(out)]) == cli.EXIT_OK

    lines = _lines(out)
    assert lines[0] == "gamma_t,feasible,welfare_per_M,revenue_per_M"
    assert len(lines) == 1 + 41 + 2
    label, value = lines[-2].split(",")[:2]
    assert label == "revenue_argmax"
    assert abs(float(value) - 0.065) <= 0.005
    assert lines[-1].startswith("welfare_argmax,-0.050000000")


def test_bad_config_exits_2_without_output(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("k_i = -1\n", encoding="utf-8")
    out = tmp_path / "never.csv"

    assert cli.main(["dynamics", "--config", str(cfg), "--output", str(out)]) == cli.EXIT_BAD_CONFIG
    assert not out.exists()


def test_sweep_tax_rejects_non_uniform_users(tmp_path):
    out = tmp_path / "never.csv"
    code = cli.main(["sweep-tax", "--distribution", "f3", "--output", str(out)])
    assert code == cli.EXIT_BAD_CONFIG
    assert not out.exists()


def test_unknown_command_is_a_usage_error():
    assert cli.main(["plot"]) == cli.EXIT_BAD_CONFIG


def test_runtime_failure_exits_1_without_output(tmp_path, monkeypatch):
    def boom(scenario):
        raise RuntimeError("solver failed")

    monkeypatch.setitem(cli.COMMANDS, "dynamics", boom)
    out = tmp_path / "never.csv"
    assert cli.main(["dynamics", "--output", str(out)]) == cli.EXIT_RUNTIME
    assert not out.exists()


def test_runs_are_deterministic(tmp_path):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(["dynamics", "--output", str(first)]) == cli.EXIT_OK
    assert cli.main(["dynamics", "--output", str(second)]) == cli.EXIT_OK
    assert first.read_bytes() == second.read_bytes()


def test_best_response_rows(tmp_path):
    out = tmp_path / "br.csv"
    assert cli.main(["best-response", "--output", str(out)]) == cli.EXIT_OK

    lines = _lines(out)
    assert lines[0] == "p_opponent,reply_i,branch_i,reply_j,branch_j"
    assert len(lines) == 1 + 101
    # row k holds the replies to the opponent price k * 0.01
    assert lines[81] == "0.800000000,0.500000000,monopoly_half,0.500000000,monopoly_half"
    assert lines[41] == "0.400000000,0.390000000,undercut,0.390000000,undercut"
    assert lines[31] == "0.300000000,0.650000000,long_jump,0.650000000,long_jump"


def test_best_response_grid_search(tmp_path):
    out = tmp_path / "br.csv"
    code = cli.main(["best-response", "--numeric", "--distribution", "f3", "--output", str(out)])
    assert code == cli.EXIT_OK
    lines = _lines(out)
    assert len(lines) == 1 + 101
    for line in lines[1:]:
        p, reply_i, _, reply_j, _ = line.split(",")
        assert reply_i != p and reply_j != p


def test_equilibrium_rejects_non_uniform_users(tmp_path):
    out = tmp_path / "never.csv"
    code = cli.main(["equilibrium", "--distribution", "f3", "--output", str(out)])
    assert code == cli.EXIT_BAD_CONFIG
    assert not out.exists()


def test_equilibrium_empty_grid_is_a_config_error(tmp_path):
    cfg = tmp_path / "eq.cfg"
    cfg.write_text("gamma_min = 0.2\ngamma_max = 0.1\n", encoding="utf-8")
    out = tmp_path / "never.csv"

    code = cli.main(["equilibrium", "--config", str(cfg), "--output", str(out)])
    assert code == cli.EXIT_BAD_CONFIG
    assert not out.exists()


def test_all_infeasible_sweep_gives_zero_rows(tmp_path):
    cfg = tmp_path / "tax.cfg"
    cfg.write_text("gamma_c = 0.3\ngamma_t_min = 0.0\ngamma_t_max = 0.05\ngamma_t_step = 0.01\n",
                   encoding="utf-8")
    out = tmp_path / "tax.csv"

    assert cli.main(["sweep-tax", "--config", str(cfg), "--output", str(out)]) == cli.EXIT_OK
    lines = _lines(out)
    rows = [line.split(",") for line in lines[1:7]]
    assert len(rows) == 6
    for row in rows:
        assert row[1:] == ["False", "0.000000000", "0.000000000"]
