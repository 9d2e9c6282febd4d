import pytest

from gtsp_colony.cli import main
from gtsp_colony.ingest import generate_random_instance, parse_gtsp_instance, write_gtsp_instance

from conftest import library_file


@pytest.fixture
def toy(tmp_path, fixture_instance):
    path = tmp_path / "toy.gtsp"
    path.write_text(write_gtsp_instance(fixture_instance))
    return path


def test_solve_golden(toy, capsys):
    argv = [
        "solve", str(toy), "--alg", "racs", "--seed", "1", "--iterations", "200", "--optimum", "1717"
    ]
    assert main(argv) == 0
    out = capsys.readouterr().out
    assert "best cost: 1798\n" in out
    assert "gap: 4.7175%\n" in out
    assert out.endswith("tour: 15 16 13 11 8 6\n")
    assert main(argv) == 0
    assert capsys.readouterr().out == out


def test_solve_writes_output_file(toy, tmp_path, capsys):
    out = tmp_path / "res.txt"
    assert main(["solve", str(toy), "--iterations", "10", "-o", str(out)]) == 0
    assert out.read_text() == capsys.readouterr().out


def test_unknown_algorithm_is_usage_error(toy, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["solve", str(toy), "--alg", "nosuch"])
    assert exc.value.code == 2


def test_bad_param_value_is_usage_error(toy, capsys):
    assert main(["solve", str(toy), "--rho", "1.5"]) == 2
    assert "rho" in capsys.readouterr().err


def test_missing_file_is_data_error(tmp_path, capsys):
    assert main(["solve", str(tmp_path / "absent.gtsp")]) == 1


def test_malformed_file_reports_line(tmp_path, capsys):
    bad = tmp_path / "bad.gtsp"
    bad.write_text("NAME: bad\nTYPE: GTSP\nDIMENSION: 3\nGTSP_SETS: 3\nEDGE_WEIGHT_TYPE: EUC_2D\n"
                   "NODE_COORD_SECTION\n1 0 0\n2 x 1\n3 1 1\nEOF\n")
    assert main(["solve", str(bad)]) == 1
    assert "line 8" in capsys.readouterr().err


def test_exact_matches_bruteforce(toy, capsys):
    assert main(["exact", str(toy)]) == 0
    dp = capsys.readouterr().out
    assert main(["exact", str(toy), "--bruteforce"]) == 0
    bf = capsys.readouterr().out
    assert "optimum: 1717\n" in dp and "optimum: 1717\n" in bf
    assert "tour: 6 15 13 11 16 8" in dp


def test_exact_refuses_oversized(tmp_path, capsys):
    path = tmp_path / "big.gtsp"
    path.write_text(write_gtsp_instance(generate_random_instance(seed=0, p=20, n=40)))
    assert main(["exact", str(path)]) == 1
    assert "too large" in capsys.readouterr().err


def _write_tsp(path, n):
    body = "\n".join(f"{i + 1} {(i * 37) % 101} {(i * 53) % 97}" for i in range(n))
    path.write_text(f"NAME: {path.stem}\nTYPE: TSP\nDIMENSION: {n}\nEDGE_WEIGHT_TYPE: EUC_2D\n"
                    f"NODE_COORD_SECTION\n{body}\nEOF\n")


def test_cluster_default_name_and_determinism(tmp_path, capsys):
    tsp = tmp_path / "syn76.tsp"
    _write_tsp(tsp, 76)
    assert main(["cluster", str(tsp)]) == 0
    out = tmp_path / "16syn76.gtsp"
    first = out.read_bytes()
    assert parse_gtsp_instance(first.decode()).p == 16
    assert main(["cluster", str(tsp)]) == 0
    assert out.read_bytes() == first


def test_cluster_three_nodes_singletons(tmp_path, capsys):
    tsp = tmp_path / "three.tsp"
    _write_tsp(tsp, 3)
    out = tmp_path / "three.gtsp"
    assert main(["cluster", str(tsp), "--clusters", "3", "-o", str(out)]) == 0
    inst = parse_gtsp_instance(out.read_text())
    assert sorted(inst.clusters) == [(0,), (1,), (2,)]


def test_cluster_too_many_clusters(tmp_path, capsys):
    tsp = tmp_path / "three.tsp"
    _write_tsp(tsp, 3)
    assert main(["cluster", str(tsp), "--clusters", "4"]) == 1


@pytest.mark.skipif(library_file("pr76.tsp") is None, reason="pr76.tsp not present in tests/data")
def test_cluster_pr76(tmp_path, capsys):
    out = tmp_path / "16pr76.gtsp"
    assert main(["cluster", str(library_file("pr76.tsp")), "-o", str(out)]) == 0
    assert parse_gtsp_instance(out.read_text()).p == 16


def _bench_config(tmp_path):
    cfg = tmp_path / "exp.toml"
    cfg.write_text(
        'algorithms = ["ACS", "RACS"]\nruns = 2\nmax_iterations = 30\nmaster_seed = 3\n'
        '[[instances]]\nrandom = {seed = 7, p = 6, n = 18}\noptimum = "exact"\n'
    )
    return cfg


def test_bench_and_report(tmp_path, capsys):
    out = tmp_path / "results"
    assert main(["bench", str(_bench_config(tmp_path)), "--output-dir", str(out)]) == 0
    for name in ("runs.jsonl", "gaps.csv", "gaps.md", "euf.csv", "euf.md"):
        assert (out / name).exists(), name
    assert (out / "gaps.csv").read_text().startswith("Problem,ACS,RACS\n6rand18s7,")
    capsys.readouterr()

    assert main(["report", str(out / "runs.jsonl"), "--format", "markdown"]) == 0
    md = capsys.readouterr().out
    assert md.splitlines()[0] == "| Problem | ACS | RACS |"
    assert md == (out / "gaps.md").read_text()

    assert main(["report", str(out / "runs.jsonl"), "--format", "csv", "--stats"]) == 0
    assert "Algorithm,x_bar,s2,b_hat,c_hat,euf,Rk" in capsys.readouterr().out


def test_bench_jobs_from_environment(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("GTSP_COLONY_JOBS", "2")
    a, b = tmp_path / "a", tmp_path / "b"
    cfg = _bench_config(tmp_path)
    assert main(["bench", str(cfg), "--output-dir", str(a)]) == 0
    monkeypatch.delenv("GTSP_COLONY_JOBS")
    assert main(["bench", str(cfg), "--output-dir", str(b)]) == 0
    assert (a / "gaps.csv").read_bytes() == (b / "gaps.csv").read_bytes()


def test_bench_bad_config(tmp_path, capsys):
    cfg = tmp_path / "c.toml"
    cfg.write_text("nonsense = 1\n")
    assert main(["bench", str(cfg), "--output-dir", str(tmp_path / "o")]) == 1


def test_report_missing_log(tmp_path, capsys):
    assert main(["report", str(tmp_path / "none.jsonl")]) == 1


def test_no_subcommand_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2
