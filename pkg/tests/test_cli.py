import json
import os

from kronperm.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestCf:
    def test_pi_depth_5(self, capsys):
        code, out, _ = run(capsys, "cf", "--alpha", "named:pi", "--depth", "5",
                           "--format", "csv")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[-2].startswith("4,292,103993,33102")
        assert lines[-1].startswith("5,1,104348,33215")

    def test_phi_q_column(self, capsys):
        code, out, _ = run(capsys, "cf", "--alpha", "named:phi", "--depth", "7",
                           "--format", "csv")
        assert code == 0
        qs = [row.split(",")[3] for row in out.strip().splitlines()[1:]]
        assert qs == ["1", "1", "2", "3", "5", "8", "13", "21"]

    def test_sqrt2_pell_denominators(self, capsys):
        code, out, _ = run(capsys, "cf", "--alpha", "surd:sqrt(2)", "--depth", "5",
                           "--format", "csv")
        assert code == 0
        qs = [row.split(",")[3] for row in out.strip().splitlines()[1:]]
        assert qs == ["1", "2", "5", "12", "29", "70"]

    def test_json_bigints_are_strings(self, capsys):
        code, out, _ = run(capsys, "cf", "--alpha", "named:pi", "--depth", "5",
                           "--format", "json")
        assert code == 0
        payload = json.loads(out)
        assert payload["rows"][4]["p"] == "103993"
        assert isinstance(payload["rows"][0]["det_sign"], int)

    def test_pi_table_end_is_resource_error(self, capsys):
        code, _, err = run(capsys, "cf", "--alpha", "named:pi", "--depth", "20")
        assert code == 3
        assert "tabulated" in err


class TestPerm:
    def test_phi_13_canonical_cycles(self, capsys):
        code, out, _ = run(capsys, "perm", "--alpha", "named:phi", "--n", "13",
                           "--format", "json")
        assert code == 0
        payload = json.loads(out)
        assert payload["builder"] == "modular"
        assert payload["cycles"] == [[1, 13, 8, 9], [2, 5, 7, 4], [3, 10, 6, 12], [11]]
        assert payload["lengths"] == {"1": 1, "4": 3}
        assert payload["fixed_points"] == [11]
        assert payload["pi"][0] == 9

    def test_e_536(self, capsys):
        code, out, _ = run(capsys, "perm", "--alpha", "named:e", "--n", "536",
                           "--format", "json")
        assert code == 0
        payload = json.loads(out)
        assert payload["lengths"] == {"1": 8, "66": 8}

    def test_size_limit_exit_3(self, capsys):
        code, _, err = run(capsys, "perm", "--alpha", "named:phi", "--n", "50",
                           "--size-limit", "10")
        assert code == 3
        assert "size limit" in err


class TestScan:
    def test_phi_49_50(self, capsys):
        code, out, _ = run(capsys, "scan", "--alpha", "named:phi",
                           "--range", "49..50", "--format", "csv")
        assert code == 0
        rows = out.strip().splitlines()[1:]
        assert rows[0].split(",")[2] == "1:1;48:1"
        assert rows[1].split(",")[2] == "1:1;4:1;5:1;14:1;26:1"

    def test_single_point_range(self, capsys):
        code, out, _ = run(capsys, "scan", "--alpha", "named:phi",
                           "--range", "1..1", "--format", "csv")
        assert code == 0
        assert out.strip().splitlines()[1].split(",")[2] == "1:1"

    def test_bad_range_exit_2(self, capsys):
        code, _, err = run(capsys, "scan", "--alpha", "named:phi", "--range", "9")
        assert code == 2


class TestPoints:
    def test_phi_13_ranks(self, capsys):
        code, out, _ = run(capsys, "points", "--alpha", "named:phi", "--n", "13",
                           "--format", "csv")
        assert code == 0
        rows = [line.split(",") for line in out.strip().splitlines()[1:]]
        by_k = {int(r[0]): r for r in rows}
        assert by_k[13][3] == "1"   # closest to 0 is the thirteenth
        assert by_k[8][3] == "13"   # the 8-th element is the largest
        assert by_k[1][2].startswith("0.618033988750")

    def test_single_point(self, capsys):
        code, out, _ = run(capsys, "points", "--alpha", "named:e", "--n", "1",
                           "--format", "csv")
        assert code == 0
        rows = out.strip().splitlines()[1:]
        assert len(rows) == 1 and rows[0].endswith(",1")

    def test_twelve_place_rendering_certified(self, capsys):
        code, out, _ = run(capsys, "points", "--alpha", "named:pi", "--n", "7",
                           "--format", "csv")
        assert code == 0
        x1 = out.strip().splitlines()[1].split(",")[2]
        assert x1 == "0.141592653590"  # {pi} correctly rounded at 12 places


class TestVerify:
    def test_fibonacci_suite_green(self, capsys):
        code, out, _ = run(capsys, "verify", "fibonacci", "--max-index", "15")
        assert code == 0
        assert "failures: 0" in out

    def test_exchange_suite_sqrt2(self, capsys):
        code, out, _ = run(capsys, "verify", "exchange", "--alpha", "surd:sqrt(2)",
                           "--periods", "6", "--format", "csv")
        assert code == 0
        rows = out.strip().splitlines()[1:]
        assert len(rows) == 6
        assert all(row.split(",")[3] == "True" for row in rows)

    def test_identities_suite_e(self, capsys):
        code, out, _ = run(capsys, "verify", "identities", "--alpha", "named:e",
                           "--depth", "20", "--format", "csv")
        assert code == 0
        rows = out.strip().splitlines()[1:]
        assert len(rows) == 21
        assert all(row.split(",")[3] == "True" for row in rows)

    def test_quadratic_suite(self, capsys):
        code, out, _ = run(capsys, "verify", "quadratic", "--max-d", "15",
                           "--periods", "2")
        assert code == 0
        assert "failures: 0" in out

    def test_fixed_points_suite(self, capsys):
        code, out, _ = run(capsys, "verify", "fixed-points", "--max-r", "5",
                           "--max-q", "3000")
        assert code == 0
        assert "conjecture_findings: 0" in out


class TestEnsemble:
    def test_byte_identical_reruns(self, capsys):
        args = ("ensemble", "--seed", "1", "--samples", "2",
                "--max-points", "400", "--format", "csv")
        code1, out1, _ = run(capsys, *args)
        code2, out2, _ = run(capsys, *args)
        assert code1 == code2 == 0
        assert out1 == out2

    def test_row_accounting(self, capsys):
        code, out, _ = run(capsys, "ensemble", "--seed", "5", "--samples", "3",
                           "--max-points", "300", "--format", "json")
        assert code == 0
        payload = json.loads(out)
        per_sample = {}
        for row in payload["rows"]:
            per_sample[row["sample"]] = per_sample.get(row["sample"], 0) + 1
        assert sum(per_sample.values()) == payload["meta"]["rows"]
        assert set(per_sample) == {0, 1, 2}

    def test_palindromic_rows_match_proposition(self, capsys):
        from kronperm.cfkit import EnsembleConfig, gauss_kuzmin_stream
        from kronperm.theorems import verify_palindrome_proposition

        code, out, _ = run(capsys, "ensemble", "--seed", "3", "--samples", "4",
                           "--max-points", "2000", "--format", "json")
        assert code == 0
        payload = json.loads(out)
        config = EnsembleConfig(seed=3, sample_count=4)
        palindromic_rows = [r for r in payload["rows"] if r["palindromic"]]
        assert palindromic_rows
        for row in palindromic_rows:
            assert row["case_label"] != "Other"
            stream = gauss_kuzmin_stream(config, row["sample"])
            verdict = verify_palindrome_proposition(stream, row["index"])
            assert verdict.case_label == row["case_label"]
            if row["case_label"] == "Involution":
                assert row["involution"] is True


class TestOutputHandling:
    def test_out_file_newline_terminated(self, tmp_path, capsys):
        target = tmp_path / "table.csv"
        code, out, _ = run(capsys, "cf", "--alpha", "named:e", "--depth", "4",
                           "--format", "csv", "--out", str(target))
        assert code == 0 and out == ""
        data = target.read_text(encoding="utf-8")
        assert data.endswith("\n")

    def test_plot_rendered(self, tmp_path, capsys):
        fig = tmp_path / "points.png"
        code, _, _ = run(capsys, "points", "--alpha", "named:phi", "--n", "34",
                         "--plot", str(fig), "--format", "csv",
                         "--out", str(tmp_path / "points.csv"))
        assert code == 0
        assert fig.stat().st_size > 1000

    def test_scan_plot_rendered(self, tmp_path, capsys):
        fig = tmp_path / "scan.png"
        code, _, _ = run(capsys, "scan", "--alpha", "named:phi", "--range", "2..20",
                         "--plot", str(fig), "--out", str(tmp_path / "scan.csv"))
        assert code == 0
        assert fig.exists()

    def test_env_var_precision_budget(self, capsys, monkeypatch):
        monkeypatch.setenv("KRONPERM_PRECISION_BUDGET", "2")
        code, _, err = run(capsys, "points", "--alpha", "named:e", "--n", "60",
                           "--format", "csv")
        assert code == 3
        assert "precision" in err.lower() or "cannot" in err.lower()

    def test_usage_error_exit_2(self, capsys):
        assert main(["unknown-command"]) == 2

    def test_bad_alpha_exit_2(self, capsys):
        code, _, err = run(capsys, "cf", "--alpha", "named:zeta")
        assert code == 2
        assert "alpha" in err or "unknown" in err
