import json

import pytest

import perftile.main as main_module
import perftile.tiling as tiling_module
from perftile.gf import field_new
from perftile.linalg import VSet
from perftile.main import EXIT_ERROR, EXIT_INVALID, EXIT_OK, main, surgery_check
from perftile.tiling import construct_semiprojective
from perftile.utils.tile_io import write_set


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    report = json.loads(out) if out.strip() else None
    return code, report, err


@pytest.fixture
def tile_files(tmp_path, semiprojective_3_3):
    u = write_set(tmp_path / "u.txt", semiprojective_3_3.U, "tile")
    v = write_set(tmp_path / "v.txt", semiprojective_3_3.V, "tile")
    return str(u), str(v)


def test_construct_writes_tiles(capsys, tmp_path):
    out_u, out_v = tmp_path / "u.txt", tmp_path / "v.txt"
    code, report, _ = run(
        capsys, "construct", "--theorem", "1", "--p", "3", "--m", "3", "--out-u", str(out_u), "--out-v", str(out_v)
    )
    assert code == EXIT_OK
    assert report["ok"] is True
    assert report["tiling"]["valid"] is True
    assert all(c["passed"] for c in report["checks"])
    assert report["objects"]["U"]["size"] == 27
    assert report["outputs"] == {"u": str(out_u), "v": str(out_v)}
    assert out_u.read_text().startswith("3 3 1 6 27 tile\n")
    assert report["perfect"] == {"skipped": True, "reason": "not applicable to this command"}
    assert report["timings"]["skipped"] is True


def test_construct_precondition_is_a_usage_error(capsys):
    code, report, err = run(capsys, "construct", "--theorem", "1", "--p", "2", "--m", "3")
    assert code == EXIT_ERROR
    assert report is None
    assert "error: field cardinality larger than 2 required" in err


def test_verify_tiling(capsys, tile_files):
    u, v = tile_files
    code, report, _ = run(capsys, "verify", "--u", u, "--v", v)
    assert code == EXIT_OK
    assert report["tiling"]["reason"] == "ok"
    assert report["objects"]["V"]["period_count"] == 1


def test_verify_non_tiling(capsys, tile_files):
    u, _ = tile_files
    code, report, _ = run(capsys, "verify", "--u", u, "--v", u, "--skip-invariants")
    assert code == EXIT_INVALID
    assert report["tiling"]["reason"] == "collision"
    assert report["objects"]["U"]["kernel_dim"]["skipped"] is True


def test_to_code_and_stats(capsys, tmp_path, tile_files):
    u, v = tile_files
    out = tmp_path / "c.txt"
    code, report, _ = run(capsys, "to-code", "--u", u, "--v", v, "--out", str(out))
    assert code == EXIT_OK
    assert report["perfect"]["valid"] is True
    assert report["perfect"]["code_size"] == 59049
    assert [f["quantity"] for f in report["formulas"]] == ["rank", "kernel_dim", "period_count"]
    assert all(f["consistent"] for f in report["formulas"])
    assert report["objects"]["C"]["kernel_dim"] == 7

    code, report, _ = run(capsys, "stats", "--code", str(out), "--expect-rank", "13", "--expect-kernel", "7")
    assert code == EXIT_OK
    assert report["objects"]["C"]["period_count"] == 3**7

    code, report, err = run(capsys, "stats", "--code", str(out), "--expect-rank", "12")
    assert code == EXIT_INVALID
    assert "check failed: rank" in err


def test_solve_method(capsys, tile_files):
    u, v = tile_files
    code, report, _ = run(capsys, "to-code", "--u", u, "--v", v, "--method", "solve")
    assert code == EXIT_OK
    assert report["perfect"]["code_size"] == 59049


def test_verify_code_with_a_missing_word(capsys, tmp_path, code_3_3):
    words = code_3_3.words
    fewer = VSet(words.field, words.n, words.coords[1:].copy(), words.keys[1:].copy())
    path = write_set(tmp_path / "c.txt", fewer, "code")
    code, report, _ = run(capsys, "verify", "--code", str(path), "--skip-invariants")
    assert code == EXIT_INVALID
    assert report["perfect"]["reason"] == "uncovered"
    assert report["perfect"]["uncovered_count"] == 27


def test_headerless_code_needs_assume(capsys, tmp_path):
    path = tmp_path / "hamming.txt"
    path.write_text("0000\n0111\n0222\n1012\n1120\n1201\n2021\n2102\n2210\n")
    code, _, err = run(capsys, "verify", "--code", str(path))
    assert code == EXIT_ERROR
    assert "missing header" in err
    code, report, _ = run(capsys, "verify", "--code", str(path), "--assume", "q=3")
    assert code == EXIT_OK
    assert report["perfect"]["valid"] is True


def test_length_40_refused(capsys, tmp_path):
    t = construct_semiprojective(field_new(3), 4)
    u = write_set(tmp_path / "u.txt", t.U, "tile")
    v = write_set(tmp_path / "v.txt", t.V, "tile")
    code, _, err = run(capsys, "to-code", "--u", str(u), "--v", str(v))
    assert code == EXIT_ERROR
    assert "N = 40" in err


def test_search(capsys, tmp_path):
    out = tmp_path / "sol.txt"
    code, report, _ = run(
        capsys, "search", "--geometry", "affine", "--p", "3", "--n", "2", "--sizes", "1,4", "--out", str(out)
    )
    assert code == EXIT_OK
    assert report["search"]["solutions"] == 144
    assert report["search"]["identity_lhs"] == report["search"]["identity_rhs"] == 9
    assert out.read_text().startswith("solutions affine 3 3 1 2 144\n")


def test_search_identity_failure(capsys):
    code, report, err = run(capsys, "search", "--geometry", "projective", "--p", "3", "--n", "3", "--sizes", "2,2")
    assert code == EXIT_ERROR
    assert report is None
    assert "12 != 13" in err


def test_factorization_files(capsys, tmp_path, f3):
    u = write_set(tmp_path / "u.txt", VSet.from_rows(f3, 2, [[1, 0]]), "points")
    v = write_set(tmp_path / "v.txt", VSet.from_rows(f3, 2, [[0, 1]]), "points")
    code, report, _ = run(capsys, "verify", "--factorization", str(u), str(v))
    assert code == EXIT_OK
    assert report["factorization"]["valid"] is True
    assert report["objects"]["U"]["kernel_dim"]["reason"] == "not defined for point sets"

    code, _, err = run(capsys, "verify", "--factorization", str(u), str(u))
    assert code == EXIT_ERROR
    assert "disjoint" in err


def test_report_file_timings_and_banners(capsys, tmp_path):
    report_path = tmp_path / "report.json"
    code = main(
        ["construct", "--theorem", "1", "--p", "3", "--m", "3", "--report", str(report_path), "--timings", "--verbose"]
    )
    out, err = capsys.readouterr()
    assert code == EXIT_OK
    assert report_path.read_text() == out
    assert "construct" in json.loads(out)["timings"]
    assert "===== [Construct] =====" in err


def test_output_is_deterministic(capsys, tile_files):
    u, v = tile_files
    first = run(capsys, "verify", "--u", u, "--v", v)[1]
    second = run(capsys, "verify", "--u", u, "--v", v, "--threads", "3")[1]
    assert first == second


def test_usage_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as info:
        main([])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main(["search", "--geometry", "affine", "--p", "3", "--n", "2", "--sizes", "1"])
    assert info.value.code == 2


def test_search_refuses_f7_cube_without_override(capsys):
    code, report, err = run(capsys, "search", "--geometry", "affine", "--p", "7", "--n", "3", "--sizes", "5,13")
    assert code == EXIT_ERROR
    assert report is None
    assert "343 points" in err
    assert "--allow-large" in err


def test_to_code_needs_a_projective_u(capsys, tile_files):
    u, v = tile_files
    code, report, err = run(capsys, "to-code", "--u", v, "--v", u)
    assert code == EXIT_ERROR
    assert report is None
    assert "error: U is not projective" in err


def test_construct_verifies_the_tiling_once(capsys, monkeypatch):
    calls = []
    real = tiling_module.verify_tiling

    def counting(*args, **kwargs):
        calls.append(1)
        return real(*args, **kwargs)

    monkeypatch.setattr(tiling_module, "verify_tiling", counting)
    monkeypatch.setattr(main_module, "verify_tiling", counting)
    code, report, _ = run(capsys, "construct", "--theorem", "1", "--p", "3", "--m", "3")
    assert code == EXIT_OK
    assert len(calls) == 1
    surgery = next(c for c in report["checks"] if c["name"] == "surgery pieces disjoint")
    assert surgery["passed"] is True
    assert surgery["detail"] == "6 pieces, 18 vectors moved"


@pytest.mark.parametrize("m", [3, 4])
def test_surgery_check_reports_overlapping_pieces(f3, m):
    check = surgery_check(f3, m, 2)
    assert check.passed is False
    assert "overlap" in check.detail
    assert surgery_check(f3, 3, 1).passed
