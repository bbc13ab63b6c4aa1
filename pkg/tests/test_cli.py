import csv

import pytest

from witness.cli import RUN_COLUMNS, main, parse_range, UsageError


def model_flags(paths, name):
    tra, lab = paths[name]
    return ["--tra", str(tra), "--lab", str(lab), "--init", "init", "--goal", "goal"]


def test_minimize_milp(model_files, tmp_path, capsys):
    out = tmp_path / "out"
    code = main(["minimize", *model_flags(model_files, "m1"), "--mode", "max",
                 "--threshold", "0.55", "--method", "milp", "--out", str(out)])
    assert code == 0
    assert capsys.readouterr().out == "subsys states:2, value: 2\n"
    for ext in ("tra", "lab", "cert", "mask", "summary"):
        assert (out / f"subsys.{ext}").exists()
    rows = list(csv.reader((out / "runs.csv").open()))
    assert tuple(rows[0]) == RUN_COLUMNS
    assert rows[1][RUN_COLUMNS.index("status")] == "optimal"


def test_minimize_unsatisfied(model_files, tmp_path, capsys):
    code = main(["minimize", *model_flags(model_files, "m1"), "--mode", "min",
                 "--threshold", "0.55", "--method", "qs", "--out", str(tmp_path)])
    assert code == 2
    assert "Property is not satisfied!" in capsys.readouterr().err


def test_minimize_missing_goal(model_files, capsys):
    tra, lab = model_files["m1"]
    code = None
    with pytest.raises(SystemExit) as exc:
        main(["minimize", "--tra", str(tra), "--lab", str(lab), "--init", "init",
              "--mode", "max", "--threshold", "0.5", "--method", "qs"])
    code = exc.value.code
    assert code == 1
    assert "usage" in capsys.readouterr().err


def test_minimize_qs_iterations(model_files, tmp_path, capsys):
    code = main(["minimize", *model_flags(model_files, "d1"), "--mode", "min",
                 "--threshold", "0.7", "--method", "qs", "--init-obj", "invp",
                 "--iterations", "2", "--out", str(tmp_path)])
    assert code == 0
    assert capsys.readouterr().out.splitlines() == ["subsys states:3, value: 3"] * 2
    assert (tmp_path / "subsys-2.cert").exists()


def test_minimize_mode_mismatch(model_files, tmp_path):
    code = main(["minimize", *model_flags(model_files, "d1"), "--mode", "min",
                 "--threshold", "0.7", "--method", "qs", "--init-obj", "invf",
                 "--out", str(tmp_path)])
    assert code == 1


def test_minimize_labels(model_files, tmp_path, capsys):
    code = main(["minimize", *model_flags(model_files, "d1"), "--mode", "min",
                 "--threshold", "0.7", "--method", "milp", "--labels", "init,goal",
                 "--out", str(tmp_path)])
    assert code == 0
    # s1 is unlabelled, so only init and goal count
    assert capsys.readouterr().out == "subsys states:3, value: 2\n"
    assert main(["minimize", *model_flags(model_files, "d1"), "--mode", "min",
                 "--threshold", "0.7", "--method", "milp", "--labels", "nope"]) == 1


def certify(model_files, tmp_path, name="m1", thr="0.55", sense="ge", mode="max"):
    cert = tmp_path / f"{name}.cert"
    code = main(["certify", *model_flags(model_files, name), "--mode", mode, "--sense", sense,
                 "--threshold", thr, "--out", str(cert)])
    return code, cert


def test_certify_then_check(model_files, tmp_path, capsys):
    code, cert = certify(model_files, tmp_path)
    assert code == 0
    capsys.readouterr()
    code = main(["check", *model_flags(model_files, "m1"), "--mode", "max", "--sense", "ge",
                 "--threshold", "0.55", "--cert", str(cert)])
    assert code == 0
    assert capsys.readouterr().out == "True\n"


def test_certify_unsatisfied(model_files, tmp_path, capsys):
    code, _ = certify(model_files, tmp_path, sense="gt", thr="0.6")
    assert code == 2
    assert "Property is not satisfied!" in capsys.readouterr().err


def test_check_zero_certificate(model_files, tmp_path, capsys):
    _, cert = certify(model_files, tmp_path)
    header = cert.read_text().splitlines()[0]
    cert.write_text(header + "\n")
    capsys.readouterr()
    code = main(["check", *model_flags(model_files, "m1"), "--mode", "max", "--sense", "ge",
                 "--threshold", "0.55", "--cert", str(cert)])
    out = capsys.readouterr().out.splitlines()
    assert code == 2
    assert out[0] == "False"
    assert out[1].strip().startswith("violated threshold")


def test_check_digest_mismatch(model_files, tmp_path, capsys):
    _, cert = certify(model_files, tmp_path)
    code = main(["check", *model_flags(model_files, "d1"), "--mode", "max", "--sense", "ge",
                 "--threshold", "0.55", "--cert", str(cert)])
    assert code == 1
    assert "digest" in capsys.readouterr().err


def test_check_minimize_certificate(model_files, tmp_path, capsys):
    main(["minimize", *model_flags(model_files, "m1"), "--mode", "max", "--threshold", "0.55",
          "--method", "qs", "--out", str(tmp_path)])
    capsys.readouterr()
    code = main(["check", *model_flags(model_files, "m1"), "--mode", "max", "--sense", "ge",
                 "--threshold", "0.55", "--cert", str(tmp_path / "subsys-3.cert")])
    assert code == 0


def test_render(model_files, tmp_path):
    tra, lab = model_files["d1"]
    out = tmp_path / "d1.dot"
    assert main(["render", "--tra", str(tra), "--lab", str(lab), "--out", str(out)]) == 0
    assert out.read_text().count("[label=") == 4 + 5


def test_render_subsystem_mask(model_files, tmp_path):
    main(["minimize", *model_flags(model_files, "m1"), "--mode", "max", "--threshold", "0.55",
          "--method", "milp", "--out", str(tmp_path)])
    out = tmp_path / "m1.dot"
    code = main(["render", *model_flags(model_files, "m1"), "--reduce",
                 "--mask", str(tmp_path / "subsys.mask"), "--cert", str(tmp_path / "subsys.cert"),
                 "--out", str(out)])
    assert code == 0
    lines = out.read_text().splitlines()
    pale = [l for l in lines if l.startswith("  3 [")]
    assert "dashed" in pale[0]
    assert not any("dashed" in l for l in lines if l.startswith(("  0 [", "  1 [", "  2 [")))


def test_render_bad_mask(model_files, tmp_path):
    (tmp_path / "bad.mask").write_text("9\n")
    tra, lab = model_files["m1"]
    code = main(["render", "--tra", str(tra), "--lab", str(lab), "--mask",
                 str(tmp_path / "bad.mask"), "--out", str(tmp_path / "x.dot")])
    assert code == 1


def test_bench_sweep(model_files, tmp_path):
    out = tmp_path / "runs.csv"
    code = main(["bench", *model_flags(model_files, "m1"), "--thresholds", "0.1:0.7:0.1",
                 "--methods", "qs-ao,milp", "--iterations", "2", "--csv", str(out)])
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert list(rows[0]) == list(RUN_COLUMNS)
    milp = [r for r in rows if r["method"] == "milp" and r["status"] == "optimal"]
    assert [float(r["threshold"]) for r in milp] == [0.1, 0.2, 0.3, 0.4, 0.5, 0.6]
    values = [int(r["value"]) for r in milp]
    assert values == sorted(values)
    qs = [r for r in rows if r["method"] == "qs-ao" and r["status"] == "optimal"]
    assert len(qs) == 6 * 2
    unsat = [r for r in rows if r["status"] == "Unsatisfied"]
    assert {float(r["threshold"]) for r in unsat} == {0.7}
    assert rows[-1]["command"] == "bench-summary"
    assert float(rows[-1]["seconds"]) == max(float(r["seconds"]) for r in milp + qs)


def test_bench_empty_range(model_files, tmp_path):
    assert main(["bench", *model_flags(model_files, "m1"), "--thresholds", "0.5:0.1:0.1",
                 "--csv", str(tmp_path / "r.csv")]) == 1


def test_bench_all_failed(model_files, tmp_path):
    assert main(["bench", *model_flags(model_files, "m1"), "--thresholds", "0.8:0.9:0.1",
                 "--csv", str(tmp_path / "r.csv")]) == 2


def test_parse_range():
    assert parse_range("0.1:0.6:0.1") == [0.1, 0.2, 0.3, 0.4, 0.5, 0.6]
    assert parse_range("0.5:0.5:0.1") == [0.5]
    for bad in ("0.5:0.1:0.1", "0:1:0", "a:b:c", "0:1"):
        with pytest.raises(UsageError):
            parse_range(bad)


def test_reduce_and_generate_roundtrip(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("WITNESS_SEED", "42")
    a, b = tmp_path / "g.tra", tmp_path / "g.lab"
    assert main(["generate", "--states", "15", "--out-tra", str(a), "--out-lab", str(b)]) == 0
    first = a.read_text()
    main(["generate", "--states", "15", "--out-tra", str(a), "--out-lab", str(b)])
    assert a.read_text() == first
    code = main(["reduce", "--tra", str(a), "--lab", str(b), "--init", "init", "--goal", "goal",
                 "--out-tra", str(tmp_path / "r.tra"), "--out-lab", str(tmp_path / "r.lab")])
    assert code in (0, 1)
    if code == 0:
        # the written reachability form is readable and reducible again
        assert main(["reduce", "--tra", str(tmp_path / "r.tra"), "--lab", str(tmp_path / "r.lab"),
                     "--init", "init", "--goal", "rf_target", "--out-tra",
                     str(tmp_path / "r2.tra")]) == 0


def test_io_error(tmp_path, capsys):
    code = main(["reduce", "--tra", str(tmp_path / "missing.tra"), "--init", "init", "--goal",
                 "goal", "--out-tra", str(tmp_path / "o.tra")])
    assert code == 1
    assert "error" in capsys.readouterr().err
