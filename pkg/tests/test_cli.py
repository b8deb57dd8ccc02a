import json
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from favardlab.cli import main, resolve_config, build_parser


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_sample_first_generation(tmp_path, capsys):
    out = tmp_path / "s"
    code, _, _ = run(["sample", "--degree", 4, "--generations", 1, "--seed", 7, "--theta", "0,0.3", "--out", out], capsys)
    assert code == 0
    data = json.loads((out / "disks.json").read_text())
    assert len(data["disks"]) == 4 and all(dk["r"] == 0.25 for dk in data["disks"])
    assert data["config"]["seed"] == 7 and data["favardlab_version"]
    proj = json.loads((out / "projection_1.json").read_text())
    assert proj["theta"] == 0.3 and proj["measure"] > 0


def test_sample_rerun_identical(tmp_path, capsys):
    args = ["sample", "--degree", 3, "--generations", 3, "--seed", 5, "--theta", "0.1"]
    run(args + ["--out", tmp_path / "a"], capsys)
    run(args + ["--out", tmp_path / "b"], capsys)
    for name in ("disks.json", "projection_0.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_sample_over_cap(tmp_path, capsys):
    code, _, err = run(["sample", "--generations", 9, "--max-intervals", 1000, "--out", tmp_path], capsys)
    assert code == 3 and "max_intervals" in err


def test_curve_csv_and_rerun(tmp_path, capsys):
    args = ["curve", "--degree", 4, "--generations", 5, "--samples", 40, "--seed", 11]
    assert run(args + ["--out", tmp_path / "a.csv"], capsys)[0] == 0
    assert run(args + ["--workers", 2, "--out", tmp_path / "b.csv"], capsys)[0] == 0
    text = (tmp_path / "a.csv").read_text()
    assert text == (tmp_path / "b.csv").read_text()
    rows = [line for line in text.splitlines() if line and not line.startswith("#")]
    assert rows[0] == "k,mean,stderr,samples,theta" and len(rows) == 6
    assert '"seed": 11' in text


def test_curve_single_sample_is_input_error(capsys):
    code, _, err = run(["curve", "--samples", 1], capsys)
    assert code == 4 and "samples" in err


def test_seed_from_environment(monkeypatch):
    monkeypatch.setenv("FAVARDLAB_SEED", "123")
    cfg = resolve_config(build_parser().parse_args(["curve"]))
    assert cfg.seed == 123
    cfg = resolve_config(build_parser().parse_args(["curve", "--seed", "4"]))
    assert cfg.seed == 4


def test_config_file_and_flag_precedence(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"degree": 5, "generations": 3, "seed": 9, "theta": [0.5, 1.0]}))
    cfg = resolve_config(build_parser().parse_args(["curve", "--config", str(path), "--generations", "4"]))
    assert (cfg.degree, cfg.generations, cfg.seed, cfg.theta) == (5, 4, 9, [0.5, 1.0])


def test_config_unknown_key(tmp_path, capsys):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"colour": "red"}))
    assert run(["curve", "--config", path], capsys)[0] == 4


def test_theta_flag_forms():
    args = build_parser().parse_args(["sample", "--theta", "0,pi/4", "--theta", "1"])
    assert resolve_config(args).theta == pytest.approx([0.0, np.pi / 4, 1.0])


def test_verify_overlap_passes(capsys):
    code, out, _ = run(["verify", "overlap", "--a", 0.2], capsys)
    assert code == 0
    assert json.loads(out)["passed"] is True


def test_verify_overlap_custom_interval(capsys):
    code, out, _ = run(["verify", "overlap", "--a", 0.25, "--interval=-0.2,-0.1", "--interval", "0,0.25"], capsys)
    assert code == 0 and len(json.loads(out)["report"]["intervals"]) == 2


def test_verify_induction_constant_series_fails(tmp_path, capsys):
    csv = tmp_path / "c.csv"
    csv.write_text("k,mean,stderr,samples,theta\n" + "".join(f"{k},1,0,10,0\n" for k in range(1, 6)))
    code, out, _ = run(["verify", "induction", "--curve", csv, "--c", 0.01], capsys)
    assert code == 2 and json.loads(out)["passed"] is False


def test_verify_theta_passes(capsys):
    code, out, _ = run(["verify", "theta", "--degree", 4, "--generations", 4, "--theta", "0,0.3,1.0",
                        "--samples", 300, "--seed", 2], capsys)
    assert code == 0


def test_verify_invalid_choice(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "everything"])
    assert exc.value.code == 4


def test_fit_and_plot_inverse_law(tmp_path, capsys):
    csv = tmp_path / "c.csv"
    csv.write_text("k,mean,stderr,samples,theta\n" + "".join(f"{k},{2 / k!r},0.001,10,0\n" for k in range(1, 11)))
    code, out, _ = run(["fit", csv], capsys)
    assert code == 0
    assert json.loads(out)["fit"]["models"]["power"]["params"]["p"] == pytest.approx(1.0, abs=0.01)
    code, out, _ = run(["plot", csv, "--out", tmp_path / "p.svg"], capsys)
    assert code == 0
    root = ET.fromstring((tmp_path / "p.svg").read_bytes())
    assert len(root.findall(".//{http://www.w3.org/2000/svg}polyline")) == 2


@pytest.mark.parametrize("cmd", ["fit", "plot"])
def test_empty_or_missing_csv(tmp_path, capsys, cmd):
    empty = tmp_path / "e.csv"
    empty.write_text("")
    assert run([cmd, empty], capsys)[0] == 4
    assert run([cmd, tmp_path / "missing.csv"], capsys)[0] == 4


def test_favard_subcommand(capsys):
    code, out, _ = run(["favard", "--mode", "deterministic", "--degree", 4, "--generations", 1, "--ntheta", 256], capsys)
    assert code == 0
    assert json.loads(out)["favard"]["favard_length"] == pytest.approx(1.586804425, abs=1e-8)
    code, out, _ = run(["favard", "--degree", 3, "--generations", 3, "--samples", 5, "--ntheta", 16], capsys)
    assert code == 0 and 0 < json.loads(out)["favard"]["mean"] < 2


def test_bad_flag_value(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["curve", "--degree", "four"])
    assert exc.value.code == 4
    assert run(["curve", "--degree", 2], capsys)[0] == 4
