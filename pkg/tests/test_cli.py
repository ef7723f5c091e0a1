import json
import subprocess
import sys

import numpy as np
import pytest

from sparseobs.cli import main


@pytest.fixture
def system_file(tmp_path):
    path = tmp_path / "sys.json"
    path.write_text(json.dumps({
        "A": np.diag([0.5, 1.2, -0.8, 1.7, 0.9]).tolist(),
        "C": [[1.0, 1.0, 1.0, 1.0, 1.0]],
        "times": [0, 1, 2, 3, 4],
    }))
    return path


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_simulate_then_recover_each_method(tmp_path, system_file, capsys):
    y = tmp_path / "y.csv"
    code, _, _ = run(["simulate", "--system", system_file, "--x0", "0,2,0,0,-1", "--out", y], capsys)
    assert code == 0
    text = y.read_bytes()
    assert text.startswith(b"t,channel,y\n") and b"\r" not in text
    for method in ("l1", "sp", "prony", "l0"):
        code, out, _ = run(["recover", "--system", system_file, "--y", y, "--K", 2, "--method", method], capsys)
        assert code == 0
        values = [float(line.split(",")[1]) for line in out.strip().splitlines()[1:]]
        # greedy SP may miss on this coherent Vandermonde matrix; it only has to run
        if method != "sp":
            assert np.allclose(values, [0, 2, 0, 0, -1], atol=1e-9), method


def test_recover_json_format(tmp_path, system_file, capsys):
    y = tmp_path / "y.csv"
    run(["simulate", "--system", system_file, "--x0", "0,0,3,0,0", "--out", y], capsys)
    code, out, _ = run(["recover", "--system", system_file, "--y", y, "--format", "json"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["summary"]["support"] == [2]


def test_check_all(system_file, capsys):
    code, out, _ = run(["check", "--system", system_file, "--K", 1, "--condition", "all"], capsys)
    assert code == 0
    names = [line.split(",")[0] for line in out.strip().splitlines()[1:]]
    assert names == ["coherence", "rip", "null_space", "unique_k_sparse", "hautus", "kalman"]


def test_exit_codes(tmp_path, system_file, capsys):
    # 2: unreadable input, malformed config, unknown argument
    assert run(["recover", "--system", tmp_path / "none.json", "--y", "x.csv"], capsys)[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind": "PronyExact", "n": 5}')
    assert run(["sweep", "--config", bad], capsys)[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["sweep"])
    assert exc.value.code == 2
    capsys.readouterr()
    # 3: solver failure (no 1-sparse solution)
    y = tmp_path / "y.csv"
    run(["simulate", "--system", system_file, "--x0", "1,1,1,0,0", "--out", y], capsys)
    code, _, err = run(["recover", "--system", system_file, "--y", y, "--K", 1, "--method", "l0"], capsys)
    assert code == 3 and "NoSparseSolution" in err
    # 4: size guard
    assert run(["check", "--system", system_file, "--K", 6, "--condition", "rip"], capsys)[0] == 4


def test_subcommand_kind_mismatch(tmp_path, capsys):
    c = tmp_path / "c.json"
    c.write_text('{"kind": "PronyExact", "n": 8, "K": 2, "trials": 2}')
    assert run(["phase", "--config", c], capsys)[0] == 2
    assert run(["adaptive", "--config", c], capsys)[0] == 2


def test_phase_and_adaptive_default_kind(tmp_path, capsys):
    c = tmp_path / "c.json"
    c.write_text('{"n": 6, "K": 1, "trials": 3, "m_values": [2, 6], "t_max": 10, "schedule": "random"}')
    code, out, _ = run(["phase", "--config", c], capsys)
    assert code == 0 and out.startswith("m,successes,trials,rate,solver_errors\n")
    c.write_text('{"n": 6, "K": 1, "trials": 3, "checker": "rank", "t_max": 10}')
    code, out, _ = run(["adaptive", "--config", c], capsys)
    assert code == 0 and out.startswith("trial,stop_m,")


def test_seed_override_and_determinism(tmp_path, capsys):
    c = tmp_path / "c.json"
    c.write_text('{"kind": "L1SignAligned", "n": 8, "K": 2, "trials": 5, "seed": 1}')
    outs = []
    for seed in (None, None, 2):
        argv = ["sweep", "--config", c, "--out", tmp_path / f"o{len(outs)}.csv"]
        if seed is not None:
            argv += ["--seed", seed]
        assert run(argv, capsys)[0] == 0
        outs.append((tmp_path / f"o{len(outs)}.csv").read_bytes())
    assert outs[0] == outs[1] and outs[0] != outs[2]


def test_config_out_field(tmp_path, capsys):
    target = tmp_path / "from_config.csv"
    c = tmp_path / "c.json"
    c.write_text(json.dumps({"kind": "PronyExact", "n": 8, "K": 2, "trials": 2, "out": str(target)}))
    assert run(["sweep", "--config", c], capsys)[0] == 0
    assert target.read_text().startswith("trial,")


def test_console_entry_point(tmp_path):
    c = tmp_path / "c.json"
    c.write_text('{"kind": "RankCheck", "n": 4, "K": 1, "trials": 2}')
    outs = [subprocess.run([sys.executable, "-m", "sparseobs.cli", "sweep", "--config", str(c)],
                           capture_output=True, check=True).stdout for _ in range(2)]
    assert outs[0] == outs[1] and outs[0].startswith(b"m,trials,full_rank,min_rank\n")
