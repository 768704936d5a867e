import json
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qvsim.circuits import (Circuit, CircuitParseError, parse_circuit,
                            serialize_circuit)
from qvsim.runner import document_to_json, report_layers, run_mode


def test_parse_minimal():
    c = parse_circuit("dim 2\nqvs 1\ngate F 0\n")
    assert (c.d, c.n, c.variant) == (2, 1, "E")
    assert c.ops == (("F", 0),)


def test_parse_full_header():
    text = """# full header
dim 3
qvs 2
variant hybrid:3
seed 9
force 1,0,2
init +1 2
gate F 0
gate R 1 [0.0,0.5,1.0]
measure 1
"""
    c = parse_circuit(text)
    assert c.variant == "hybrid" and c.d_a == 3
    assert c.seed == 9 and c.forced == (1, 0, 2)
    assert c.init == (("+", 1), ("z", 2))
    assert c.ops == (("F", 0), ("R", (0.0, 0.5, 1.0), 1), ("M", 1))


@pytest.mark.parametrize("text,line", [
    ("dim 2\nqvs 1\ngate Q 0\n", 3),
    ("dim 2\nqvs 1\ngate F 0 1\n", 3),
    ("dim 3\nqvs 1\ngate R 0 [0,1]\n", 3),          # table length != d
    ("dim 2\nqvs 2\ngate CZ 0 0\n", 3),
    ("dim 2\nqvs 1\ngate X 2 0\n", 3),              # parameter out of range
    ("dim 2\nqvs 1\ngate F 1\n", 3),                # target out of range
    ("dim 2\nqvs 1\nmeasure 1\n", 3),
    ("dim 2\nqvs 1\nbogus 1\n", 3),
    ("dim 2\nqvs 1\ninit 0 0\n", 3),                # wrong init arity
    ("dim 2\nqvs 1\ndim 2\n", 3),                   # duplicate header
    ("qvs 1\ngate F 0\n", 2),                       # gates before dim
    ("dim x\nqvs 1\n", 1),
])
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(CircuitParseError) as err:
        parse_circuit(text)
    assert err.value.line == line


def test_parse_requires_header():
    with pytest.raises(CircuitParseError):
        parse_circuit("qvs 2\n")
    with pytest.raises(CircuitParseError):
        parse_circuit("dim 2\n")


def test_comments_and_blank_lines_ignored():
    c = parse_circuit("\n# hello\ndim 2   # trailing\nqvs 1\n\ngate F 0 # x\n")
    assert c.ops == (("F", 0),)


@st.composite
def circuits(draw):
    d = draw(st.integers(2, 5))
    n = draw(st.integers(1, 3))
    ops = []
    for _ in range(draw(st.integers(0, 6))):
        kind = draw(st.sampled_from(["F", "P", "X", "Z", "CZ", "R", "D3", "M"]))
        t = draw(st.integers(0, n - 1))
        if kind == "F":
            ops.append(("F", t))
        elif kind == "CZ":
            if n < 2:
                continue
            s = draw(st.integers(0, n - 1).filter(lambda v: v != t))
            ops.append(("CZ", t, s))
        elif kind == "R":
            table = tuple(draw(st.floats(-10, 10, allow_nan=False))
                          for _ in range(d))
            ops.append(("R", table, t))
        elif kind == "M":
            ops.append(("M", t))
        else:
            limit = 2 * d if kind == "P" else d
            ops.append((kind, draw(st.integers(0, limit - 1)), t))
    seed = draw(st.none() | st.integers(0, 2 ** 31))
    forced = draw(st.none() | st.tuples(*[st.integers(0, d - 1)] * 3))
    init = None
    if draw(st.booleans()):
        init = tuple((draw(st.sampled_from(["z", "+"])), draw(st.integers(0, d - 1)))
                     for _ in range(n))
    measured = {op[1] for op in ops if op[0] == "M"}
    ops = [op for i, op in enumerate(ops)
           if op[0] != "M" or op not in ops[:i]]  # single measure per QV
    return Circuit(d=d, n=n, init=init, ops=tuple(ops), forced=forced, seed=seed)


@given(circuits())
@settings(max_examples=60, deadline=None)
def test_serialize_parse_round_trip(circ):
    text = serialize_circuit(circ)
    again = parse_circuit(text)
    assert again == circ
    assert serialize_circuit(again) == text


def test_run_mode_agreement_simple():
    c = parse_circuit("dim 2\nqvs 1\ngate F 0\n")
    docs = {m: run_mode(c, m, compare=True, spec_seed=8) for m in
            ("direct", "adqc", "mincontrol")}
    for mode, doc in docs.items():
        assert doc["oracle_fidelity"] > 1 - 1e-10, mode
    assert np.allclose(docs["direct"]["amplitudes"],
                       [[1 / np.sqrt(2), 0], [1 / np.sqrt(2), 0]])


def test_run_mode_empty_circuit():
    c = parse_circuit("dim 3\nqvs 2\n")
    doc = run_mode(c, "adqc")
    amps = np.array(doc["frame_corrected_amplitudes"])
    assert amps[0, 0] == 1 and np.abs(amps[1:]).max() == 0
    assert doc["frame"] == {"x": [0, 0], "z": [0, 0], "xi": 0}


def test_run_mode_compare_with_measurement():
    text = "dim 3\nqvs 2\nseed 4\ngate F 0\ngate CZ 0 1\ngate D3 1 0\nmeasure 0\n"
    c = parse_circuit(text)
    doc = run_mode(c, "adqc", compare=True)
    assert doc["oracle_fidelity"] > 1 - 1e-10
    assert len(doc["register_outcomes"]) == 1
    assert doc["alive"] == [1]


def test_run_mode_hybrid_restricted_alphabet():
    text = ("dim 4\nqvs 2\nvariant hybrid:2\nseed 1\n"
            "gate F 0\ngate X 3 1\ngate R 1 [0.2,0.9,0.2,0.9]\n")
    c = parse_circuit(text)
    doc = run_mode(c, "adqc", compare=True)
    assert doc["oracle_fidelity"] > 1 - 1e-10
    bad = parse_circuit("dim 4\nqvs 2\nvariant hybrid:2\ngate CZ 0 1\n")
    with pytest.raises(ValueError):
        run_mode(bad, "adqc")


def test_run_mode_checkE_variant():
    text = "dim 3\nqvs 2\nvariant checkE\nseed 2\ngate CZ 0 1\ngate P 1 0\n"
    c = parse_circuit(text)
    doc = run_mode(c, "adqc", compare=True)
    assert doc["oracle_fidelity"] > 1 - 1e-10


def test_run_mode_mincontrol_cz_spec():
    text = "dim 3\nqvs 2\nseed 3\ngate CZ 0 1\ngate F 1\ngate D3 1 0\n"
    c = parse_circuit(text)
    doc = run_mode(c, "mincontrol", compare=True, mc_spec="cz")
    assert doc["oracle_fidelity"] > 1 - 1e-10
    with pytest.raises(ValueError):
        run_mode(c, "mincontrol", mc_spec="universal", spec_seed=5)


def test_run_mode_rejects_unknown_mode_and_hybrid_mincontrol():
    c = parse_circuit("dim 2\nqvs 1\ngate F 0\n")
    with pytest.raises(ValueError):
        run_mode(c, "nope")
    h = parse_circuit("dim 4\nqvs 1\nvariant hybrid:2\ngate F 0\n")
    with pytest.raises(ValueError):
        run_mode(h, "mincontrol")


def test_report_layers():
    c = parse_circuit("dim 3\nqvs 2\ngate CZ 0 1\n")
    rep = report_layers(c)
    assert rep == {"layers": 4, "adaptive_measurements": 0,
                   "measurements": 7, "observables": ["x", "x_F"]}
    c50 = parse_circuit("dim 3\nqvs 2\n" + "gate CZ 0 1\n" * 10
                        + "gate P 1 0\n" * 20 + "gate F 1\n" * 20)
    assert report_layers(c50)["adaptive_measurements"] == 0
    c_d3 = parse_circuit("dim 3\nqvs 1\ngate D3 1 0\n")
    assert report_layers(c_d3)["adaptive_measurements"] >= 1


def test_document_json_is_deterministic():
    c = parse_circuit("dim 3\nqvs 2\nseed 11\ngate F 0\ngate CZ 0 1\nmeasure 1\n")
    a = document_to_json(run_mode(c, "adqc", compare=True))
    b = document_to_json(run_mode(c, "adqc", compare=True))
    assert a == b
    doc = json.loads(a)
    assert doc["mode"] == "adqc"
    norm = sum(re * re + im * im for re, im in doc["amplitudes"])
    assert abs(norm - 1) < 1e-9


# ---------------------------------------------------------------------------
# command line

def _run_cli(args, **kw):
    return subprocess.run([sys.executable, "-m", "qvsim.cli", *args],
                          capture_output=True, text=True, **kw)


def test_cli_run_and_replay(tmp_path):
    f = tmp_path / "c.qv"
    f.write_text("dim 3\nqvs 2\nseed 5\ngate F 0\ngate CZ 0 1\ngate R 1 "
                 "[0.1,0.2,0.3]\nmeasure 0\n")
    r1 = _run_cli(["run", str(f), "--mode", "adqc", "--compare"])
    assert r1.returncode == 0, r1.stderr
    r2 = _run_cli(["run", str(f), "--mode", "adqc", "--compare"])
    assert r1.stdout == r2.stdout  # byte-identical replay
    doc = json.loads(r1.stdout)
    assert doc["oracle_fidelity"] > 1 - 1e-10


def test_cli_out_file(tmp_path):
    f = tmp_path / "c.qv"
    f.write_text("dim 2\nqvs 1\ngate F 0\n")
    out = tmp_path / "r.json"
    r = _run_cli(["run", str(f), "--out", str(out)])
    assert r.returncode == 0 and r.stdout == ""
    assert json.loads(out.read_text())["mode"] == "direct"


def test_cli_force_flag(tmp_path):
    f = tmp_path / "c.qv"
    f.write_text("dim 2\nqvs 1\ngate F 0\nmeasure 0\n")
    r = _run_cli(["run", str(f), "--force", "1"])
    assert r.returncode == 0
    assert json.loads(r.stdout)["register_outcomes"] == [1]


def test_cli_parse_error_exit_2(tmp_path):
    f = tmp_path / "bad.qv"
    f.write_text("dim 2\nqvs 1\ngate WAT 0\n")
    r = _run_cli(["run", str(f)])
    assert r.returncode == 2
    assert "line 3" in r.stderr


def test_cli_missing_file_exit_2(tmp_path):
    r = _run_cli(["run", str(tmp_path / "nope.qv")])
    assert r.returncode == 2


def test_cli_zero_probability_exit_3(tmp_path):
    f = tmp_path / "c.qv"
    f.write_text("dim 2\nqvs 1\nmeasure 0\nforce 1\n")
    r = _run_cli(["run", str(f)])
    assert r.returncode == 3
    assert "probability" in r.stderr


def test_run_mode_init_line():
    text = "dim 3\nqvs 2\nseed 6\ninit +1 2\ngate CZ 0 1\ngate F 1\n"
    c = parse_circuit(text)
    doc = run_mode(c, "adqc", compare=True)
    assert doc["oracle_fidelity"] > 1 - 1e-10
    direct = run_mode(c, "direct")
    amps = np.array(direct["amplitudes"]).view(np.float64).reshape(-1, 2)
    assert abs((amps ** 2).sum() - 1) < 1e-9
