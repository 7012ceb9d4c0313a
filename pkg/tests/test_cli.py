import json
import math
from pathlib import Path

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

import oracles
from revkit import cli
from revkit.twolal import read_trace_totals

DATA = Path(cli.__file__).parent / "data"
GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture(autouse=True)
def in_data_dir(monkeypatch):
    monkeypatch.chdir(DATA)
    monkeypatch.delenv("REVKIT_PARAMS", raising=False)


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("argv,golden", [
    (["classify", "rev_or.op"], "classify_rev_or.txt"),
    (["classify", "erase.op", "--dist", "uniform.dist", "--temp", "300", "--format", "json"], "classify_erase.json"),
    (["compile", "half_adder.net", "--verify"], "compile_half_adder.txt"),
    (["energy", "--temp", "300", "--device-energy", "3.9e-26", "--flops-per-watt", "1.28e21", "--format", "csv"],
     "energy.csv"),
    (["sim", "sr8.ckt", "--cycles", "16"], "sim_sr8.txt"),
    (["sim", "or_element.ckt", "--cycles", "1", "--format", "csv"], "sim_or_element.csv"),
    (["pebble", "8", "--recursive", "2"], "pebble_8_k2.txt"),
    (["--seed", "7", "sweep", "--trials", "20", "--max-stages", "4", "--max-length", "6"], "sweep_seed7.txt"),
])
def test_golden_outputs_bit_exact(capsys, argv, golden):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    assert out == (GOLDEN / golden).read_text()


# -- classify -------------------------------------------------------------------

def test_classify_classes(capsys):
    assert "class: ConditionallyReversible" in run(capsys, "classify", "rev_or.op")[1]
    assert "class: UnconditionallyReversible" in run(capsys, "classify", "not.op")[1]
    assert "class: Irreversible" in run(capsys, "classify", "erase.op")[1]


def test_classify_erase_heat(capsys):
    code, out, _ = run(capsys, "classify", "erase.op", "--dist", "uniform.dist", "--temp", "300",
                       "--format", "json")
    data = json.loads(out)
    assert data["loss_bits"] == 1.0
    assert data["min_heat_J"] == pytest.approx(oracles.landauer(300), rel=1e-12)


def test_classify_parse_error_exit_2(capsys, tmp_path):
    bad = tmp_path / "bad.op"
    bad.write_text("space 2\nmap 00 9\n")
    code, _, err = run(capsys, "classify", str(bad))
    assert code == 2
    assert f"{bad}:2:" in err


def test_classify_output_file(capsys, tmp_path):
    target = tmp_path / "out.txt"
    code, out, _ = run(capsys, "classify", "rev_or.op", "-o", str(target))
    assert code == 0 and out == ""
    assert target.read_text() == (GOLDEN / "classify_rev_or.txt").read_text()


def test_missing_file_exit_2(capsys):
    assert run(capsys, "classify", "nope.op")[0] == 2


# -- compile / verify -------------------------------------------------------------

def test_compile_and1(capsys):
    code, out, _ = run(capsys, "compile", "and1.net")
    assert code == 0
    assert "# 3 steps" in out


def test_compile_cyclic_exit_2(capsys):
    assert run(capsys, "compile", "cyclic.net")[0] == 2


def test_compile_to_file_then_verify(capsys, tmp_path):
    sched = tmp_path / "ha.sched"
    assert run(capsys, "compile", "half_adder.net", "-o", str(sched))[0] == 0
    code, out, _ = run(capsys, "verify", str(sched), "half_adder.net")
    assert code == 0 and "PASS" in out


def test_verify_failure_exit_3(capsys, tmp_path):
    sched = tmp_path / "ha.sched"
    run(capsys, "compile", "half_adder.net", "-o", str(sched))
    lines = sched.read_text().splitlines()
    # drop the final decompute step so an ancilla stays dirty
    sched.write_text("\n".join(lines[:-1]) + "\n")
    code, out, _ = run(capsys, "verify", str(sched), "half_adder.net")
    assert code == 3 and "FAIL" in out


# -- sim ------------------------------------------------------------------------

def test_sim_deterministic(capsys):
    first = run(capsys, "sim", "sr8.ckt", "--cycles", "16", "--format", "json")[1]
    second = run(capsys, "sim", "sr8.ckt", "--cycles", "16", "--format", "json")[1]
    assert first == second
    data = json.loads(first)
    assert data["violation_count"] == 0
    assert "".join(map(str, data["outputs"]["Q32"])) == "0000000010110010"


def test_sim_tau_halved_doubles_adiabatic(capsys):
    base = json.loads(run(capsys, "sim", "sr8.ckt", "--cycles", "16", "--format", "json")[1])
    tau = base["params"]["ramp_time"]
    half = json.loads(run(capsys, "sim", "sr8.ckt", "--cycles", "16", "--format", "json",
                          "--tau", repr(tau / 2))[1])
    assert half["adiabatic_J"] / base["adiabatic_J"] == pytest.approx(2.0, rel=0.05)


def test_sim_bad_step_driver_lists_violations(capsys):
    code, out, _ = run(capsys, "sim", "bad_step_driver.ckt")
    assert code == 0
    count = int(next(l for l in out.splitlines() if l.startswith("violations")).split()[1])
    assert count >= 1
    assert "turn_on" in out


def test_sim_conflict_exit_4(capsys):
    code, _, err = run(capsys, "sim", "conflict.ckt")
    assert code == 4 and "conflict" in err


def test_sim_trace_file_roundtrip(capsys, tmp_path):
    trace = tmp_path / "t.csv"
    data = json.loads(run(capsys, "sim", "sr8.ckt", "--cycles", "4", "--trace", str(trace), "--format", "json")[1])
    totals = read_trace_totals(trace.read_text())
    assert totals.adiabatic == data["adiabatic_J"]
    assert totals.leakage == data["leakage_J"]
    assert totals.total == data["total_J"]


def test_sim_params_env_and_set_override(capsys, tmp_path, monkeypatch):
    cfg = tmp_path / "p.cfg"
    cfg.write_text("ramp_time = 2e-6\n")
    monkeypatch.setenv("REVKIT_PARAMS", str(cfg))
    data = json.loads(run(capsys, "sim", "or_element.ckt", "--format", "json")[1])
    assert data["params"]["ramp_time"] == 2e-6
    data = json.loads(run(capsys, "sim", "or_element.ckt", "--format", "json", "--set", "ramp_time=4e-6")[1])
    assert data["params"]["ramp_time"] == 4e-6
    data = json.loads(run(capsys, "sim", "or_element.ckt", "--format", "json", "--tau", "8e-6",
                          "--set", "ramp_time=4e-6")[1])
    assert data["params"]["ramp_time"] == 8e-6


@pytest.mark.parametrize("pair", ["bogus=1", "capacitance=-1", "ramp_time=abc", "novalue"])
def test_sim_bad_overrides_exit_2(capsys, pair):
    assert run(capsys, "sim", "or_element.ckt", "--set", pair)[0] == 2


def test_sim_zero_cycles_exit_2(capsys):
    assert run(capsys, "sim", "or_element.ckt", "--cycles", "0")[0] == 2


# -- energy -----------------------------------------------------------------------

def energy_json(capsys, *argv):
    code, out, _ = run(capsys, "energy", "--format", "json", *argv)
    assert code == 0
    return json.loads(out)


def test_energy_landauer_floor(capsys):
    data = energy_json(capsys, "--temp", "300")
    assert data["landauer_floor"] == pytest.approx(1.380649e-23 * 300 * math.log(2), rel=1e-12)


def test_energy_box4_ratio(capsys):
    data = energy_json(capsys, "--temp", "300", "--device-energy", "3.9e-26")
    assert data["efficiency_vs_landauer"] == pytest.approx(oracles.landauer(300) / 3.9e-26, rel=1e-12)
    assert abs(data["efficiency_vs_landauer"] / 74000 - 1) < 0.02


@pytest.mark.parametrize("temp", ["0", "-5"])
def test_energy_bad_temperature_exit_2(capsys, temp):
    assert run(capsys, "energy", "--temp", temp)[0] == 2


def test_energy_params_file(capsys):
    data = energy_json(capsys, "--params", str(DATA.parent.parent.parent / "params" / "ev_point.cfg"))
    assert data["adiabatic_to_signal_ratio"] == pytest.approx(1e-5 / 1.1, rel=1e-9)


def test_energy_text_has_header(capsys):
    out = run(capsys, "--seed", "3", "energy")[1]
    assert out.splitlines()[0] == "# revkit energy seed=3"


# -- pebble / sweep / misc -------------------------------------------------------------

def test_pebble_infeasible_exit_3(capsys):
    code, out, _ = run(capsys, "pebble", "4", "--pebbles", "1")
    assert code == 3 and "infeasible" in out


def test_pebble_exhaustive(capsys):
    code, out, _ = run(capsys, "pebble", "4", "--pebbles", "3")
    assert code == 0
    moves = [(("place" if tok[0] == "+" else "remove"), int(tok[1:])) for tok in out.split(":")[-1].split()]
    assert oracles.pebble_legal(4, moves) <= 3


def test_sweep_seed_changes_draws(capsys):
    a = run(capsys, "--seed", "1", "sweep", "--trials", "5", "--max-stages", "3", "--max-length", "4")
    b = run(capsys, "--seed", "1", "sweep", "--trials", "5", "--max-stages", "3", "--max-length", "4")
    assert a == b and a[0] == 0


@pytest.mark.parametrize("argv", [[], ["frobnicate"], ["pebble", "x", "--pebbles", "2"],
                                  ["pebble", "3"], ["sim"]])
def test_usage_errors_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


FUZZ_TARGETS = [
    (["classify"], "rev_or.op"),
    (["classify", "erase.op", "--dist"], "uniform.dist"),
    (["compile", "--verify"], "half_adder.net"),
    (["sim", "--cycles", "2"], "or_element.ckt"),
    (["energy", "--params"], "../../../params/ev_point.cfg"),
]


@settings(max_examples=150, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(st.sampled_from(FUZZ_TARGETS), st.randoms(use_true_random=False))
def test_malformed_inputs_never_crash(capsys, tmp_path, target, rng):
    argv, name = target
    text = list((DATA / name).read_text())
    for _ in range(rng.randint(1, 6)):
        pos = rng.randrange(len(text))
        action = rng.random()
        if action < 0.4:
            del text[pos]
        elif action < 0.8:
            text[pos] = rng.choice("01 \n#xp;=,-.9e~")
        else:
            text.insert(pos, rng.choice(["\n", " ", "AND", "map", "driver", "1", "-1", "nan", "inf"]))
    bad = tmp_path / ("fuzz" + Path(name).suffix)
    bad.write_text("".join(text))
    code = cli.main(argv + [str(bad)])
    capsys.readouterr()
    assert code in (0, 2, 3, 4)
