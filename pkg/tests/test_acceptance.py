"""End-to-end acceptance checks, one test per numbered criterion.

The conftest prints a PASS/FAIL line per criterion in the terminal summary.
"""

import hashlib
import json
import math
import time
from pathlib import Path

import numpy as np
import pytest

from orbitforge.astro import (ClassicElements, MU_EARTH, elem2rv, mean_motion_period,
                              rv2elem)
from orbitforge.astro.constants import J2_EARTH, REQ_EARTH
from orbitforge.cli import main
from orbitforge.kernel import CModuleTemplate, SimContainer, SysModel, sec2nano
from orbitforge.messaging import Message, sampling_time
from orbitforge.montecarlo import (McPlan, NormalVectorCartDispersion, UniformDispersion,
                                   execute_simulations)
from orbitforge.presets import preset_path
from orbitforge.scenario import (ConfigError, build_scenario, load_config, load_config_file,
                                 run_scenario, with_parameter)

GOLDEN = Path(__file__).parent / "golden"
T_ORBIT = mean_motion_period(MU_EARTH, 7_000_000.0)[1]

criterion = pytest.mark.criterion


@criterion(1, "lifecycle trace -10 / 0.0 / 1.0")
def test_c1_lifecycle_trace():
    start = time.perf_counter()
    sim = SimContainer()
    sim.create_process("dynamicsProcess")
    sim.create_task("dynamicsProcess", "dynamicsTask", sec2nano(5.0))
    module = CModuleTemplate()
    sim.add_model_to_task("dynamicsTask", module, 10)
    module.dummy = -10
    assert module.dummy == -10.0
    sim.initialize_simulation()
    assert module.dummy == 0.0
    sim.single_step_processes()
    assert module.dummy == 1.0
    assert time.perf_counter() - start < 1.0


@criterion(2, "recorder sampling period and sample count")
def test_c2_sampling():
    assert sampling_time(sec2nano(1000.0), sec2nano(1.0), 101) == sec2nano(10.0)
    assert sampling_time(sec2nano(10.0), sec2nano(1.0), 1000) == 1

    class Source(SysModel):
        def __init__(self):
            super().__init__("source")
            self.out = Message(dict)

        def update(self, t):
            self.out.write({}, t)

    sim = SimContainer()
    sim.create_process("p")
    sim.create_task("p", "t", sec2nano(1.0))
    src = Source()
    rec = src.out.recorder(sampling_time(sec2nano(1000.0), sec2nano(1.0), 101))
    sim.add_model_to_task("t", src)
    sim.add_model_to_task("t", rec)
    sim.initialize_simulation()
    sim.configure_stop_time(sec2nano(1000.0))
    sim.execute_simulation()
    assert len(rec) == 101
    assert rec.times()[-1] == sec2nano(1000.0)


@criterion(3, "two-body energy and angular-momentum conservation over one period")
def test_c3_two_body_conservation():
    start = time.perf_counter()
    cfg = load_config_file(preset_path("earth_orbit"))
    cfg = with_parameter(cfg, "simulation.simulation_time", T_ORBIT)
    out = run_scenario(build_scenario(cfg, "earthOrbit"))
    r, v = out["r_BN_N"], out["v_BN_N"]
    assert out.t_s[-1] == pytest.approx(T_ORBIT, abs=1.0)
    energy = 0.5 * np.sum(v * v, axis=1) - MU_EARTH / np.linalg.norm(r, axis=1)
    drift = np.max(np.abs((energy - energy[0]) / energy[0]))
    h = np.cross(r, v)
    h_hat = h / np.linalg.norm(h, axis=1)[:, None]
    # atan2 form keeps precision for tiny angles where arccos does not
    angle = np.max(np.arctan2(np.linalg.norm(np.cross(h_hat, h_hat[0]), axis=1), h_hat @ h_hat[0]))
    print(f"energy drift {drift:.3e}, h direction drift {angle:.3e} rad")
    assert drift < 1e-8
    assert angle < 1e-9
    assert time.perf_counter() - start < 10.0


def _rel(x, y):
    return abs(x - y) / max(abs(y), 1.0)


@criterion(4, "elem/rv bijection on 1000 random elliptic orbits")
def test_c4_element_roundtrip():
    start = time.perf_counter()
    rng = np.random.default_rng(20240101)
    worst = 0.0
    for _ in range(1000):
        oe = ClassicElements(
            a=rng.uniform(6.6e6, 4.5e7), e=rng.uniform(1e-3, 0.95), i=rng.uniform(0.01, math.pi - 0.01),
            Omega=rng.uniform(0, 2 * math.pi), omega=rng.uniform(0, 2 * math.pi),
            f=rng.uniform(0, 2 * math.pi))
        back = rv2elem(MU_EARTH, *elem2rv(MU_EARTH, oe))
        errs = [abs(back.a - oe.a) / oe.a, abs(back.e - oe.e) / oe.e, _rel(back.i, oe.i)]
        for x, y in ((back.Omega, oe.Omega), (back.omega, oe.omega), (back.f, oe.f)):
            d = (x - y + math.pi) % (2 * math.pi) - math.pi
            errs.append(abs(d) / max(abs(y), 1.0))
        worst = max(worst, *errs)
    print(f"worst relative round-trip error {worst:.3e}")
    assert worst < 1e-9
    assert time.perf_counter() - start < 5.0


@criterion(5, "J2 nodal precession matches the analytic rate within 1%")
def test_c5_j2_precession():
    start = time.perf_counter()
    cfg = load_config_file(preset_path("earth_orbit"))
    cfg = with_parameter(cfg, "gravity.use_j2", True)
    cfg = with_parameter(cfg, "simulation.simulation_time", round(3 * T_ORBIT))
    out = run_scenario(build_scenario(cfg, "earthOrbit"))
    oe = cfg.orbit.elements
    n = 2 * math.pi / T_ORBIT
    p = oe.a * (1 - oe.e ** 2)
    rate = -1.5 * n * J2_EARTH * (REQ_EARTH / p) ** 2 * math.cos(oe.i)
    raan = np.unwrap(out["elements"][:, 3])
    measured = raan[-1] - raan[0]
    expected = rate * out.t_s[-1]
    print(f"analytic rate {rate:.6e} rad/s; dRAAN measured {math.degrees(measured):.5f} deg, "
          f"analytic {math.degrees(expected):.5f} deg")
    assert measured == pytest.approx(expected, rel=0.01)
    assert time.perf_counter() - start < 30.0


@criterion(6, "hill-point attitude control convergence with non-increasing Lyapunov function")
def test_c6_attitude_convergence():
    start = time.perf_counter()
    cfg = load_config_file(preset_path("attitude_control"))
    assert np.array_equal(cfg.spacecraft.I_sc, np.diag([900.0, 800.0, 600.0]))
    assert cfg.spacecraft.mass == 750.0
    assert (cfg.control.K, cfg.control.Ki, cfg.control.P) == (3.5, -1.0, 30.0)
    inst = build_scenario(cfg, "attitudeControl")
    out = run_scenario(inst, mode="hillPoint", stop=sec2nano(600.0))
    sigma, dw = out["sigma_BR"], out["omega_BR_B"]
    assert out.t_s[-1] == 600.0
    assert np.linalg.norm(sigma[-1]) < 1e-3
    assert np.linalg.norm(dw[-1]) < 1e-4

    # V = 2K ln(1 + |s|^2) + 1/2 dw' I dw, sampled where the controller updated
    K, I = cfg.control.K, cfg.spacecraft.I_sc
    fsw = sec2nano(cfg.simulation.fsw_time_step)
    mask = (out.times % fsw == 0) & (out.times > 0)
    s2 = np.sum(sigma[mask] ** 2, axis=1)
    V = 2 * K * np.log1p(s2) + 0.5 * np.einsum("ij,jk,ik->i", dw[mask], I, dw[mask])
    steps = np.diff(V)
    print(f"final |sigma_BR| {np.linalg.norm(sigma[-1]):.3e}, |omega_BR| {np.linalg.norm(dw[-1]):.3e}, "
          f"max dV {steps.max():.3e}")
    assert np.all(steps <= 1e-9)
    assert time.perf_counter() - start < 30.0


@criterion(7, "Monte Carlo bounds, mean and worker-count independence")
def test_c7_monte_carlo(tmp_path):
    start = time.perf_counter()
    cfg = load_config_file(preset_path("earth_orbit"))
    cfg = with_parameter(cfg, "simulation.simulation_time", 100.0)
    disp = [UniformDispersion("spacecraft.mass", 700.0, 800.0),
            NormalVectorCartDispersion("spacecraft.r_CN_N_init", 1000.0)]
    archives = {}
    for workers in (1, 4):
        plan = McPlan(cfg, "earthOrbit", execution_count=100, archive_dir=tmp_path / f"w{workers}",
                      master_seed=42, dispersions=disp, workers=workers)
        archives[workers] = execute_simulations(plan)
    m1 = (tmp_path / "w1" / "manifest.json").read_bytes()
    m4 = (tmp_path / "w4" / "manifest.json").read_bytes()
    assert hashlib.sha256(m1).digest() == hashlib.sha256(m4).digest()
    for k in range(100):
        for name in ("outputs.csv", "telemetry.jsonl"):
            assert (tmp_path / "w1" / f"run_{k}" / name).read_bytes() == \
                (tmp_path / "w4" / f"run_{k}" / name).read_bytes()
    runs = json.loads(m1)["runs"]
    assert len(runs) == 100 and all(r["status"] == "success" for r in runs)
    masses = np.array([r["values"]["spacecraft.mass"] for r in runs])
    assert np.all((masses >= 700.0) & (masses <= 800.0))
    print(f"ensemble mass mean {masses.mean():.3f} kg")
    assert 741.0 <= masses.mean() <= 759.0
    assert time.perf_counter() - start < 120.0


@criterion(8, "execution-order golden files")
def test_c8_execution_order_golden():
    sim = SimContainer()
    sim.create_process("dynamicsProcess")
    sim.create_task("dynamicsProcess", "dynamicsTask", sec2nano(5.0))
    sim.add_model_to_task("dynamicsTask", CModuleTemplate(), 10)
    assert sim.show_execution_order() == (GOLDEN / "exec_order_template.txt").read_text()

    inst = build_scenario(load_config_file(preset_path("attitude_control")), "attitudeControl")
    text = inst.show_execution_order()
    assert text == (GOLDEN / "exec_order_attitude.txt").read_text()
    dyn = [l.strip() for l in text.splitlines()[3:8]]
    assert dyn == ["extForceTorque [300]", "bskSat [201]", "planetEphemeris [200]",
                   "earthEphem [199]", "SimpleNavigation [109]"]


@criterion(9, "config gate: golden YAML loads, triangle-rule violation rejected")
def test_c9_config_gate():
    cfg = load_config_file(preset_path("basic"))
    assert cfg.spacecraft.mass == 750.0
    assert np.array_equal(cfg.spacecraft.I_sc, np.diag([900.0, 800.0, 700.0]))
    assert cfg.simulation.simulation_time == 1000.0
    assert cfg.simulation.time_step == 1.0
    bad = preset_path("basic").read_text().replace("[900.0, 0.0, 0.0,", "[1000.0, 0.0, 0.0,") \
        .replace("0.0, 800.0, 0.0,", "0.0, 100.0, 0.0,").replace("0.0,   0.0, 700.0]", "0.0,   0.0, 100.0]")
    with pytest.raises(ConfigError, match="inertia triangle rule"):
        load_config(bad)


@criterion(10, "determinism: repeated runs give byte-identical CSV, JSON-lines and SVG")
def test_c10_determinism(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    digests = []
    for k in range(2):
        paths = [f"o{k}.csv", f"o{k}.jsonl", f"o{k}.svg"]
        assert main(["run", str(preset_path("attitude_control")), "--kind", "attitudeControl",
                     "--mode", "hillPoint", "--stop-s", "60", "--csv", paths[0], "--jsonl", paths[1],
                     "--plot", paths[2]]) == 0
        digests.append([hashlib.sha256(Path(p).read_bytes()).hexdigest() for p in paths])
    assert digests[0] == digests[1]
