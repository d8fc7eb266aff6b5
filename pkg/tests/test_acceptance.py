"""Acceptance criteria, one test each, with the tolerances pinned below.

Each test records a ``[PASS]``/``[FAIL]`` line that pytest prints in the
"acceptance criteria" section of the terminal summary.
"""
import json
import math

import numpy as np

from hstbeam import (ArrayConfig, ArrayType, DeploymentGeometry, PositioningErrorModel,
                     beam_window, build_phase_mapper, directivity, dual_transform,
                     effective_probability, exact_beam_window, half_power_beamwidth,
                     interval_probability, make_grid, mc_effective_probability,
                     measure_pattern, search_beam_count, simulate_traversal, summarize,
                     sweep_directivity_vs_sigma, sweep_directivity_vs_theta,
                     sweep_spacing_vs_theta)
from hstbeam.cli import main
from hstbeam.rail_geometry import BeamWindow, position_for_angle
from hstbeam.traversal import TraversalConfig, events_to_csv, sector_rail_span

CFG = ArrayConfig.from_carrier(2.4e9, 0.5)
GEOM = DeploymentGeometry(50.0)
ALPHA = make_grid(CFG, 1).sector_width
C = 2.782

TRADEOFF_RTOL = 1e-12
DUALITY_RTOL = 1e-12
ADDITIVITY_RTOL = 1e-9
SMALL_ANGLE_RTOL = 0.02
Q_ANCHOR_ATOL = 1e-6
ONE_MINUS_Q1 = 0.8413447  # 1 - Q(1), mpmath: 0.84134474606854294859
MC_SAMPLES = 10 ** 6
MC_SIGMAS = 3.0
PATTERN_RTOL = 0.05


def sector_interior(n):
    return np.linspace(math.pi / 2 - ALPHA / 2, math.pi / 2 + ALPHA / 2, n + 2)[1:-1]


def test_c01_tradeoff_identity(acceptance_report):
    rng = np.random.default_rng(101)
    worst = 0.0
    for _ in range(1000):
        t = ArrayType.BROADSIDE if rng.random() < 0.5 else ArrayType.ORDINARY_END_FIRE
        wavelength = float(rng.uniform(0.01, 1.0))
        cfg = ArrayConfig(spacing=float(rng.uniform(0.05, 5.0)) * wavelength,
                          wavelength=wavelength, array_type=t)
        n = int(rng.integers(1, 4097))
        product = directivity(cfg, n) * half_power_beamwidth(cfg, n)
        target = t.factor * C / math.pi
        worst = max(worst, abs(product - target) / target)
    ok = worst <= TRADEOFF_RTOL
    acceptance_report("C1 tradeoff identity D*theta_h = T*C/pi",
                      ok, f"1000 draws, worst rel err {worst:.2e} (tol {TRADEOFF_RTOL:g})")
    assert ok


def test_c02_duality(acceptance_report):
    rng = np.random.default_rng(102)
    mismatches = 0
    cases = 0
    for _ in range(500):
        cfg = ArrayConfig(spacing=float(rng.uniform(0.01, 1.0)), wavelength=0.125)
        n = int(rng.integers(1, 513))
        for scale in (2, 3, 4, 5, 8):
            for c2, n2 in (dual_transform(cfg, n, scale), dual_transform(cfg, n * scale, 1 / scale)):
                base_n = n if n2 == n * scale else n * scale
                cases += 1
                if (half_power_beamwidth(c2, n2) != half_power_beamwidth(cfg, base_n)
                        or directivity(c2, n2) != directivity(cfg, base_n)):
                    mismatches += 1
    target = 2 * 0.5 * 64
    rows = sweep_spacing_vs_theta(CFG, GEOM, PositioningErrorModel(1.0), 0.8, target,
                                  sector_interior(50))
    worst = max(abs(CFG.spacing / r.spacing - r.optimal_beam_count / r.base_beam_count)
                / (r.optimal_beam_count / r.base_beam_count)
                for r in rows if r.status == "ok")
    ok = mismatches == 0 and worst <= DUALITY_RTOL
    acceptance_report("C2 duality", ok,
                      f"{mismatches}/{cases} rescalings not bitwise exact; "
                      f"sweep-spacing d/d' vs N'/N worst rel err {worst:.2e}")
    assert ok


def test_c03a_geometry_additivity(acceptance_report):
    thetas = sector_interior(100)
    counts = np.unique(np.geomspace(1, 4096, 100).astype(int))
    counts = np.concatenate([counts, np.arange(1, 101 - counts.size + 1) + 5000])[:100]
    worst = 0.0
    points = 0
    for n in counts:
        g = make_grid(CFG, int(n))
        for theta in thetas:
            w = beam_window(theta, g, GEOM)
            gamma = GEOM.perpendicular_distance * g.half_power_beamwidth / math.sin(theta)
            worst = max(worst,
                        abs(w.left_edge_distance + w.right_edge_distance - gamma) / gamma,
                        abs(w.coverage_length - gamma) / gamma)
            points += 1
    ok = points == 10_000 and worst <= ADDITIVITY_RTOL
    acceptance_report("C3a additivity gamma_l + gamma_r = gamma = h*theta_h/sin",
                      ok, f"{points} (theta_b, N) points, worst rel err {worst:.2e}")
    assert ok


def test_c03b_exact_intercepts_vs_small_angle(acceptance_report):
    # Theta_h <= 0.03 rad  <=>  N >= 60 at d = lambda/2
    thetas = np.linspace(math.pi / 3, 2 * math.pi / 3, 201)
    worst = 0.0
    worst_at = None
    for n in (60, 64, 128, 256, 1024):
        g = make_grid(CFG, n)
        assert g.half_power_beamwidth <= 0.03
        for theta in thetas:
            exact = exact_beam_window(theta, g, GEOM).coverage_length
            approx = beam_window(theta, g, GEOM).coverage_length
            dev = abs(exact - approx) / exact
            if dev > worst:
                worst, worst_at = dev, (theta, n)
    ok = worst <= SMALL_ANGLE_RTOL
    acceptance_report(
        "C3b exact rail intercepts vs small-angle gamma within 2%", ok,
        f"worst rel deviation {worst:.3f} at theta_b={worst_at[0]:.4f} rad, N={worst_at[1]}; "
        f"rail footprint is h*theta_h/sin^2(theta_b), so 1 - sin(pi/3) = "
        f"{1 - math.sin(math.pi / 3):.3f} is the floor")
    assert ok


def test_c04_probability(acceptance_report):
    # gamma_l = gamma_r = sigma = 1 m
    sym = effective_probability(BeamWindow(0, 1.0, 1.0, 2.0), PositioningErrorModel(1.0))
    anchor_ok = abs(sym - ONE_MINUS_Q1) <= Q_ANCHOR_ATOL

    rng = np.random.default_rng(104)
    misses = []
    for k in range(20):
        n = int(2 ** rng.integers(3, 9))
        theta = float(rng.uniform(math.pi / 2 - ALPHA / 2, math.pi / 2 + ALPHA / 2))
        w = beam_window(theta, make_grid(CFG, n), GEOM)
        sigma = float(rng.uniform(0.3, 1.5)) * w.coverage_length / 2
        err = PositioningErrorModel(sigma)
        exact = interval_probability(w, err)
        est = mc_effective_probability(w, err, MC_SAMPLES, seed=1000 + k)
        if abs(est.estimate - exact) > MC_SIGMAS * est.standard_error:
            misses.append((k, est.estimate, exact, est.standard_error))
    ok = anchor_ok and not misses
    acceptance_report("C4 probability anchor and Monte Carlo", ok,
                      f"1-Q(1) -> {sym:.7f} (tol {Q_ANCHOR_ATOL:g}); "
                      f"{20 - len(misses)}/20 MC windows within 3 SE")
    assert ok


def _enumerate(theta, sigma, p_th, n_max):
    best = None
    n = 1
    while n <= n_max:
        p = effective_probability(beam_window(theta, make_grid(CFG, n), GEOM),
                                  PositioningErrorModel(sigma))
        if p >= p_th:
            best = n
        n *= 2
    return best


def test_c05_optimizer_soundness(acceptance_report):
    rng = np.random.default_rng(105)
    n_max = 1024
    disagreements = violations = feasible = 0
    for _ in range(1000):
        theta = float(rng.uniform(math.pi / 2 - ALPHA / 2, math.pi / 2 + ALPHA / 2))
        if abs(theta - math.pi / 2) < 1e-9:
            continue
        sigma = float(10 ** rng.uniform(-2, 1.3))
        p_th = float(rng.uniform(0.55, 0.99))
        r = search_beam_count(CFG, GEOM, theta, PositioningErrorModel(sigma), p_th, n_max)
        if r.optimal_beam_count != _enumerate(theta, sigma, p_th, n_max):
            disagreements += 1
        if r.feasible:
            feasible += 1
            n = r.optimal_beam_count
            above = n == n_max or effective_probability(
                beam_window(theta, make_grid(CFG, 2 * n), GEOM),
                PositioningErrorModel(sigma)) < p_th
            if r.achieved_probability < p_th or not above:
                violations += 1
    ok = disagreements == 0 and violations == 0
    acceptance_report("C5 optimizer == exhaustive enumeration", ok,
                      f"1000 triples ({feasible} feasible): {disagreements} disagreements, "
                      f"{violations} constraint violations")
    assert ok


def test_c06_directivity_vs_sigma(acceptance_report):
    sigmas = np.linspace(0.1, 10.0, 100)
    rows = sweep_directivity_vs_sigma(CFG, GEOM, math.pi / 4, [0.7, 0.8, 0.9], sigmas)
    bad = []
    for p in (0.7, 0.8, 0.9):
        d = [r.directivity or 0.0 for r in rows if r.p_th == p]
        if any(b > a for a, b in zip(d, d[1:])):
            bad.append(p)
        first_last = (d[0], d[-1])
    ok = not bad
    acceptance_report("C6 D nonincreasing in sigma at theta_b=pi/4", ok,
                      f"P_th in (0.7, 0.8, 0.9), 100 sigma points in [0.1, 10] m; "
                      f"violations at {bad or 'none'}; P_th=0.9 D from {first_last[0]:g} "
                      f"to {first_last[1]:g}")
    assert ok


def test_c07_directivity_vs_theta_not_monotone(acceptance_report):
    rows = sweep_directivity_vs_theta(CFG, GEOM, PositioningErrorModel(1.0), 0.8,
                                      sector_interior(50))
    d = np.array([r.directivity for r in rows if r.status == "ok"])
    diffs = np.sign(np.diff(d))
    ups, downs = int(np.sum(diffs > 0)), int(np.sum(diffs < 0))
    ok = len(rows) == 50 and ups > 0 and downs > 0
    acceptance_report("C7 D vs theta_b has no monotonicity", ok,
                      f"{len(d)}/50 feasible points, {ups} rises and {downs} falls")
    assert ok


def test_c08_codebook_vs_closed_forms(acceptance_report):
    details = []
    ok = True
    for m in (16, 32, 64):
        g = make_grid(CFG, m)
        mapper = build_phase_mapper(CFG, g)
        assert mapper.element_count == m
        hp, d = half_power_beamwidth(CFG, m), directivity(CFG, m)
        # the two beams straddling broadside, where the closed forms apply
        for i in (m // 2 - 1, m // 2):
            pat = measure_pattern(mapper.column(i), CFG, hp / 20)
            e_hp = abs(pat.measured_hpbw - hp) / hp
            e_d = abs(pat.measured_directivity - d) / d
            ok &= e_hp <= PATTERN_RTOL and e_d <= PATTERN_RTOL
        details.append(f"M={m}: hpbw {e_hp:.2%}, D {e_d:.2%}")
    acceptance_report("C8 measured pattern vs closed forms within 5%", ok, "; ".join(details))
    assert ok


def test_c09_traversal(acceptance_report):
    n = 16
    g = make_grid(CFG, n)
    mapper = build_phase_mapper(CFG, g)
    start, end = sector_rail_span(g, GEOM)
    tc = TraversalConfig(135.0, 1e-3, start, end, PositioningErrorModel(0.0), seed=0)
    s = summarize(simulate_traversal(tc, g, mapper, GEOM), n, tc.time_step)
    perfect_ok = s.effectiveness_rate == 1.0 and s.switch_count == n - 1

    theta = 1.1
    x0 = float(position_for_angle(theta, GEOM))
    sigma = 0.8
    local = TraversalConfig(1e-9, 1.0, x0, x0 + 1e-4, PositioningErrorModel(sigma), seed=9)
    events = simulate_traversal(local, g, mapper, GEOM)
    rate = summarize(events).effectiveness_rate
    w = exact_beam_window(theta, g, GEOM)
    p = interval_probability(w, PositioningErrorModel(sigma))
    se = math.sqrt(p * (1 - p) / len(events))
    local_ok = abs(rate - p) <= 3 * se

    noisy = TraversalConfig(135.0, 1e-3, start, end, PositioningErrorModel(1.5), seed=77)
    a = events_to_csv(simulate_traversal(noisy, g, mapper, GEOM), precision=17)
    b = events_to_csv(simulate_traversal(noisy, g, mapper, GEOM), precision=17)
    det_ok = a == b
    ok = perfect_ok and local_ok and det_ok
    acceptance_report("C9 traversal", ok,
                      f"sigma=0: rate {s.effectiveness_rate:g}, {s.switch_count} switches "
                      f"(want {n - 1}); local rate {rate:.4f} vs {p:.4f} +- 3*{se:.4f}; "
                      f"log identical={det_ok}")
    assert ok


SUBCOMMAND_FILES = {
    "tradeoff": ["tradeoff.csv"],
    "optimize": ["optimize.csv"],
    "sweep-theta": ["sweep_theta.csv"],
    "sweep-spacing": ["sweep_spacing.csv"],
    "sweep-sigma": ["sweep_sigma.csv"],
    "codebook": ["codebook_mapper.csv", "codebook_patterns.csv"],
    "simulate": ["simulate_events.csv", "simulate_summary.csv"],
}


def test_c10_cli_reproducibility(tmp_path, capsys, acceptance_report):
    cfg_path = tmp_path / "run.json"
    cfg_path.write_text(json.dumps({
        "array": {"spacing_over_lambda": 0.5, "carrier_frequency_hz": 2.4e9},
        "geometry": {"h_m": 50.0},
        "error": {"sigma_m": 1.0},
        "optimizer": {"p_th": 0.8, "theta_b_deg": 45.0},
        "traversal": {"beam_count": 16, "time_step_s": 0.002, "seed": 5},
    }))
    differing = []
    for sub, names in SUBCOMMAND_FILES.items():
        outputs = []
        for run in ("a", "b"):
            assert main([sub, "--config", str(cfg_path), "--out", str(tmp_path / run)]) == 0
            outputs.append([(tmp_path / run / name).read_bytes() for name in names])
        if outputs[0] != outputs[1]:
            differing.append(sub)
    capsys.readouterr()
    main(["optimize", "--config", str(cfg_path), "--out", str(tmp_path / "c")])
    printed = json.loads(capsys.readouterr().out)
    lib = search_beam_count(CFG, GEOM, math.radians(45.0), PositioningErrorModel(1.0), 0.8)
    same = (printed["optimal_beam_count"] == lib.optimal_beam_count
            and printed["directivity"] == lib.directivity
            and printed["half_power_beamwidth"] == lib.half_power_beamwidth
            and printed["achieved_probability"] == lib.achieved_probability)
    ok = not differing and same
    acceptance_report("C10 CLI reproducibility", ok,
                      f"{len(SUBCOMMAND_FILES) - len(differing)}/{len(SUBCOMMAND_FILES)} "
                      f"subcommands byte-identical; optimize == library: {same} "
                      f"(N*={lib.optimal_beam_count}, P={lib.achieved_probability:.6f})")
    assert ok
