"""End-to-end acceptance checks, one printed pass/fail line per criterion.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
summary lines; statistical checks use fixed seeds so reruns are exact.
"""

import math
import time
from dataclasses import replace
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from fdrelay.analytic import combine_outage, decode_stage_power, eta, total_outage
from fdrelay.channel import draw_realization, link_sinrs
from fdrelay.cli import build_preset, main
from fdrelay.fde import approx_rate, exact_rate, lambda_spectrum
from fdrelay.mc import estimate_outage, trial_stream
from fdrelay.model import (FIXED_PER_RELAY, MI_EXACT, SystemConfig,
                           apply_param)
from fdrelay.sfun import lower_incomplete_gamma_int

TRIALS = 1_000_000
SEED = 0
IRI_CHECK = (-10.0, 0.0, 10.0)
IRI_ALL = (-10.0, -5.0, 0.0, 5.0, 10.0)
SR_ALL = (0.0, 2.0, 4.0, 6.0, 8.0, 10.0)


def _report(num: int, ok: bool, detail: str) -> None:
    print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {num}: {detail}")


@lru_cache(maxsize=None)
def preset_base(name: str, n=None) -> SystemConfig:
    want = "" if n is None else f"n{n}"
    for label, spec in build_preset(name).variants:
        if label == want:
            return spec.base
    raise KeyError((name, n))


@lru_cache(maxsize=None)
def point_config(name, n, param, value, mi=None) -> SystemConfig:
    cfg = apply_param(preset_base(name, n), param, value)
    return cfg if mi is None else replace(cfg, mi_mode=mi)


@lru_cache(maxsize=None)
def mc_point(name, n, param, value, scheme, trials=TRIALS, mi=None):
    return estimate_outage(point_config(name, n, param, value, mi),
                           scheme, trials, SEED)


@lru_cache(maxsize=None)
def analytic_point(name, n, param, value) -> float:
    return total_outage(point_config(name, n, param, value))


def _null_z(est, p: float) -> float:
    stderr = math.sqrt(p * (1.0 - p) / est.trials)
    return (est.p_hat - p) / stderr if stderr > 0 else math.inf


def _combined_stderr(a, b) -> float:
    return math.sqrt(a.stderr ** 2 + b.stderr ** 2)


def test_criterion_1_special_function_oracle():
    t0 = time.perf_counter()
    worst, n_pts = 0.0, 0
    for n in range(1, 13):
        def integrand(t, n=n):
            return t ** (n - 1) * math.exp(-t)
        for x in np.linspace(-5.0, 40.0, 45):
            want, _ = quad(integrand, 0.0, float(x),
                           epsabs=1e-300, epsrel=1e-12, limit=200)
            got = lower_incomplete_gamma_int(n, float(x))
            worst = max(worst, abs(got - want) / max(abs(want), 1e-300))
            n_pts += 1
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-10 and n_pts >= 500 and elapsed < 1.0
    detail = (f"incomplete-gamma vs quadrature on {n_pts} points: "
              f"worst rel err {worst:.2e} (limit 1e-10), {elapsed:.2f}s")
    _report(1, ok, detail)
    assert ok, detail


def test_criterion_2_circulant_oracle():
    t0 = time.perf_counter()
    rng = np.random.default_rng(42)
    worst_eig, worst_par = 0.0, 0.0
    for trial in range(200):
        t_len = int(rng.choice([4, 8, 16]))
        n = int(rng.integers(1, min(5, t_len)))
        delays = tuple(sorted(
            rng.choice(range(1, t_len), size=n, replace=False).tolist()))
        cfg = SystemConfig(n_relays=n, p_source=float(rng.uniform(0.1, 5.0)),
                           e_relay_budget=float(rng.uniform(0.1, 5.0)),
                           rate=1.0, block_len=t_len, cp_len=t_len - 1,
                           delays=delays)
        real = draw_realization(cfg, trial_stream(trial, 0, n))
        p_r = cfg.e_relay_budget
        spec = lambda_spectrum(real, tuple(range(n)), cfg, p_r)

        taps = np.zeros(t_len, complex)
        taps[0] = np.sqrt(cfg.p_source) * real.h_sd
        for k, d in enumerate(cfg.delays):
            taps[d] += np.sqrt(p_r) * real.h_rd[k]
        circulant = np.stack([np.roll(taps, i) for i in range(t_len)], axis=1)
        eig = np.sort_complex(np.linalg.eigvals(circulant))
        worst_eig = max(worst_eig, float(
            np.max(np.abs(np.sort_complex(spec.lam) - eig))))

        total = float(spec.gamma.sum())
        expected = t_len * (cfg.p_source * abs(real.h_sd) ** 2
                            + p_r * float(np.sum(np.abs(real.h_rd) ** 2)))
        worst_par = max(worst_par, abs(total - expected) / expected)
    elapsed = time.perf_counter() - t0
    ok = worst_eig <= 1e-12 and worst_par <= 1e-9 and elapsed < 5.0
    detail = (f"200 realizations: eigenvalue mismatch {worst_eig:.2e} "
              f"(limit 1e-12), Parseval rel {worst_par:.2e} (limit 1e-9), "
              f"{elapsed:.2f}s")
    _report(2, ok, detail)
    assert ok, detail


def test_criterion_3_combination_law_oracle():
    t0 = time.perf_counter()
    rng = np.random.default_rng(99)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(1, 11))
        p_sd = float(rng.uniform(0, 1))
        p_sr = float(rng.uniform(0, 1))
        cond = rng.uniform(0, 1, size=n).tolist()
        a = combine_outage(p_sd, p_sr, cond, method="binomial")
        b = combine_outage(p_sd, p_sr, cond, method="enumeration")
        worst = max(worst, abs(a - b))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-12 and elapsed < 1.0
    detail = (f"binomial vs subset enumeration over 100 random configs: "
              f"worst abs diff {worst:.2e} (limit 1e-12), {elapsed:.2f}s")
    _report(3, ok, detail)
    assert ok, detail


def test_criterion_4_async_closed_form_vs_mc():
    t0 = time.perf_counter()
    worst_z, fails = 0.0, []
    for n in (5, 10):
        for iri in IRI_CHECK:
            p = analytic_point("fig2", n, "var_iri_db", iri)
            est = mc_point("fig2", n, "var_iri_db", iri, "multi")
            z = _null_z(est, p)
            worst_z = max(worst_z, abs(z))
            if abs(z) > 3:
                fails.append(f"N{n}@{iri:+.0f}dB z={z:+.2f}")
    elapsed = time.perf_counter() - t0
    ok = not fails and elapsed < 120.0
    detail = (f"6 points x 1e6 trials, async approximate MI: worst |z| "
              f"{worst_z:.2f} (limit 3), {elapsed:.1f}s"
              + (f"; outliers: {', '.join(fails)}" if fails else ""))
    _report(4, ok, detail)
    assert ok, detail


def test_criterion_5_sync_closed_form_and_ordering():
    worst_z, min_margin, fails = 0.0, math.inf, []
    for n in (5, 10):
        for iri in IRI_CHECK:
            p = analytic_point("fig3", n, "var_iri_db", iri)
            est = mc_point("fig3", n, "var_iri_db", iri, "multi")
            z = _null_z(est, p)
            worst_z = max(worst_z, abs(z))
            if abs(z) > 3:
                fails.append(f"sync N{n}@{iri:+.0f}dB z={z:+.2f}")
            if iri <= 0:
                a = mc_point("fig2", n, "var_iri_db", iri, "multi")
                margin = (est.p_hat - a.p_hat) / _combined_stderr(est, a)
                min_margin = min(min_margin, margin)
                if margin < 3:
                    fails.append(f"ordering N{n}@{iri:+.0f}dB margin={margin:.1f}")
    ok = not fails
    detail = (f"6 points x 1e6 trials: worst |z| {worst_z:.2f} (limit 3); "
              f"sync>=async margin >= {min_margin:.0f} sigma (limit 3)"
              + (f"; failures: {', '.join(fails)}" if fails else ""))
    _report(5, ok, detail)
    assert ok, detail


def _median_rate_gap(cfg, n_samples: int, seed: int) -> float:
    rng = np.random.default_rng(seed)
    real = draw_realization(cfg, rng, size=n_samples)
    e = eta(cfg.rate, cfg.block_len, cfg.cp_len)
    probe = link_sinrs(real, cfg, decode_stage_power(cfg))
    mask = probe.g_sr >= e
    if cfg.relay_power_policy == FIXED_PER_RELAY:
        p_relay = float(cfg.e_relay_budget)
    else:
        p_relay = cfg.e_relay_budget / np.maximum(mask.sum(axis=-1), 1)
    tx = link_sinrs(real, cfg, p_relay)
    approx = approx_rate(tx, mask, cfg)
    exact = exact_rate(lambda_spectrum(real, mask, cfg, p_relay), cfg)
    keep = approx > 0
    return float(np.median((approx[keep] - exact[keep]) / approx[keep]))


def test_criterion_6_exact_mi_tracks_closed_form():
    lines, fails = [], []
    for n in (5, 10):
        for iri in IRI_CHECK:
            p = analytic_point("fig2", n, "var_iri_db", iri)
            est = mc_point("fig2", n, "var_iri_db", iri, "multi",
                           trials=300_000, mi=MI_EXACT)
            rel = (est.p_hat - p) / p
            below = (p - est.p_hat) / est.stderr if est.p_hat < p else 0.0
            gap = _median_rate_gap(point_config("fig2", n, "var_iri_db", iri),
                                   10_000, 123)
            tag = f"N{n}@{iri:+.0f}dB"
            lines.append(f"{tag} rel={rel * 100:+.0f}% gap={gap * 100:.1f}%")
            if abs(rel) > 0.10:
                fails.append(f"{tag} off closed form by {rel * 100:+.1f}%")
            if below > 3:
                fails.append(f"{tag} below closed form by {below:.1f} stderr")
            if gap >= 0.10:
                fails.append(f"{tag} median rate gap {gap * 100:.1f}%")
    ok = not fails
    detail = ("exact-MI outage vs closed form (3e5 trials) and median "
              "exact-vs-approx rate gap (1e4 draws): " + "; ".join(lines))
    _report(6, ok, detail)
    assert ok, detail


def test_criterion_7_interference_regime_orderings():
    multi_hi = mc_point("fig2", 10, "var_iri_db", 10.0, "multi")
    os_hi = mc_point("fig2", 10, "var_iri_db", 10.0, "os")
    multi_lo = mc_point("fig2", 10, "var_iri_db", -10.0, "multi")
    os_lo = mc_point("fig2", 10, "var_iri_db", -10.0, "os")
    ps_lo = mc_point("fig2", 10, "var_iri_db", -10.0, "ps")

    z_os = (multi_hi.p_hat - os_hi.p_hat) / _combined_stderr(multi_hi, os_hi)
    z_ps = (ps_lo.p_hat - multi_lo.p_hat) / _combined_stderr(multi_lo, ps_lo)
    slack = multi_lo.p_hat - os_lo.p_hat - 3 * _combined_stderr(multi_lo, os_lo)
    ok = z_os >= 3 and z_ps >= 3 and slack <= 0
    detail = (f"N=10, 1e6 trials: high-interference os<multi by {z_os:.1f} "
              f"sigma; low-interference multi<ps by {z_ps:.1f} sigma, "
              f"multi-os slack {slack:+.2e} (<= 0)")
    _report(7, ok, detail)
    assert ok, detail


def test_criterion_8_first_hop_sweep_orderings():
    fails = []
    est = {}
    for name in ("fig4", "fig5"):
        for sr in SR_ALL:
            for scheme in ("multi", "os", "ps"):
                est[(name, sr, scheme)] = mc_point(
                    name, None, "var_sr_db", sr, scheme, trials=200_000)

    worst_z = 0.0
    for sr in SR_ALL:
        m, o = est[("fig4", sr, "multi")], est[("fig4", sr, "os")]
        z = abs(m.p_hat - o.p_hat) / max(_combined_stderr(m, o), 1e-300)
        worst_z = max(worst_z, z)
        if z > 3:
            fails.append(f"fig4@{sr:.0f}dB multi/os differ by {z:.0f} sigma")
    for scheme in ("multi", "os"):
        a, b = est[("fig4", 10.0, scheme)], est[("fig4", 10.0, "ps")]
        if (b.p_hat - a.p_hat) / max(_combined_stderr(a, b), 1e-300) < 3:
            fails.append(f"fig4@10dB {scheme} not below ps")
    for sr in SR_ALL:
        m, o = est[("fig5", sr, "multi")], est[("fig5", sr, "os")]
        p = est[("fig5", sr, "ps")]
        if sr >= 4 and (m.p_hat - o.p_hat) / max(_combined_stderr(m, o), 1e-300) < 3:
            fails.append(f"fig5@{sr:.0f}dB os !< multi "
                         f"(os={o.p_hat:.3g}, multi={m.p_hat:.3g})")
        if (p.p_hat - m.p_hat) / max(_combined_stderr(m, p), 1e-300) < 3:
            fails.append(f"fig5@{sr:.0f}dB multi !< ps")
    ok = not fails
    detail = (f"2e5 trials/point: fig4 worst multi-vs-os gap {worst_z:.0f} "
              f"sigma (limit 3)"
              + (f"; failures: {'; '.join(fails)}" if fails else "; all orderings hold"))
    _report(8, ok, detail)
    assert ok, detail


def test_criterion_9_more_relays_help():
    min_margin, fails = math.inf, []
    for iri in IRI_ALL:
        e5 = mc_point("fig2", 5, "var_iri_db", iri, "multi")
        e10 = mc_point("fig2", 10, "var_iri_db", iri, "multi")
        if e10.p_hat >= e5.p_hat:
            fails.append(f"IRI{iri:+.0f}dB N10={e10.p_hat:.3g} !< N5={e5.p_hat:.3g}")
        if e5.p_hat > 1e-4 and e10.p_hat > 1e-4:
            margin = (e5.p_hat - e10.p_hat) / _combined_stderr(e5, e10)
            min_margin = min(min_margin, margin)
            if margin < 3:
                fails.append(f"IRI{iri:+.0f}dB margin {margin:.1f} sigma")
    ok = not fails
    detail = (f"N=10 below N=5 at all {len(IRI_ALL)} sweep points, 1e6 "
              f"trials; strict margin >= {min_margin:.0f} sigma where both "
              f"exceed 1e-4"
              + (f"; failures: {', '.join(fails)}" if fails else ""))
    _report(9, ok, detail)
    assert ok, detail


def test_criterion_10_parallel_determinism(tmp_path):
    args = ["--preset", "fig2", "--trials", "10000", "--seed", "0"]
    out1, out8 = tmp_path / "w1.csv", tmp_path / "w8.csv"
    assert main(args + ["--workers", "1", "--out", str(out1)]) == 0
    assert main(args + ["--workers", "8", "--out", str(out8)]) == 0
    same = all(
        (tmp_path / f"w1_{label}.csv").read_bytes()
        == (tmp_path / f"w8_{label}.csv").read_bytes()
        for label in ("n5", "n10"))
    detail = ("interference preset at 1e4 trials: 1-worker and 8-worker "
              "CSV outputs byte-identical" if same else
              "worker count changed the CSV output")
    _report(10, same, detail)
    assert same, detail
