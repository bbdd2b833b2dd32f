"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the lines appear in the
output even without ``-s``.  Criterion 10 is exploratory: its line is
printed but it never fails the run.
"""
import math
import time

import numpy as np
import pytest

from oscexp import experiments, fourierdecay, oscquad
from oscexp.experiments import resolve_threads

THREADS = resolve_threads(0)


def report(capsys, number, title, ok, detail, gating=True):
    status = "PASS" if ok else ("FAIL" if gating else "FAIL (non-gating)")
    with capsys.disabled():
        print(f"\n[acceptance {number:>2}] {status}: {title} -- {detail}")
    if gating:
        assert ok, detail


def summarise(result):
    return "; ".join(f"{name}: {v.observed}" + (f" ({v.detail})" if v.detail else "")
                     for name, v in result.verdicts.items())


def failed(result):
    return [name for name, v in result.verdicts.items() if v.gating and not v.ok]


def test_01_closed_form_matches_damped_integral(capsys):
    start = time.perf_counter()
    res = experiments.closed_form_check((1, 2, 3), trials=200, seed=0, threads=THREADS, rtol=1e-6)
    elapsed = time.perf_counter() - start
    ok = res.all_expected and elapsed < 60
    report(capsys, 1, "closed form vs damped integral, 200 trials, k = 1..3", ok,
           f"{summarise(res)}; {elapsed:.1f} s (limit 60 s)")


def test_02_b_marginal_constant(capsys):
    res = experiments.b_marginal_check(cases=6, seed=0, rtol=1e-8)
    ratios = sorted({round(r["ratio_8pi_over_numeric"], 12) for r in res.rows})
    report(capsys, 2, "b-marginal constant (4 pi/p)^{k/2} det(I+A^2)^{1/2}", res.all_expected,
           f"{summarise(res)}; (8 pi)-constant/numeric ratios {ratios}")


@pytest.mark.parametrize("k", [2, 3])
def test_03_eigenvalue_pushforward(capsys, k):
    start = time.perf_counter()
    res = experiments.weyl_check(k, samples=1_000_000, seed=0, rtol=0.01)
    elapsed = time.perf_counter() - start
    report(capsys, 3, f"eigenvalue pushforward ratio constancy, k = {k}, 1e6 samples",
           res.all_expected and elapsed < 120, f"{summarise(res)}; {elapsed:.1f} s (limit 120 s)")


@pytest.mark.parametrize("k", [1, 2, 3])
def test_04_eigenvalue_integral_bracket(capsys, k):
    res = experiments.threshold_scan(k, [2 * k + 1.5, 2 * k + 2.5], [10.0, 1e2, 1e3, 1e4])
    report(capsys, 4, f"eigenvalue-integral bracket around p0 = {2 * k + 2}, k = {k}", res.all_expected,
           summarise(res))


def test_05_affine_tail_scaling(capsys):
    start = time.perf_counter()
    res = experiments.exponent_scan("affine", 2, [4.0, 6.0, 8.0], L=100.0, slices=8, samples=32, seed=0,
                                    threads=THREADS, window=0.1)
    elapsed = time.perf_counter() - start
    boundary = next(r for r in res.rows if r["p"] == 6.0 and r["exponent_fit"] is not None)["exponent_fit"]
    report(capsys, 5, "affine exponent scan, k = 2, p = 4, 6, 8", res.all_expected and elapsed < 600,
           f"{summarise(res)}; p = 6 slope {boundary:.4f} at the divergence boundary -1; {elapsed:.1f} s")


def test_06_stationary_phase_decay(capsys):
    a11 = [1e2, 1e3, 1e4]
    affine = experiments.omega_decay(2, "affine", a11, samples=50, seed=0, threads=THREADS)
    homog = experiments.omega_decay(2, "homogeneous", a11, samples=50, seed=0, threads=THREADS)
    later = experiments.omega_decay(2, "homogeneous", [1e4, 1e5, 1e6], samples=50, seed=0, threads=THREADS)
    floor = oscquad.fresnel_floor_constant(-1.0, 1.0, 10.0)
    ok = (not failed(affine)) and homog.verdicts["delta_floor"].ok and homog.verdicts["all_converged"].ok \
        and floor > 0
    detail = (f"affine: {summarise(affine)} | homogeneous (finding; decay not gated): {summarise(homog)} | "
              f"homogeneous over a11 = 1e4..1e6 (information): {later.verdicts['decay_exponent'].detail} | "
              f"Fresnel floor constant {floor:.6f}")
    report(capsys, 6, "stationary-phase decay and delta floor, k = 2, 50 samples per a11", ok, detail)


def test_07_region_measure(capsys):
    res = experiments.measure_check((2, 3), (1.0, 4.0), samples=1_000_000, seed=0, rtol=0.02)
    report(capsys, 7, "region measure: hit-or-miss vs exact, k = 2, 3, both families", res.all_expected,
           summarise(res))


def test_08_homogeneous_boundary(capsys):
    k1 = experiments.exponent_scan("homogeneous", 1, [1.5, 2.0, 3.0], L=100.0, slices=8, samples=8, seed=0,
                                   threads=THREADS, window=0.1)
    k2 = experiments.exponent_scan("homogeneous", 2, [3.0, 4.0, 5.0], L=1e4, slices=8, samples=32, seed=0,
                                   threads=THREADS, window=0.1)
    bracket = experiments.theta_1d_bracket((2.2, 1.8), (10.0, 1e3, 1e5, 1e7))
    ok = k1.all_expected and k2.all_expected and bracket.all_expected
    report(capsys, 8, "homogeneous exponent scans k = 1, 2 and the k = 1 bracket around p0 = 2", ok,
           f"k=1: {summarise(k1)} | k=2: {summarise(k2)} | bracket: {summarise(bracket)}")


def test_09_fourier_decay(capsys):
    parts = {}
    box = experiments.fourier_decay("box", 1.1, 1e11, cutoffs=[1e2, 1e5, 1e8, 1e11])
    parts["square q=1.1"] = (box.all_expected, summarise(box))
    slope = fourierdecay.disc_envelope_slope().exponent
    parts["disc envelope"] = (abs(slope + 1.5) <= 0.05, f"slope {slope:.4f}")
    hi = experiments.fourier_decay("disc", 1.5, 1e3)
    lo = experiments.fourier_decay("disc", 1.2, 1e3)
    parts["disc flip"] = (hi.all_expected and lo.all_expected,
                          f"q=1.5 {hi.verdicts['converged'].detail}; q=1.2 {lo.verdicts['converged'].detail}")
    e43 = fourierdecay.summability_exponent(4 / 3)
    e1 = fourierdecay.summability_exponent(1 + 1e-12)
    parts["summability exponents"] = (abs(e43 - 4.5) < 1e-12 and abs(e1 - 4) < 1e-9,
                                      f"q=4/3 -> {e43:.12g}, q=1+ -> {e1:.12g}")
    for shape in ("box", "disc"):
        pl = experiments.fourier_decay(shape, 2.0, 1e3)
        parts[f"Plancherel {shape}"] = (pl.verdicts["plancherel"].ok, pl.verdicts["plancherel"].detail)
    ok = all(flag for flag, _ in parts.values())
    report(capsys, 9, "Fourier decay of indicator transforms", ok,
           "; ".join(f"{name}: {'ok' if flag else 'FAILED'} ({d})" for name, (flag, d) in parts.items()))


def test_10_small_square_exploratory(capsys):
    res = experiments.small_square_scan()
    v = res.verdicts["decay_at_most_-1"]
    report(capsys, 10, "EXPLORATORY small square [0.9, 1.1]^2, decay of |T(tI)| at most -1",
           v.observed == "consistent", v.detail, gating=False)
