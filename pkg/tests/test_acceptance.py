"""Acceptance criteria, one test each; every test prints a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v`` (lines show up in the
terminal even without ``-s``) or ``python3 tests/test_acceptance.py``.
"""

import itertools
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from symphase.core import circ_conv, circ_corr, dft, direct_circ_conv, direct_dft, idft
from symphase.lab import estimate_alpha, noise_robustness_sweep, verify_stability_inequality
from symphase.measurement import measure
from symphase.recovery import dist_up_to_sign, recover_direct
from symphase.serialize import format_signal_csv
from symphase.symmetrization import symmetrize_padded

from conftest import crandn, random_signal


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n[criterion {number}] {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail

    return emit


def test_criterion_1_measurement_dimensions(report):
    bad = []
    for n in range(1, 17):
        x = np.ones(n)
        if len(measure(x, "A")) != 4 * n - 3:
            bad.append(("A", n))
        if len(measure(x, "B")) != 4 * n - 1:
            bad.append(("B", n))
    report(1, not bad, f"lengths 4n-3 (A) and 4n-1 (B) for n=1..16; mismatches {bad}")


def test_criterion_2_noiseless_round_trip(report):
    t0 = time.perf_counter()
    worst = 0.0
    for variant in "AB":
        for n in range(1, 65):
            rng = np.random.default_rng([2, n, ord(variant)])
            for _ in range(200):
                x = random_signal(rng, n, variant)
                err = dist_up_to_sign(recover_direct(measure(x, variant)).estimate, x)
                worst = max(worst, err / np.linalg.norm(x))
    elapsed = time.perf_counter() - t0
    report(2, worst <= 1e-8,
           f"worst relative error {worst:.3e} (<= 1e-8) over 2x64x200 draws in {elapsed:.1f} s "
           f"(target < 30 s)")


def test_criterion_3_identities(report):
    rng = np.random.default_rng(3)
    worst = dict.fromkeys("abcde", 0.0)
    for _ in range(1000):
        n = int(rng.integers(1, 65))
        x1, x2 = crandn(rng, n), crandn(rng, n)
        sx = np.linalg.norm(x1)
        worst["a"] = max(worst["a"], np.linalg.norm(dft(circ_corr(x1, x1))
                                                   - np.sqrt(n) * np.abs(dft(x1)) ** 2)
                         / (np.sqrt(n) * sx**2))
        lhs = circ_conv(x1, x1) - circ_conv(x2, x2)
        rhs = circ_conv(x1 - x2, x1 + x2)
        worst["b"] = max(worst["b"], np.linalg.norm(lhs - rhs) / np.linalg.norm(rhs))
        variant = "AB"[int(rng.integers(2))]
        y = random_signal(rng, n, variant)
        s = symmetrize_padded(y, variant).entries
        worst["c"] = max(worst["c"], np.max(np.abs(dft(s).imag)) / np.linalg.norm(y))
        worst["d"] = max(worst["d"], abs(np.linalg.norm(dft(x1)) - sx) / sx,
                         abs(np.linalg.norm(idft(x1)) - sx) / sx)
        worst["e"] = max(worst["e"],
                         np.linalg.norm(dft(x1) - direct_dft(x1)) / sx,
                         np.linalg.norm(circ_conv(x1, x2) - direct_circ_conv(x1, x2))
                         / np.linalg.norm(direct_circ_conv(x1, x2)))
    detail = ", ".join(f"({k}) {v:.1e}" for k, v in worst.items())
    report(3, max(worst.values()) <= 1e-10, f"max relative deviations {detail} (<= 1e-10)")


def test_criterion_4_norm_sandwich(report):
    rng = np.random.default_rng(4)
    fails = 0
    for variant in "AB":
        for _ in range(10_000):
            n = int(rng.integers(1, 33))
            x = random_signal(rng, n, variant)
            nx2 = np.linalg.norm(x) ** 2
            ns2 = np.linalg.norm(symmetrize_padded(x, variant).entries) ** 2
            fails += not (nx2 * (1 - 1e-12) <= ns2 <= 2 * nx2 * (1 + 1e-12))
    eq_fail = 0
    for n in range(1, 33):
        x = np.zeros(n)
        x[0] = rng.standard_normal()
        ns2 = np.linalg.norm(symmetrize_padded(x, "A").entries) ** 2
        eq_fail += abs(ns2 - x[0] ** 2) > 1e-15 * x[0] ** 2
    report(4, fails == 0 and eq_fail == 0,
           f"{fails} sandwich failures in 2x10^4 draws; {eq_fail} equality failures for "
           f"zero tail (variant A)")


def test_criterion_5_rnmp_calibration(report):
    t0 = time.perf_counter()
    ones = [abs(estimate_alpha(1, 1, n).alpha_hat - 1) for n in (2, 4, 8)]
    a22 = estimate_alpha(2, 2, 2).alpha_hat
    over = 0.0
    for n in range(1, 9):
        for s, f in itertools.combinations_with_replacement(range(1, min(4, n) + 1), 2):
            over = max(over, estimate_alpha(s, f, n).alpha_hat - math.sqrt(s))
    elapsed = time.perf_counter() - t0
    ok = max(ones) <= 1e-12 and abs(a22 - 0.70711) <= 1e-5 and \
        abs(a22 - 1 / math.sqrt(2)) <= 1e-6 and over <= 1e-12
    report(5, ok, f"s=f=1 max |alpha-1| {max(ones):.1e}; s=f=n=2 alpha {a22:.8f}; "
                  f"max(alpha - sqrt s) on grid {over:.2e}; {elapsed:.1f} s (target < 60 s)")


def test_criterion_6_injectivity(report):
    lines = []
    ok = True
    for variant in "AB":
        for n in (2, 4, 8):
            reps = [verify_stability_inequality(variant, n, 10_000, seed=seed) for seed in (0, 1)]
            r0, r1 = reps[0].min_ratio, reps[1].min_ratio
            spread = abs(r0 - r1) / max(r0, r1)
            good = all(r.violations == 0 and r.min_ratio > 0 for r in reps) and spread <= 0.2
            ok &= good
            lines.append(f"{variant}{n}: {r0:.4g}/{r1:.4g}")
    report(6, ok, "min ratio seed0/seed1 " + ", ".join(lines) + " (zero violations, within 20%)")


def test_criterion_7_noise_robustness(report):
    sigmas = [0.0, 1e-6, 1e-4, 1e-2]
    rep = noise_robustness_sweep("A", 8, sigmas, trials=100, seed=0)
    med = [r.median_err_direct for r in rep.rows]
    base = rep.rows[0]
    # signals are unit norm, so the sigma = 0 errors are relative as in criterion 2
    ok = rep.trend_ok and base.max_err_direct <= 1e-8 and rep.direct_win_fraction >= 0.8
    report(7, ok, f"sigma=0 max error {base.max_err_direct:.1e}; median errors "
           + ", ".join(f"{m:.2e}" for m in med)
           + f"; direct wins {rep.direct_win_fraction:.0%} of noisy trials (>= 80%)")


def _cli(args, cwd):
    return subprocess.run([sys.executable, "-m", "symphase", *args], cwd=cwd,
                          capture_output=True)


def test_criterion_8_determinism(report, tmp_path):
    (tmp_path / "s.csv").write_text(format_signal_csv([1.0, 0.5 - 2j, 1j]))
    commands = {
        "measure": ["measure", "--in", "s.csv", "--sigma", "1e-3", "--seed", "4", "--out"],
        "measure_json": ["measure", "--in", "s.csv", "--variant", "B", "--out"],
        "recover": ["recover", "--in", "m.csv", "--truth", "s.csv", "--out"],
        "recover_alt": ["recover", "--in", "m.csv", "--method", "alternating", "--seed", "3",
                        "--out"],
        "stability": ["stability", "--n", "2", "--pairs", "100", "--seed", "7", "--out"],
        "rnmp": ["rnmp", "--s", "2", "--f", "3", "--n", "5", "--samples", "500", "--out"],
        "sweep": ["sweep", "--n", "3", "--trials", "4", "--sigma", "0,1e-4", "--out"],
    }
    (tmp_path / "m.csv").write_bytes(b"")
    _cli(commands["measure"] + ["m.csv"], tmp_path)
    differ = []
    for name, argv in commands.items():
        ext = ".json" if name in ("measure_json", "rnmp") or name.startswith("recover") else ".csv"
        outs = []
        for k in range(2):
            out = f"{name}_{k}{ext}"
            proc = _cli(argv + [out], tmp_path)
            assert proc.returncode == 0, proc.stderr
            outs.append((tmp_path / out).read_bytes())
        if outs[0] != outs[1]:
            differ.append(name)
    report(8, not differ, f"{len(commands)} CLI commands run twice; differing outputs {differ}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
