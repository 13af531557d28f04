"""Acceptance suite: one test per criterion, each at its stated tolerance.

Every test appends a PASS/FAIL line to ``RESULTS``; ``conftest.py`` prints them
in the terminal summary.  Running this file directly prints the same lines.
"""
import os
import time

import numpy as np
import pytest

from discordant import ellipsoid as ell
from discordant import families as fam
from discordant import optimizer as opt
from discordant import oracle, qcore
from discordant.sampling import random_x_muellers
from helpers import partial_transpose_b

RESULTS = []

EX1 = qcore.mueller_row(m03=0.23, m11=0.76, m22=0.6, m30=0.3, m33=0.8)
N_ORACLE = int(os.environ.get("ACCEPTANCE_ORACLE_N", 1000))
ORACLE_SEED = 20240601


def record(tag, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'}  {tag}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


# --------------------------------------------------------------------------
# 1-5: the worked examples
# --------------------------------------------------------------------------

def test_c1_counterexample_values():
    t0 = time.perf_counter()
    axis = max(opt.sa_vn_theta(EX1, 0.0), opt.sa_vn_theta(EX1, np.pi / 2))
    theta_vn, best_vn = opt.best_vn_theta(EX1)
    rep = opt.discord(EX1)
    elapsed = time.perf_counter() - t0
    checks = [
        abs(axis - 0.441344) < 5e-5,
        abs(best_vn - 0.44132) < 5e-5,
        abs(theta_vn - 0.779283) < 5e-3,
        abs(rep.SA_min - 0.441172) < 5e-5,
        rep.scheme.kind is opt.SchemeKind.THREE_POVM,
        abs(rep.scheme.theta - 1.02158) < 5e-3,
        elapsed < 1.0,
    ]
    record("C1 counterexample values", all(checks),
           f"axis={axis:.6f} best_vN={best_vn:.6f}@{theta_vn:.6f} "
           f"POVM={rep.SA_min:.6f}@{rep.scheme.theta:.5f} [{rep.scheme.kind}] t={elapsed:.3f}s")


def test_c2_ellipsoid_extraction():
    e = ell.from_mueller(EX1)
    ref = (0.780936, 0.616528, 0.77183, 0.122479)
    got = (e.a_x, e.a_y, e.a_z, e.z_c)
    err = max(abs(a - b) for a, b in zip(got, ref))
    record("C2 ellipsoid extraction", err < 1e-6, f"max error {err:.2e} for {tuple(round(v, 7) for v in got)}")


def test_c3_boundary_curves():
    c = opt.boundary_curves(0.58, 0.4)
    err_v, err_h = abs(c.ax_V - 0.641441), abs(c.ax_H - 0.677305)
    grid = np.concatenate([[1e-6, 1e-3], np.linspace(0.01, 0.9, 90)])
    collapse = 0.0
    for a_z in grid:
        cz = opt.boundary_curves(a_z, 0.0)
        collapse = max(collapse, abs(cz.ax_V - a_z), abs(cz.ax_H - a_z))
    ok = err_v < 1e-5 and err_h < 1e-5 and collapse < 1e-10
    record("C3 boundary curves", ok,
           f"ax_V={c.ax_V:.6f} ax_H={c.ax_H:.6f}; z_c=0 collapse max dev {collapse:.1e} over {grid.size} a_z")


def test_c4_root_and_boost_independence():
    base = ell.to_mueller(ell.EllipsoidParams(0.65, 0.59, 0.58, 0.4, 0.4))
    z0 = opt.find_z0(ell.from_mueller(base))
    drift = 0.0
    for mu in np.linspace(-1.5, 1.5, 13):
        drift = max(drift, abs(opt.find_z0(ell.from_mueller(ell.boost(base, mu))) - z0))
    ok = abs(z0 - 0.305919) < 1e-5 and drift <= 1e-12
    record("C4 root z0", ok, f"z0={z0:.7f}, drift under 13 boosts {drift:.1e}")


def _alpha_state(alpha):
    y = 0.1 / 0.58
    root = np.sqrt(1 - y * y)
    return qcore.mueller_row(m03=y, m11=alpha * root, m22=0.59 * root, m30=0.5, m33=0.58 + 0.4 * y)


def _kind(alpha):
    return opt.discord(_alpha_state(alpha)).scheme.kind


def _refine(lo, hi):
    k_lo = _kind(lo)
    while hi - lo > 1e-13:
        mid = (lo + hi) / 2
        if _kind(mid) is k_lo:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def test_c5_transitions():
    grid = np.linspace(0.59, 0.7, 5501)
    kinds = [_kind(a) for a in grid]
    changes = [(grid[j], grid[j + 1], kinds[j], kinds[j + 1])
               for j in range(len(grid) - 1) if kinds[j] is not kinds[j + 1]]
    V, P, H = opt.SchemeKind.VERTICAL_VN, opt.SchemeKind.THREE_POVM, opt.SchemeKind.HORIZONTAL_VN
    order_ok = [(c[2], c[3]) for c in changes] == [(V, P), (P, H)]
    if not order_ok:
        record("C5 transitions", False, f"kind sequence {[(str(c[2]), str(c[3])) for c in changes]}")
    a_e, a_f = (_refine(c[0], c[1]) for c in changes)
    jumps = []
    for a in (a_e, a_f):
        lo = opt.discord(_alpha_state(a - 1e-9)).SA_min
        hi = opt.discord(_alpha_state(a + 1e-9)).SA_min
        jumps.append(abs(hi - lo))
    ok = abs(a_e - 0.641441) < 1e-4 and abs(a_f - 0.654947) < 1e-4 and max(jumps) < 1e-6
    record("C5 transitions", ok,
           f"V->3 at {a_e:.6f}, 3->H at {a_f:.6f}; jumps {jumps[0]:.1e}, {jumps[1]:.1e}")


# --------------------------------------------------------------------------
# 6-7: brute-force oracle on random states
# --------------------------------------------------------------------------

@pytest.fixture(scope="module")
def oracle_run():
    t0 = time.perf_counter()
    records = [oracle.verify_state(m) for m in random_x_muellers(N_ORACLE, seed=ORACLE_SEED)]
    return records, time.perf_counter() - t0


def test_c6_oracle_equivalence(oracle_run):
    records, elapsed = oracle_run
    dev = [abs(r.closed_form - r.oracle_best) for r in records]
    n_ok = sum(d < 1e-5 for d in dev)
    gain = max(r.k4_gain for r in records)
    ok = n_ok == len(records) and gain <= 1e-6 and elapsed < 600
    kinds = {k: sum(r.kind == k for r in records) for k in ("VerticalVN", "HorizontalVN", "ThreePOVM")}
    record("C6 oracle equivalence", ok,
           f"{n_ok}/{len(records)} within 1e-5 (worst {max(dev):.1e}); 4-element gain <= {gain:.1e}; "
           f"kinds {kinds}; {elapsed:.0f}s")


def test_c7_von_neumann_in_plane(oracle_run):
    records, _ = oracle_run
    tilt = max(r.vn_out_of_plane for r in records)
    record("C7 best von Neumann in x-z plane", tilt < 1e-3,
           f"max out-of-plane component {tilt:.1e} over {len(records)} states")


# --------------------------------------------------------------------------
# 8-10: special families and separability
# --------------------------------------------------------------------------

def test_c8_zero_discord_and_bell():
    rng = np.random.default_rng(8)
    worst = 0.0
    for side in ("A", "B"):
        for _ in range(300):
            r, phi = np.sqrt(rng.uniform()), rng.uniform(0, 2 * np.pi)
            m = qcore.mueller_from_density(fam.zero_discord_state(side, (r * np.cos(phi), r * np.sin(phi))))
            worst = max(worst, abs(opt.discord(m, side=side).D))
    for _ in range(300):
        m = qcore.mueller_from_density(fam.zero_discord_state("two_way", rng.dirichlet(np.ones(4))))
        worst = max(worst, abs(opt.discord(m, side="A").D), abs(opt.discord(m, side="B").D))
    bell = opt.discord(np.eye(4)).D
    pure = 0.0
    for mu in np.linspace(-2, 2, 21):
        rep = opt.discord(ell.boost(np.eye(4), mu))
        pure = max(pure, abs(rep.I - 2 * rep.C), abs(rep.I - 2 * rep.D))
    ok = worst < 1e-9 and abs(bell - 1) < 1e-10 and pure < 1e-9
    record("C8 zero discord and Bell", ok,
           f"max |D| over 1200 zero-discord states {worst:.1e}; Bell D={bell:.12f}; "
           f"boosted Bell max |I-2C|,|I-2D| {pure:.1e}")


def test_c9_separability():
    ms = random_x_muellers(1000, seed=9)
    agree = 0
    for m in ms:
        lam = np.linalg.eigvalsh(partial_transpose_b(qcore.density_from_mueller(m))).min()
        agree += ell.separability(ell.from_mueller(m)).separable == (lam >= -1e-12)
    v0 = ell.max_separable_volume(0.0).fraction
    vals = [ell.max_separable_volume(z).fraction for z in np.linspace(0, 0.9, 10)]
    mono = all(a > b for a, b in zip(vals, vals[1:]))
    ok = agree == len(ms) and v0 == 1 / 27 and mono
    record("C9 separability", ok, f"{agree}/{len(ms)} agree with partial transpose; V(0)={v0!r}; monotone={mono}")


def test_c10_closed_form_families():
    rng = np.random.default_rng(10)
    worst = {}

    def diff(a, b):
        return max(abs(getattr(a, k) - getattr(b, k)) for k in ("S_AB", "I", "C", "D", "SA_min"))

    w = 0.0
    for _ in range(200):
        while True:
            g1 = rng.uniform(0, 1)
            g2 = rng.uniform(-g1, g1)
            if g1 + abs(g1 - g2) <= 1:
                break
        th = rng.uniform(-1.5, 1.5)
        w = max(w, diff(fam.circular_discord(g1, g2, th), opt.discord(fam.centered_state(g1, g2, g1, th))))
    worst["circular"] = w
    w = 0.0
    for _ in range(200):
        sign = int(rng.choice([1, -1]))
        g1 = rng.uniform(0, 1 if sign == 1 else 1 / 3)
        th = rng.uniform(-1.5, 1.5)
        w = max(w, diff(fam.spherical_discord(g1, sign, th), opt.discord(fam.centered_state(g1, sign * g1, g1, th))))
    worst["spherical"] = w
    w = 0.0
    for _ in range(200):
        p = rng.dirichlet(np.ones(4))
        w = max(w, diff(fam.bell_mixture_discord(*p), opt.discord(fam.bell_mixture(*p))))
    worst["bell_mixture"] = w
    w = 0.0
    for _ in range(200):
        g3 = rng.uniform(0, 0.95)
        room = np.sqrt(1 - g3 * g3)
        g1 = rng.uniform(0, room)
        g2 = rng.uniform(-min(g1, room - g1), min(g1, room - g1))
        th = rng.uniform(-1.5, 1.5)
        w = max(w, diff(fam.linear_discord(g1, g2, g3, th), opt.discord(fam.linear_state(g1, g2, g3, th)[0])))
    worst["linear"] = w
    ok = max(worst.values()) < 1e-10
    record("C10 closed-form families", ok, ", ".join(f"{k} {v:.1e}" for k, v in worst.items()))


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
