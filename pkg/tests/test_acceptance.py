"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
report.  Tolerances are fixed here, not calibrated elsewhere.
"""

import math
import time
import warnings

import numpy as np
import pytest
import scipy.integrate

from murmur import arith, cli, densities, families, frame, petersson, specfn

import oracles

PI = math.pi


def report(number, detail):
    print(f"[criterion {number}] PASS — {detail}")


@pytest.fixture(scope="module")
def tables_weil():
    return arith.sieve(100_000)


# ---------------------------------------------------------------------------


def test_criterion_1_kloosterman_suite(tables_weil):
    t0 = time.time()
    tables = tables_weil
    rng = np.random.default_rng(2024)
    pairs = [(int(m), int(n)) for m, n in zip(rng.integers(1, 10**6, 100), rng.integers(1, 10**6, 100))]

    worst_path_diff = 0.0
    for c in range(1, 2001):
        for m, n in pairs:
            diff = abs(arith.kloosterman_direct(m, n, c) - arith.kloosterman_fast(m, n, c, tables))
            worst_path_diff = max(worst_path_diff, diff)
    assert worst_path_diff <= 1e-9

    worst_weil = 0.0
    for _ in range(10_000):
        m = int(rng.integers(0, 10**6))
        n = int(rng.integers(0, 10**6))
        c = int(rng.integers(1, 100_001))
        s = arith.kloosterman_fast(m, n, c, tables)
        bound = arith.weil_bound(m, n, c, tables)
        assert abs(s) <= bound + 1e-9
        worst_weil = max(worst_weil, abs(s) / bound)

    worst_sym = 0.0
    for _ in range(300):
        m = int(rng.integers(1, 10**4))
        n = int(rng.integers(1, 10**4))
        c = int(rng.integers(1, 3001))
        s = arith.kloosterman_fast(m, n, c, tables)
        worst_sym = max(worst_sym, abs(s - arith.kloosterman_fast(n, m, c, tables)))
        a = int(rng.integers(1, 50))
        while math.gcd(a, c) != 1:
            a += 1
        worst_sym = max(worst_sym, abs(arith.kloosterman_fast(a * m, n, c, tables)
                                       - arith.kloosterman_fast(m, a * n, c, tables)))
    assert worst_sym <= 1e-9

    elapsed = time.time() - t0
    assert elapsed <= 120.0
    report(1, f"fast==direct to {worst_path_diff:.1e} on c<=2000 x100 pairs; "
              f"Weil bound on 1e4 triples (max |S|/bound {worst_weil:.3f}); "
              f"symmetry+twist to {worst_sym:.1e}; {elapsed:.0f}s")


def test_criterion_2_bessel_suite():
    t0 = time.time()
    rng = np.random.default_rng(99)
    worst_rel = 0.0
    for _ in range(1000):
        nu = int(rng.integers(0, 51))
        x = float(rng.uniform(1e-3, 100.0))
        ref = float(oracles.bessel_series_mp(nu, x))
        mine = specfn.bessel_j(nu, x)
        if ref != 0.0:
            worst_rel = max(worst_rel, abs(mine - ref) / abs(ref))
    assert worst_rel <= 1e-10

    worst_resid = 0.0
    for nu in range(1, 61, 3):
        # straddle both regime boundaries as well as a spread of arguments
        xs = {max(8.0, nu / 4.0), max(30.0, 2.0 * nu)}
        xs.update(np.linspace(0.5, 200.0, 23))
        for x in xs:
            x = float(x)
            jm = specfn.bessel_j(nu - 1, x)
            j0 = specfn.bessel_j(nu, x)
            jp = specfn.bessel_j(nu + 1, x)
            resid = abs(jm + jp - (2.0 * nu / x) * j0) / max(1.0, abs(j0))
            worst_resid = max(worst_resid, resid)
    assert worst_resid <= 1e-8

    elapsed = time.time() - t0
    assert elapsed <= 60.0
    report(2, f"1e3-point oracle grid worst rel {worst_rel:.1e}; "
              f"recurrence residual {worst_resid:.1e}; {elapsed:.0f}s")


def test_criterion_3_hecke_consistency(tables_weil):
    t0 = time.time()
    tau = oracles.tau_qexp(50)
    base = petersson.petersson_delta(12, 1, 1, tables=tables_weil)
    worst = 0.0
    for p in [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47]:
        ratio = petersson.petersson_delta(12, 1, p, tables=tables_weil).value / base.value
        worst = max(worst, abs(ratio - tau[p] / p**5.5))
    assert worst <= 1e-6
    worst_sq = 0.0
    for p in [2, 3, 5, 7]:
        ratio = petersson.petersson_delta(12, 1, p * p, tables=tables_weil).value / base.value
        worst_sq = max(worst_sq, abs(ratio - tau[p * p] / float(p) ** 11.0))
    assert worst_sq <= 1e-6
    elapsed = time.time() - t0
    assert elapsed <= 60.0
    report(3, f"k=12 eigenvalue ratios to {worst:.1e} (p<=50), "
              f"p^2 mode to {worst_sq:.1e} (p<=7); {elapsed:.0f}s")


def test_criterion_4_density_cross_check(tables_weil):
    t0 = time.time()
    phi = specfn.bump(1.0, 2.0)
    sign = 1
    residuals = []
    peak_errs = []
    for K in (40.0, 80.0, 160.0):
        X = (K - 1.0) ** 2
        primes = [int(q) for q in tables_weil.primes if 0.004 * X <= q <= 0.055 * X]
        series = petersson.harmonic_series(K, primes, phi, sign, tables=tables_weil)
        ref = np.array(
            [densities.harmonic_murmuration_density(float(y), phi, sign, tables_weil) for y in series.y]
        )
        support = ref != 0.0
        emp_peak = frame.peak_location(series.y, series.value)
        ref_peak = frame.peak_location(series.y, ref)
        peak_err = abs(emp_peak - ref_peak) / abs(ref_peak)
        assert peak_err <= 0.02, (K, emp_peak, ref_peak)
        peak_errs.append(peak_err)
        residuals.append(frame.shape_residual(series.value[support], ref[support]))
    assert residuals[0] > residuals[1] > residuals[2]
    elapsed = time.time() - t0
    assert elapsed <= 600.0
    report(4, "peak agreement "
              + ", ".join(f"K={k:g}: {e * 100:.2f}%" for k, e in zip((40, 80, 160), peak_errs))
              + f"; L2 residuals {residuals[0]:.3f} > {residuals[1]:.3f} > {residuals[2]:.3f}; "
              + f"{elapsed:.0f}s")


def test_criterion_5_atomic_density_structure(tables_weil):
    t0 = time.time()
    dist, tail = densities.window_murmuration_density((0.5, 50.0), 500, 1.0, tables_weil)

    # atoms with a = 1 live exactly at integer squares; set equality vs scan
    a1_locations = set()
    for loc, _ in dist.atoms:
        root = round(math.sqrt(loc))
        if float(root * root) == loc:
            a1_locations.add(root * root)
    brute = {m * m for m in range(1, 8)
             if arith.is_squarefree(m, tables_weil) and 0.5 <= m * m <= 50.0}
    assert a1_locations == brute

    interior, _ = densities.window_murmuration_density((3.9, 5.0), 500, 1.0, tables_weil)
    halved, _ = densities.window_murmuration_density((4.0, 5.0), 500, 1.0, tables_weil)
    assert abs(halved.atom_at(4.0)[1] - 0.5 * interior.atom_at(4.0)[1]) < 1e-12

    doubled, _ = densities.window_murmuration_density((0.5, 50.0), 1000, 1.0, tables_weil)
    drift = abs(doubled.total_atom_mass() - dist.total_atom_mass())
    assert drift <= tail

    elapsed = time.time() - t0
    assert elapsed <= 60.0
    report(5, f"a=1 atoms == squarefree squares {sorted(brute)}; endpoint halving exact; "
              f"q-doubling drift {drift:.2e} <= certified tail {tail:.2e}; {elapsed:.0f}s")


def test_criterion_6_one_level_density_kernels():
    t0 = time.time()
    even = densities.so_kernel("even")
    odd = densities.so_kernel("odd")
    even_hat = densities.so_kernel_fourier("even")
    odd_hat = densities.so_kernel_fourier("odd")
    for x in np.linspace(-8.0, 8.0, 1000):
        x = float(x)
        # kernel side: sinc terms cancel, constants add to 2 — exact
        assert even.continuous(x) + odd.continuous(x) == 2.0
        # transform side: indicators cancel, constants add to 1 — exact
        assert even_hat.continuous(x) + odd_hat.continuous(x) == 1.0

    f = lambda x: np.sinc(2.0 * x)
    worst_ft = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.integrate.IntegrationWarning)
        for y in np.concatenate([np.linspace(0.0, 0.89, 12), np.linspace(1.11, 2.5, 12)]):
            val, _ = scipy.integrate.quad(f, -200.0, 200.0, weight="cos", wvar=2 * PI * float(y), limit=400)
            expect = 0.5 if y < 1.0 else 0.0
            worst_ft = max(worst_ft, abs(val - expect))
    assert worst_ft <= 2e-2

    phi_hat = specfn.shifted_bump(-0.9, 0.9)
    integral = specfn.quadrature(lambda x: float(phi_hat(x)), (-0.9, 0.9), tol=1e-12).value
    pairing = densities.one_level_pairing(phi_hat, "odd")
    closed_form = float(phi_hat(0.0)) + 0.5 * integral
    assert abs(pairing - closed_form) <= 1e-6

    elapsed = time.time() - t0
    assert elapsed <= 60.0
    report(6, f"parity sums exact on 1e3 grid (kernels: 2, transforms: 1); "
              f"windowed FT within {worst_ft:.1e} of half box; "
              f"pairing vs closed form {abs(pairing - closed_form):.1e}; {elapsed:.0f}s")


def test_criterion_7_dirichlet_stability(tables_weil):
    t0 = time.time()
    phi = specfn.indicator(1.0, 2.0)
    tables = arith.sieve(200_000)
    binned = {}
    for X in (1e5, 2e5):
        primes = [int(q) for q in tables.primes if 0.05 * X <= q <= 1.0 * X]
        for cls in (1, -1):
            series = families.quadratic_murmuration(X, phi, cls, primes, normalization="raw_sqrtp")
            binned[(X, cls)] = frame.bin_series(series, 60, y_range=(0.05, 1.0))

    agree_fracs = []
    for cls in (1, -1):
        b1, b2 = binned[(1e5, cls)], binned[(2e5, cls)]
        assert np.allclose(b1.y, b2.y)
        se = np.sqrt(b1.stderr**2 + b2.stderr**2)
        within = np.abs(b1.value - b2.value) <= 3.0 * se
        agree_fracs.append(float(np.mean(within)))
        assert agree_fracs[-1] >= 0.95, cls

    bp, bm = binned[(1e5, 1)], binned[(1e5, -1)]
    sep_se = np.sqrt(bp.stderr**2 + bm.stderr**2)
    distinct = float(np.mean(np.abs(bp.value - bm.value) > 3.0 * sep_se))
    assert distinct >= 0.30

    elapsed = time.time() - t0
    assert elapsed <= 300.0
    report(7, f"scale stability {agree_fracs[0] * 100:.0f}%/{agree_fracs[1] * 100:.0f}% of bins "
              f"within 3 SE (classes +/-); classes distinct in {distinct * 100:.0f}% of bins; "
              f"{elapsed:.0f}s")


def test_criterion_8_framework_exactness(tmp_path):
    t0 = time.time()
    phi = specfn.indicator(1.0, 2.0)

    records = [
        frame.FamilyRecord("a", 10.0, 1, lam=lambda p: 0.5 * p),
        frame.FamilyRecord("b", 14.0, -1, lam=lambda p: -0.25 * p),
        frame.FamilyRecord("c", 19.0, 1, lam=lambda p: 1.0 / p),
    ]
    assert frame.expectation(records, lambda r: 1.0, 10.0, phi) == 1.0

    primes = [2, 3, 5, 7]
    analytic = frame.murmuration_series(records, 10.0, phi, primes, normalization="analytic")
    raw = frame.murmuration_series(records, 10.0, phi, primes, normalization="raw_sqrtp")
    for i, p in enumerate(primes):
        expected = analytic.value[i] * math.sqrt(p)
        assert abs(raw.value[i] - expected) <= 1e-9 * max(1.0, abs(expected))

    src = tmp_path / "family.txt"
    src.write_text(
        "#murmur-family v1\nlabel,conductor,root_number\n"
        "11a,11,1\n37a,37,-1\n\n11a,2,-2\n11a,3,-1\n37a,2,-2\n37a,3,-3\n"
    )
    fam = families.ingest(src)
    first = tmp_path / "w1.txt"
    second = tmp_path / "w2.txt"
    families.write_family(fam, first)
    families.write_family(families.ingest(first), second)
    assert first.read_bytes() == second.read_bytes()

    args = [
        "dirichlet", "--x", "1500", "--phi", "indicator", "1", "2", "--sign", "+1",
        "--bins", "30", "--y-min", "0.05", "--y-max", "0.8",
    ]
    assert cli.main(args + ["--out", str(tmp_path / "d1")]) == 0
    assert cli.main(args + ["--out", str(tmp_path / "d2")]) == 0
    assert (tmp_path / "d1.csv").read_bytes() == (tmp_path / "d2.csv").read_bytes()

    elapsed = time.time() - t0
    report(8, f"unit expectation exact; sqrt(p) bridge to 1e-9; ingest round-trip and "
              f"CLI reruns byte-identical; {elapsed:.0f}s")
