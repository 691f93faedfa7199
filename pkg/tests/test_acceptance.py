"""Acceptance suite: ten go/no-go checks at full experimental scale.

Each test prints one `[criterion NN] name: PASS/FAIL (detail)` line and then
asserts, so a plain pytest run doubles as the acceptance report (the
configured `-rP` flag surfaces the lines for passing tests).  The whole
module takes several minutes; the heavy corpora are module-scoped fixtures
shared across criteria.
"""

import math

import numpy as np
import pytest

from cfsearch.baselines import QesParams, clll_search, exhaustive_search, qes_search
from cfsearch.bench import gen_channel
from cfsearch.mimo import search_optimal_mimo
from cfsearch.model import (
    cost,
    cost_matrix,
    mimo_gram,
    mimo_phi,
    phi_bound,
    rate,
)
from cfsearch.optimal import search_optimal
from cfsearch.rings import (
    SQRT3,
    Ring,
    eisenstein_values,
    gaussian_values,
    quantize_eisenstein_array,
    quantize_gaussian_array,
    vector_value,
)

REL = 1e-9  # f-value match tolerance between independent searches
REDUCTION_REL = 1e-12  # "identical" up to float noise from unit-rotation ties


def _report(num: int, name: str, ok: bool, detail: str = "") -> None:
    line = f"[criterion {num:02d}] {name}: {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f" ({detail})"
    print(line)
    assert ok, line


def _vector_channel(L: int, snr_db: float, rng) -> object:
    return gen_channel(L, 1, rng, 10.0 ** (snr_db / 10.0)).row_vector()


@pytest.fixture(scope="module")
def gaussian_corpus():
    """Criterion 1's corpus, reused by criteria 7 and 9.

    Per (L, snr) cell: f from the exact search, the exhaustive oracle, the
    lattice-reduction baseline, and the exact search without its symmetry
    reduction, on identical channels.
    """
    rng = np.random.default_rng(881001)
    cells = {}
    for L in (2, 3, 4):
        for snr in (0, 5, 10, 15, 20):
            trials = 200 if (L, snr) == (4, 20) else 1000
            f_opt, f_exh, f_clll, f_off = [], [], [], []
            for _ in range(trials):
                ch = _vector_channel(L, snr, rng)
                M = cost_matrix(ch)
                f_opt.append(search_optimal(ch, Ring.GAUSSIAN).f_min)
                f_exh.append(
                    exhaustive_search(M, phi_bound(ch), Ring.GAUSSIAN, prune="cost").f_min
                )
                f_clll.append(clll_search(M).f_min)
                f_off.append(search_optimal(ch, Ring.GAUSSIAN, quadrant_reduce=False).f_min)
            cells[(L, snr)] = tuple(np.asarray(v) for v in (f_opt, f_exh, f_clll, f_off))
    return cells


def test_criterion_01_exact_optimality_gaussian(gaussian_corpus):
    total = matched = 0
    for (L, snr), (f_opt, f_exh, _, _) in gaussian_corpus.items():
        ok = np.abs(f_opt - f_exh) <= REL * f_exh
        total += f_opt.size
        matched += int(ok.sum())
    _report(
        1,
        "exact search matches exhaustive oracle (Gaussian)",
        matched == total,
        f"{matched}/{total} instances at rel {REL:g}, L in {{2,3,4}}, 0-20 dB",
    )


def test_criterion_02_exact_optimality_eisenstein():
    rng = np.random.default_rng(881002)
    total = matched = 0
    for L in (2, 3):
        for snr in (0, 5, 10, 15, 20):
            for _ in range(1000):
                ch = _vector_channel(L, snr, rng)
                f_opt = search_optimal(ch, Ring.EISENSTEIN).f_min
                f_exh = exhaustive_search(
                    cost_matrix(ch), phi_bound(ch), Ring.EISENSTEIN, prune="cost"
                ).f_min
                total += 1
                matched += abs(f_opt - f_exh) <= REL * f_exh
    _report(
        2,
        "exact search matches exhaustive oracle (Eisenstein)",
        matched == total,
        f"{matched}/{total} instances at rel {REL:g}, L in {{2,3}}, 0-20 dB",
    )


def test_criterion_03_exact_optimality_matrix_channels():
    rng = np.random.default_rng(881003)
    total = matched = consistent = k1_total = 0
    for ring in (Ring.GAUSSIAN, Ring.EISENSTEIN):
        for L in (2, 3):
            for k in (1, 2):
                for snr in (0, 10, 20):
                    for _ in range(300):
                        chm = gen_channel(L, k, rng, 10.0 ** (snr / 10.0))
                        res = search_optimal_mimo(chm, ring)
                        M = mimo_gram(chm)
                        ref = exhaustive_search(M, mimo_phi(chm), ring, prune="cost")
                        total += 1
                        matched += abs(res.f_min - ref.f_min) <= REL * ref.f_min
                        if k == 1:
                            ch = chm.row_vector()
                            f_vec = search_optimal(ch, ring).f_min
                            k1_total += 1
                            # the matrix search's argmin must also minimize the
                            # single-antenna objective on the same channel
                            f_cross = cost(res.a_opt, cost_matrix(ch))
                            consistent += abs(f_cross - f_vec) <= REL * f_vec
    _report(
        3,
        "matrix-channel search matches oracle; k=1 argmin-consistent",
        matched == total and consistent == k1_total,
        f"{matched}/{total} f-matches, {consistent}/{k1_total} k=1 argmin-consistent",
    )


def test_criterion_04_runtime_ratio_grows_with_snr():
    rng = np.random.default_rng(881004)
    ratios = {}
    for snr in (5.0, 20.0):
        t_exh = t_opt = 0.0
        for _ in range(500):
            ch = _vector_channel(2, snr, rng)
            t_opt += search_optimal(ch, Ring.GAUSSIAN).elapsed_s
            t_exh += exhaustive_search(
                cost_matrix(ch), phi_bound(ch), Ring.GAUSSIAN, prune="norm"
            ).elapsed_s
        ratios[snr] = t_exh / t_opt
    _report(
        4,
        "exhaustive/exact runtime ratio rises from 5 dB to 20 dB",
        ratios[20.0] > ratios[5.0],
        f"ratio {ratios[5.0]:.2f} at 5 dB vs {ratios[20.0]:.2f} at 20 dB, L=2, 500 trials",
    )


def test_criterion_05_rate_dominance_and_qes_gap():
    rng = np.random.default_rng(881005)
    qes_params = QesParams(mag_step=0.1, phase_step_deg=5.0)
    worst_gap = 0.0
    ok = True
    details = []
    for L in (4, 8):
        for snr in (0, 5, 10, 15, 20):
            r_opt = np.empty(2000)
            r_qes = np.empty(2000)
            r_clll = np.empty(2000)
            for i in range(2000):
                ch = _vector_channel(L, snr, rng)
                r_opt[i] = search_optimal(ch, Ring.GAUSSIAN).rate
                r_qes[i] = qes_search(ch, qes_params).rate
                r_clll[i] = rate(ch, clll_search(cost_matrix(ch)).a_opt)
            m_opt, m_qes, m_clll = r_opt.mean(), r_qes.mean(), r_clll.mean()
            cell_ok = m_opt >= m_qes >= m_clll - 1e-9 and m_qes >= 0.95 * m_opt
            ok = ok and cell_ok
            gap = 0.0 if m_opt == 0 else (m_opt - m_qes) / m_opt
            worst_gap = max(worst_gap, gap)
            if not cell_ok:
                details.append(f"L={L} snr={snr}: opt={m_opt:.4f} qes={m_qes:.4f} clll={m_clll:.4f}")
    _report(
        5,
        "optimal >= quantized grid >= lattice reduction; grid within 5%",
        ok,
        "; ".join(details) if details else f"worst grid shortfall {100 * worst_gap:.2f}% of optimal",
    )


def test_criterion_06_rate_trends_with_user_count():
    rng = np.random.default_rng(881006)
    avg_opt = {}
    avg_gap = {}
    for L in (2, 4, 6, 8):
        r_opt = np.empty(2000)
        r_clll = np.empty(2000)
        for i in range(2000):
            ch = _vector_channel(L, 10.0, rng)
            r_opt[i] = search_optimal(ch, Ring.GAUSSIAN).rate
            r_clll[i] = rate(ch, clll_search(cost_matrix(ch)).a_opt)
        avg_opt[L] = r_opt.mean()
        avg_gap[L] = (r_opt - r_clll).mean()
    monotone = avg_opt[2] >= avg_opt[4] >= avg_opt[6] >= avg_opt[8]
    widening = avg_gap[8] > avg_gap[2]
    _report(
        6,
        "average optimal rate falls with L; reduction gap widens",
        monotone and widening,
        f"rates {', '.join(f'L={L}:{avg_opt[L]:.3f}' for L in (2, 4, 6, 8))} bits; "
        f"gap {avg_gap[2]:.4f} -> {avg_gap[8]:.4f}",
    )


def test_criterion_07_lattice_reduction_guarantee(gaussian_corpus):
    total = within = 0
    for (L, _), (f_opt, _, f_clll, _) in gaussian_corpus.items():
        bound = (2.0 ** (L - 1)) * f_opt * (1 + REL)
        total += f_opt.size
        within += int((f_clll <= bound).sum())
    _report(
        7,
        "reduction baseline within 2^(L-1) of optimum",
        within == total,
        f"{within}/{total} instances",
    )


def test_criterion_08_quantizer_suites():
    rng = np.random.default_rng(881008)
    violations = 0

    # nearest-point property, square ring, local 5x5 candidate oracle
    z = (rng.standard_normal(100_000) + 1j * rng.standard_normal(100_000)) * 4.0
    re, im = quantize_gaussian_array(z)
    d0 = np.abs(z - gaussian_values(re, im))
    offs = [(dx, dy) for dx in range(-2, 3) for dy in range(-2, 3)]
    d_near = np.min(
        [np.abs(z - gaussian_values(re + dx, im + dy)) for dx, dy in offs], axis=0
    )
    violations += int((d0 > d_near + 1e-12).sum())

    # nearest-point property, hexagonal ring
    z = (rng.standard_normal(100_000) + 1j * rng.standard_normal(100_000)) * 4.0
    a, b = quantize_eisenstein_array(z)
    d0 = np.abs(z - eisenstein_values(a, b))
    d_near = np.min(
        [np.abs(z - eisenstein_values(a + da, b + db)) for da, db in offs], axis=0
    )
    violations += int((d0 > d_near + 1e-12).sum())

    # hexagonal covering radius
    zu = rng.uniform(-5, 5, 100_000) + 1j * rng.uniform(-5, 5, 100_000)
    au, bu = quantize_eisenstein_array(zu)
    worst = float(np.abs(zu - eisenstein_values(au, bu)).max())
    covering_ok = worst <= 1.0 / SQRT3 + 1e-12

    # half-up boundary behavior on a crafted half-integer grid
    grid = np.arange(-3.0, 3.5, 0.5)
    gx, gy = np.meshgrid(grid, grid)
    zg = (gx + 1j * gy).ravel()
    rg, ig = quantize_gaussian_array(zg)
    half_up_ok = np.array_equal(rg, np.floor(zg.real + 0.5).astype(np.int64)) and np.array_equal(
        ig, np.floor(zg.imag + 0.5).astype(np.int64)
    )

    _report(
        8,
        "quantizer nearest-point, covering radius, half-up boundaries",
        violations == 0 and covering_ok and half_up_ok,
        f"0 of 200000 nearest-point violations, max hex error {worst:.6f} <= {1 / SQRT3:.6f}",
    )


def test_criterion_09_symmetry_reduction_soundness(gaussian_corpus):
    total = same = 0
    for (L, snr), (f_opt, _, _, f_off) in gaussian_corpus.items():
        ok = np.abs(f_opt - f_off) <= REDUCTION_REL * np.maximum(f_opt, f_off)
        total += f_opt.size
        same += int(ok.sum())
    _report(
        9,
        "quadrant reduction returns identical minima",
        same == total,
        f"{same}/{total} instances at rel {REDUCTION_REL:g}",
    )


def test_criterion_10_hexagonal_ring_advantage():
    rng = np.random.default_rng(881010)
    diff = np.empty(2000)
    for i in range(2000):
        ch = _vector_channel(4, 10.0, rng)
        r_g = search_optimal(ch, Ring.GAUSSIAN).rate
        r_e = search_optimal(ch, Ring.EISENSTEIN).rate
        diff[i] = r_e - r_g
    mean_diff = float(diff.mean())
    _report(
        10,
        "hexagonal ring at least matches square ring on average",
        mean_diff >= -0.01,
        f"measured advantage {mean_diff:+.4f} bits (Eisenstein minus Gaussian), L=4, 10 dB",
    )
