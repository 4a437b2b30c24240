"""Acceptance gate: one test per shipped guarantee.

Run `pytest tests/test_acceptance.py -v` to get a pass/fail line per
criterion.  Tolerances here are contractual; loosening one is a release
decision, not a test fix.
"""

import math
import time

import numpy as np
import pytest

from paneitzlab.bounds import (
    diagnose_equality,
    summarize_bundle,
    summarize_model,
    u1_from_result,
    verify_cor_1_1,
    verify_intro_bounds,
    verify_thm_1_1,
    verify_thm_1_2,
    verify_thm_1_3,
)
from paneitzlab.catalog import expand_lines, flat_torus, paneitz_spectrum, round_sphere, sphere_product
from paneitzlab.coefficients import paneitz_coefficients
from paneitzlab.discrete import build_bundle
from paneitzlab.eigensolve import spectrum
from paneitzlab.errors import PositivityError
from paneitzlab.fourier import TorusGrid, clifford_torus, donut_torus
from paneitzlab.geometry import gauss_identity_residual
from paneitzlab.replay import replay_proof, replay_proof_analytic

from test_discrete import bundle_identity_residuals, perturbed_torus


def closed_form(m, count):
    return expand_lines(paneitz_spectrum(m, count + 4).lines, count)


def _stopwatch():
    t0 = time.perf_counter()
    return lambda: time.perf_counter() - t0


@pytest.fixture(scope="module")
def flat_t5_run():
    """Shared 8^5 solve: criterion 6 checks the values, criterion 7 replays them."""
    elapsed = _stopwatch()
    imm = clifford_torus((1.0,) * 5)
    grid = TorusGrid((8,) * 5)
    bundle = build_bundle(imm, grid)
    result = spectrum(imm, grid, paneitz_coefficients(5), 11, bundle=bundle,
                      solver="lanczos", seed=7)
    return bundle, result, elapsed()


def test_criterion_1_sum_bound_tight_on_four_sphere():
    elapsed = _stopwatch()
    m = round_sphere(4, 1.0)
    rep = verify_thm_1_1(closed_form(m, 9), summarize_model(m))
    target = 8.0 * math.sqrt(6.0)
    assert rep.lhs == pytest.approx(target, rel=1e-10)
    assert rep.rhs == pytest.approx(target, rel=1e-10)
    assert rep.equality and rep.ok
    assert elapsed() < 1.0
    print("criterion 1 PASS: thm_1_1 equality on S^4(1) at 8*sqrt(6)")


def test_criterion_2_clifford_corollary_tight():
    elapsed = _stopwatch()
    half = math.sqrt(0.5)
    m = sphere_product([(2, half), (2, half)], ambient="unit_sphere")
    rep = verify_cor_1_1(closed_form(m, 9), summarize_model(m))
    target = 32.0 / math.sqrt(3.0)
    assert rep.lhs == pytest.approx(target, rel=1e-10)
    assert rep.rhs == pytest.approx(target, rel=1e-10)
    assert rep.equality and rep.ok
    assert elapsed() < 1.0
    print("criterion 2 PASS: cor_1_1 equality on S^2 x S^2 at 32/sqrt(3)")


def test_criterion_3_gap_bound_equality_and_strictness():
    s5 = round_sphere(5, 1.0)
    rep = verify_thm_1_2(closed_form(s5, 10), summarize_model(s5))
    target = 5.0 * math.sqrt(52.5)
    assert rep.lhs == pytest.approx(target, rel=1e-10)
    assert rep.rhs == pytest.approx(target, rel=1e-10)
    assert rep.equality and rep.ok

    t5 = flat_torus((1.0,) * 5)
    rep = verify_thm_1_2(closed_form(t5, 14), summarize_model(t5))
    assert rep.lhs == pytest.approx(5.0, rel=1e-10)
    assert rep.rhs == pytest.approx(math.sqrt(52.5), rel=1e-10)
    assert not rep.equality and rep.ok and rep.slack > 0
    print("criterion 3 PASS: thm_1_2 tight on S^5, strict on flat T^5")


def test_criterion_4_positive_case_holds_and_flat_kernel_is_refused():
    eq = round_sphere(5, 1.0, ambient="unit_sphere")
    rep = verify_thm_1_3(closed_form(eq, 10), summarize_model(eq))
    assert rep.lhs == pytest.approx((math.sqrt(105.0) + 4.0 * math.sqrt(945.0)) / 4.0,
                                    rel=1e-10)
    assert rep.rhs == pytest.approx(5.0 * math.sqrt(945.0) / 4.0, rel=1e-10)
    assert rep.ok and rep.slack > 0 and not rep.equality

    s3 = round_sphere(3, 1.0, ambient="unit_sphere")
    with pytest.raises(PositivityError, match="lambda_1 = -0.9375"):
        verify_thm_1_3(closed_form(s3, 8), summarize_model(s3))
    print("criterion 4 PASS: thm_1_3 strict on equatorial S^5, refused on S^3")


def test_criterion_5_first_eigenvalue_bound_tight_on_four_sphere():
    m = round_sphere(4, 1.0)
    (rep,) = verify_intro_bounds(closed_form(m, 9), summarize_model(m))
    assert rep.bound_id == "chenli_l1"
    assert rep.lhs == pytest.approx(24.0, rel=1e-10)
    assert rep.rhs == pytest.approx(24.0, rel=1e-10)
    assert rep.equality and rep.ok
    print("criterion 5 PASS: chenli_l1 equality on S^4(1) at lambda_1 = 24")


def test_criterion_6_discretization_reproduces_flat_spectra(flat_t5_run):
    elapsed = _stopwatch()

    # flat T^3 on a 16^3 grid against the lattice closed form
    imm3 = clifford_torus((1.0,) * 3)
    grid3 = TorusGrid((16,) * 3)
    res3 = spectrum(imm3, grid3, paneitz_coefficients(3), 16, solver="lanczos")
    exact3 = closed_form(flat_torus((1.0,) * 3), 16)
    assert np.abs(res3.eigenvalues - exact3).max() <= 1e-9

    # flat T^5 on 8^5 (shared solve)
    _, res5, t5_seconds = flat_t5_run
    exact5 = closed_form(flat_torus((1.0,) * 5), 11)
    assert np.abs(res5.eigenvalues - exact5).max() <= 1e-9

    # both solver routes agree on 8^3 grids, flat and curved
    for imm in (clifford_torus((1.0, 0.5, 1.0)), perturbed_torus()):
        grid = TorusGrid((8,) * 3)
        bundle = build_bundle(imm, grid)
        dense = spectrum(imm, grid, paneitz_coefficients(3), 7, bundle=bundle,
                         solver="dense")
        lanc = spectrum(imm, grid, paneitz_coefficients(3), 7, bundle=bundle,
                        solver="lanczos")
        assert np.abs(dense.eigenvalues - lanc.eigenvalues).max() <= 1e-8
        assert dense.defect is not None and dense.defect <= 1e-8

    total = elapsed() + t5_seconds
    assert total < 300.0
    print(f"criterion 6 PASS: flat spectra at 1e-9, routes agree at 1e-8 "
          f"({total:.1f}s)")


def test_criterion_7_proof_replays_never_go_negative(flat_t5_run):
    rep = replay_proof_analytic("thm_1_1", round_sphere(4, 1.0))
    assert all(s.slack >= -1e-9 for s in rep.steps)
    final = rep.step("final_bound")
    assert abs(final.lhs - final.rhs) <= 1e-9 * abs(final.rhs)

    bundle, result, _ = flat_t5_run
    num = replay_proof("thm_1_2", result, bundle)
    assert num.route == "numerical" and num.ok and num.flags == ()
    assert all(s.slack >= -1e-6 for s in num.steps)
    print("criterion 7 PASS: analytic replay tight at 1e-9, "
          "numerical replay above -1e-6")


def test_criterion_8_geometric_property_suites():
    # five coordinate-field identities on grid-resolved bundles
    resolved = [
        (clifford_torus((1.0, 1.0, 1.0)), TorusGrid((8,) * 3)),
        (clifford_torus((1.0, 0.5, 2.0)), TorusGrid((8,) * 3)),
        (donut_torus(2.0, 1.0), TorusGrid((24, 24))),
    ]
    for imm, grid in resolved:
        residuals = bundle_identity_residuals(imm, grid)
        assert max(residuals.values()) <= 1e-8

    # traced Gauss equation and the trace inequality S >= n|H|^2
    for imm, shape in ((perturbed_torus(), (8,) * 3),
                       (clifford_torus((1.0,) * 4), (8,) * 4)):
        bundle = build_bundle(imm, TorusGrid(shape), force_general=True)
        n = bundle.n
        assert gauss_identity_residual(bundle.curv, n) <= 1e-8
        assert float((bundle.curv.s_norm - n * bundle.curv.mean_sq).min()) >= -1e-12

    # relative slack is scale covariant under r -> 2r
    chenli_l1 = lambda values, geo: verify_intro_bounds(values, geo)[0]
    cases = [
        (verify_thm_1_1, lambda r: round_sphere(4, r), 9),
        (chenli_l1, lambda r: round_sphere(4, r), 9),
        (verify_thm_1_2, lambda r: round_sphere(5, r), 10),
        (verify_thm_1_2, lambda r: flat_torus((r,) * 5), 14),
    ]
    for verify, factory, count in cases:
        slacks = []
        for r in (1.0, 2.0):
            m = factory(r)
            slacks.append(verify(closed_form(m, count), summarize_model(m)).relative_slack)
        assert abs(slacks[0] - slacks[1]) <= 1e-10

    # unit-sphere Q-curvature closed form
    for n in (3, 5, 6):
        geo = summarize_model(round_sphere(n, 1.0))
        assert geo.q == pytest.approx(n * (n * n - 4.0) / 8.0, rel=1e-12)
    print("criterion 8 PASS: identity, curvature, scaling and Q-value suites")
