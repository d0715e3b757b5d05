"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines; every tolerance is pinned here, nothing deferred.
"""

import math
import time
from pathlib import Path

import numpy as np
import pytest

from conftest import RING_2D, RING_3D, simplex_objective, \
    simplex_pattern_search
from pmoduli.dilatations import DilatationParams, mean_inner_dilatation, \
    mean_outer_dilatation
from pmoduli.mappings import AxisStretchMap
from pmoduli.moduli import (DiscreteMeasureSpace, capacity_lower_bound_maz,
                            lemma_infimum, lower_criterion_integral,
                            ring_module)
from pmoduli.quadrature import QuadratureSpec
from pmoduli.weights import RadialWeight
from pmoduli.harness import parse_scenario_file, run_scenario
from pmoduli.harness.runner import exact_ring_curve_module

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def _report(num, text):
    print(f"\n[PASS] criterion {num}: {text}")


def test_criterion_1_closed_forms():
    ring_module(3, 2.0, 1.0, 2.0)  # warm import/JIT-free timing below
    t0 = time.perf_counter()
    v1 = ring_module(3, 2.0, 1.0, 2.0)
    t1 = time.perf_counter()
    v2 = ring_module(2, 1.5, 1.0, 2.0)
    t2 = time.perf_counter()
    assert v1 == pytest.approx(8.0 * math.pi, rel=1e-12)
    assert v2 == pytest.approx(2.0 * math.pi * math.sqrt(2.0), rel=1e-12)
    assert (t1 - t0) < 1e-3 and (t2 - t1) < 1e-3
    for lam in (0.5, 2.0, 10.0):
        t3 = time.perf_counter()
        scaled = ring_module(3, 2.0, lam * 1.0, lam * 2.0)
        assert time.perf_counter() - t3 < 1e-3
        assert scaled == pytest.approx(lam ** (3 - 2.0) * v1, rel=1e-12)
        assert ring_module(2, 1.5, lam, 2.0 * lam) == pytest.approx(
            lam ** (2 - 1.5) * v2, rel=1e-12)
    _report(1, "closed forms 8*pi and 2*pi*sqrt(2) to 1e-12; scaling law "
               "exact for lambda in {0.5, 2, 10}; < 1 ms each")


def test_criterion_2_lemma_extremality():
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        d = int(rng.integers(2, 7))
        phi = tuple(rng.uniform(0.5, 2.5, size=d))
        mu = tuple(rng.uniform(0.5, 2.5, size=d))
        alpha = float(rng.choice([1.5, 2.0, 3.0]))
        space = DiscreteMeasureSpace(phi=phi, mu=mu, alpha=alpha)
        closed = lemma_infimum(space)
        best, rho_grid, _ = simplex_pattern_search(phi, mu, alpha)
        diff = abs(closed["value"] - best)
        worst = max(worst, diff)
        assert diff <= 1e-5
        # the analytic extremal beats every visited grid point
        assert closed["value"] <= best + 1e-12
        assert simplex_objective(np.asarray(phi), np.asarray(mu), alpha,
                                 closed["extremalRho"]) <= best + 1e-12
    elapsed = time.perf_counter() - t0
    assert elapsed < 10.0
    _report(2, f"lemma infimum matches step-1e-3 grid search on 100 spaces "
               f"(worst |diff| = {worst:.2e} <= 1e-5) in {elapsed:.2f} s")


def test_criterion_3_duality(annulus_2d_curves_256, annulus_2d_circles_256,
                             shell_3d_curves_48, shell_3d_spheres_alpha4_48):
    # analytic path: curve module times the dual surface module
    for n, p, ring in ((2, 2.0, RING_2D), (3, 2.0, RING_3D)):
        alpha = p * (n - 1.0) / (p - 1.0)
        mp = exact_ring_curve_module(n, p, ring.r1, ring.r2)
        ma = lower_criterion_integral(ring, alpha,
                                      RadialWeight.constant(1.0)).value
        product = mp * ma ** (p - 1.0)
        assert product == pytest.approx(1.0, abs=1e-10)
    # fully discrete path
    prod_2d = annulus_2d_curves_256.value * annulus_2d_circles_256.value
    assert prod_2d == pytest.approx(1.0, abs=0.10)
    prod_3d = shell_3d_curves_48.value * shell_3d_spheres_alpha4_48.value
    assert prod_3d == pytest.approx(1.0, abs=0.10)
    _report(3, f"duality product = 1 within 1e-10 analytically for (2,2) and "
               f"(3,2); discrete products {prod_2d:.4f} (256^2) and "
               f"{prod_3d:.4f} (48^3) within 10%")


def test_criterion_4_discrete_curve_module(annulus_2d_curves_256,
                                           annulus_2d_circles_256):
    exact_curves = 2.0 * math.pi / math.log(2.0)
    exact_circles = math.log(2.0) / (2.0 * math.pi)
    rel_c = annulus_2d_curves_256.value / exact_curves - 1.0
    rel_s = annulus_2d_circles_256.value / exact_circles - 1.0
    assert abs(rel_c) <= 0.05
    assert abs(rel_s) <= 0.05
    assert annulus_2d_curves_256.dual_gap <= 0.02
    assert annulus_2d_circles_256.dual_gap <= 0.02
    _report(4, f"512 radial curves at 256^2 within 5% of 2*pi/ln 2 "
               f"(rel {rel_c:+.4f}); circle family within 5% of "
               f"ln 2/(2*pi) (rel {rel_s:+.4f}); dual gaps <= 2%")


def test_criterion_5_capacity(capacity_2d_256, capacity_3d_48):
    exact_2d = 2.0 * math.pi / math.log(2.0)
    exact_3d = 8.0 * math.pi
    rel2 = capacity_2d_256.value / exact_2d - 1.0
    rel3 = capacity_3d_48.value / exact_3d - 1.0
    assert abs(rel2) <= 0.02
    assert abs(rel3) <= 0.10
    # isocapacitary bound respected with at most 2% slack
    maz_2d = capacity_lower_bound_maz(2, 1.9999999, math.pi)
    assert capacity_2d_256.value >= maz_2d * (1.0 - 0.02)
    maz_3d = capacity_lower_bound_maz(3, 2.0, 4.0 * math.pi / 3.0)
    assert capacity_3d_48.value >= maz_3d * (1.0 - 0.02)
    # the closed-form bound itself is sharp for the unit ball
    assert maz_3d == pytest.approx(4.0 * math.pi, rel=1e-12)
    _report(5, f"capacity 256^2 rel {rel2:+.4f} (<=2%), 48^3 rel {rel3:+.4f} "
               f"(<=10%); isocapacitary bound respected; unit-ball bound "
               f"= 4*pi exactly")


def test_criterion_6_mean_dilatations():
    quad = QuadratureSpec()
    t0 = time.perf_counter()
    inner = mean_inner_dilatation(AxisStretchMap(0.4, 2),
                                  DilatationParams(alpha=2.0, beta=4.0), quad)
    t_inner = time.perf_counter() - t0
    assert not inner.divergent
    assert inner.value == pytest.approx(5.0, abs=1e-6 * 5.0)
    assert t_inner < 1.0
    t0 = time.perf_counter()
    outer = mean_outer_dilatation(
        AxisStretchMap(0.2, 2),
        DilatationParams(alpha=1.0, gamma=2.0, delta=4.0), quad)
    t_outer = time.perf_counter() - t0
    assert not outer.divergent
    assert outer.value == pytest.approx(2.5, abs=1e-6 * 2.5)
    assert t_outer < 1.0
    t0 = time.perf_counter()
    div_inner = mean_inner_dilatation(AxisStretchMap(0.6, 2),
                                      DilatationParams(alpha=2.0, beta=4.0),
                                      quad)
    div_outer = mean_outer_dilatation(
        AxisStretchMap(0.4, 2),
        DilatationParams(alpha=1.0, gamma=2.0, delta=4.0), quad)
    t_div = time.perf_counter() - t0
    assert div_inner.divergent and div_outer.divergent
    assert t_div < 2.0  # two runs
    # thresholds: 1 - alpha/beta = 0.5 (inner) and
    # (delta-gamma)/((delta-1)*gamma) = 1/3 (outer)
    assert not mean_inner_dilatation(AxisStretchMap(0.45, 2),
                                     DilatationParams(alpha=2.0, beta=4.0),
                                     quad).divergent
    assert not mean_outer_dilatation(
        AxisStretchMap(1.0 / 3.0 - 0.05, 2),
        DilatationParams(alpha=1.0, gamma=2.0, delta=4.0), quad).divergent
    _report(6, f"inner mean = 5 +- 1e-6 ({t_inner:.2f} s), outer mean = 2.5 "
               f"+- 1e-6 ({t_outer:.2f} s); divergence flagged at c = 0.6 "
               f"(inner) and c = 0.4 (outer), matching the thresholds")


def test_criterion_7_criterion_equalities():
    ring = run_scenario(parse_scenario_file(SCENARIOS / "identity_conformal.scn"))
    assert ring.satisfied
    assert abs(ring.diagnostics["relGapAnalytic"]) <= 1e-8
    assert abs(ring.diagnostics["relGapDiscrete"]) <= 0.05

    lower = run_scenario(parse_scenario_file(SCENARIOS / "lower_identity.scn"))
    assert lower.satisfied
    assert abs(lower.diagnostics["relGapAnalytic"]) <= 1e-8
    assert abs(lower.diagnostics["relGapDiscrete"]) <= 0.05

    transfer = run_scenario(
        parse_scenario_file(SCENARIOS / "radial_power_transfer.scn"))
    assert transfer.satisfied
    assert abs(transfer.diagnostics["relGapAnalytic"]) <= 1e-9
    assert transfer.diagnostics["analyticDiscreteDeviation"] <= 0.05
    assert abs(transfer.diagnostics["relGapChain"]) <= 0.05
    assert abs(transfer.diagnostics["relGapRing"]) <= 0.05

    shell = run_scenario(
        parse_scenario_file(SCENARIOS / "transfer_shell_n3p3.scn"))
    assert shell.satisfied
    assert abs(shell.diagnostics["relGapAnalytic"]) <= 1e-9
    assert shell.diagnostics["analyticDiscreteDeviation"] <= 0.10
    _report(7, "identity ring/lower criteria at |relGap| <= 1e-8 analytic "
               "and <= 5% discrete; radial-power transfer chain equal to "
               "1e-9 analytic / 5% discrete (3D shell within 10%)")


def test_criterion_8_pointwise_bounds():
    hia = run_scenario(parse_scenario_file(SCENARIOS / "pointwise_radial_hia.scn"))
    assert hia.satisfied
    assert hia.lhs <= 1.0 + 1e-9
    assert math.isfinite(hia.diagnostics["supStretchRatio"])
    assert math.isfinite(hia.diagnostics["supJacobianRatio"])
    stretch = run_scenario(
        parse_scenario_file(SCENARIOS / "pointwise_axis_stretch.scn"))
    assert stretch.satisfied
    assert math.isfinite(stretch.diagnostics["supStretchRatio"])
    assert math.isfinite(stretch.diagnostics["supJacobianRatio"])
    # the stretch-map ratio has the closed form x^0.4 with sup 1 on the cube
    assert stretch.diagnostics["supStretchRatio"] <= 1.0 + 1e-9
    _report(8, "inner dilatation dominated by the constructed weight at 1e4 "
               "points; stretch/Jacobian ratio sups finite (constants are "
               "unspecified, only boundedness is asserted)")


def test_criterion_9_property_suites():
    import test_dilatations
    import test_linalg
    import test_mappings
    test_dilatations.test_classical_chain_inequality()
    test_dilatations.test_inner_outer_product_identity()
    test_linalg.test_product_matches_determinant()
    test_linalg.test_orthogonal_invariance()
    test_linalg.test_scaling_invariance()
    test_mappings.test_finite_difference_agreement_random()
    _report(9, "property suites (dilatation chain, H_I*H_O = H^alpha, SVD "
               "invariances, finite-difference Jacobian agreement) pass over "
               "their random instance sets")
