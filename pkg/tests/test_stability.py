import math

import numpy as np
import pytest

from axisphere.criticality import initial_guess, solve_critical
from axisphere.pattern import make_pattern
from axisphere.quadrature import QuadratureSpec, integrate_adaptive
from axisphere.stability import (
    CERT_MODES,
    assemble_J,
    axisym_pm_bound,
    doublecap_kernel_integral,
    fourier_log_integral,
    min_eig_constrained,
    single_mode_J,
    stability_report,
)

TWO_CAP_K0_GAMMA = 0.8910848029349048  # (8/sqrt(3)) / (12 log 3 - 8)


def _fourier_log_quad(a: float, b: float, k: int) -> float:
    spec = QuadratureSpec(rel_tol=1e-12)

    def f(u):
        # half-angle form stays finite when a = b and cos u rounds to 1
        val = np.log((a - b) + 2.0 * b * np.sin(0.5 * u) ** 2)
        return val * np.cos(k * u) if k else val

    return integrate_adaptive(f, 0.0, 2.0 * math.pi, spec, abs_tol=1e-12)


def test_fourier_log_integral_property():
    """Closed form against quadrature, 200 draws including the a = b edge."""
    rng = np.random.default_rng(20240817)
    worst = 0.0
    for i in range(200):
        b = float(rng.uniform(0.05, 4.0))
        a = b if i % 5 == 0 else b + float(rng.uniform(1e-6, 5.0))
        k = int(rng.integers(0, 9))
        got = fourier_log_integral(a, b, k)
        worst = max(worst, abs(got - _fourier_log_quad(a, b, k)))
    assert worst <= 1e-8, f"worst abs gap {worst:.3e}"


def test_fourier_log_closed_values():
    # k = 0 is the mean of the log kernel, 2 pi log((a+s)/2)
    a, b = 5.0, 3.0
    s = math.sqrt(a * a - b * b)
    assert fourier_log_integral(a, b, 0) == pytest.approx(2.0 * math.pi * math.log((a + s) / 2.0), rel=1e-14)
    q = b / (a + s)
    for k in (1, 2, 5):
        assert fourier_log_integral(a, b, k) == pytest.approx(-2.0 * math.pi * q**k / k, rel=1e-13)
    # degenerate circle pair: q -> 1, still finite
    assert fourier_log_integral(2.0, 2.0, 3) == pytest.approx(-2.0 * math.pi / 3.0, rel=1e-13)


def test_doublecap_kernel_closed_form():
    for k in range(1, 9):
        assert doublecap_kernel_integral(k) == pytest.approx(
            -2.0 * math.pi**2 / (k * 3.0**k), rel=1e-13
        )


def test_assembled_blocks_are_symmetric():
    p = solve_critical(3, 2.0, initial_guess(3)).pattern
    J = assemble_J(p, 2.0, K=8)
    for k in range(0, 9):
        blk = J.block(k)
        assert blk.shape == (3, 3)
        assert float(np.max(np.abs(blk - blk.T))) == 0.0
    # cos and sin carry the same quadratic form on every wavenumber
    for k in range(1, 9):
        gap = float(np.max(np.abs(J.block(k, parity="cos") - J.block(k, parity="sin"))))
        assert gap <= 1e-12


def test_double_cap_k1_block_and_rotation_mode():
    J = assemble_J(make_pattern([-0.5, 0.5]), 1.0, K=4)
    blk = J.block(1)
    expect = math.pi * np.ones((2, 2))
    assert float(np.max(np.abs(blk - expect))) <= 1e-12
    # tilting both circles the same way is a rigid rotation
    assert float(np.max(np.abs(blk @ np.array([1.0, -1.0])))) <= 1e-12


def test_single_mode_matches_assembly():
    cp = solve_critical(3, 2.0, initial_guess(3))
    J = assemble_J(cp.pattern, 2.0, K=8)
    z_n = cp.pattern.z[-1]
    for k in range(1, 7):
        got = J.block(k)[2, 2] / math.pi
        assert got == pytest.approx(single_mode_J(z_n, 2.0, k), rel=1e-10)


def test_single_mode_frozen_value():
    assert single_mode_J(0.9, 10.0, 2) == pytest.approx(6.682472016116854, rel=1e-13)


def test_pm_bound_dominates():
    # the closed bound majorizes the exact +1/-1 pair form (worst chord)
    rng = np.random.default_rng(314)
    v = np.array([1.0, -1.0])
    for _ in range(50):
        z = float(rng.uniform(0.05, 0.95))
        g = float(rng.uniform(0.0, 30.0))
        C = assemble_J(make_pattern([-z, z]), g, K=4).const_block
        exact = float(v @ C @ v) / math.pi
        assert exact <= axisym_pm_bound(z, g) + 1e-9


def test_k_refinement_is_converged():
    p = make_pattern([-0.5, 0.5])
    r16 = min_eig_constrained(assemble_J(p, 1.0, K=16))
    r32 = min_eig_constrained(assemble_J(p, 1.0, K=32))
    assert abs(r16.min_eig - r32.min_eig) <= 1e-8


def test_double_cap_instability_threshold():
    """The symmetric k = 0 breathing mode changes sign at a pinned coupling."""
    analytic = (8.0 / math.sqrt(3.0)) / (12.0 * math.log(3.0) - 8.0)
    assert TWO_CAP_K0_GAMMA == pytest.approx(analytic, abs=1e-14)
    p = make_pattern([-0.5, 0.5])
    lo, hi = 0.5, 1.5
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if min_eig_constrained(assemble_J(p, mid, K=8)).min_eig < -1e-13:
            lo = mid
        else:
            hi = mid
    assert 0.5 * (lo + hi) == pytest.approx(TWO_CAP_K0_GAMMA, abs=1e-8)


def test_double_cap_verdicts_around_threshold():
    p = make_pattern([-0.5, 0.5])
    below = stability_report(p, 0.8)
    assert below.verdict == "certified-unstable"
    assert below.min_eig < -1e-3
    assert below.mode_k == 0 and below.mode_parity == "constant"
    above = stability_report(p, 1.0)
    assert above.verdict == "no-certificate"
    assert abs(above.min_eig) <= 1e-10  # rotation zero mode saturates the bound


def test_single_cap_marginal_at_zero_coupling():
    rep = stability_report(make_pattern([0.0]), 0.0)
    assert abs(rep.min_eig) <= 1e-12
    assert rep.verdict == "no-certificate"


def test_report_json_shape():
    rep = stability_report(make_pattern([-0.5, 0.5]), 0.8, K=16)
    d = rep.to_json()
    assert set(d) == {"gamma", "K", "min_eig", "mode", "certificates", "verdict"}
    assert set(d["mode"]) == {"circle", "k", "parity"}
    assert len(d["certificates"]["single_mode"]) == CERT_MODES
    assert d["K"] == 16


def test_eigen_residual_small():
    p = solve_critical(3, 2.0, initial_guess(3)).pattern
    J = assemble_J(p, 2.0, K=12)
    for k in range(1, 13):
        blk = J.block(k)
        w, V = np.linalg.eigh(blk)
        i = int(np.argmin(w))
        res = float(np.max(np.abs(blk @ V[:, i] - w[i] * V[:, i])))
        assert res <= 1e-10
