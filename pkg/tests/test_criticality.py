import math

import numpy as np
import pytest

from axisphere.criticality import (
    SolveOptions,
    catalog_record,
    continue_gamma,
    denominator_root_3,
    denominator_root_4,
    gamma_of_z1_3,
    gamma_of_z1_4,
    gap_diagnostics,
    initial_guess,
    lambda_spread,
    lambda_values,
    polar_cap_bound,
    residuals,
    solve_critical,
    uniform_criticality_check,
    uniform_pattern,
)
from axisphere.errors import Asymptote, BranchLost, OutOfRange
from axisphere.pattern import make_pattern

# gamma where the evenly spaced 3- and 4-interface placements are critical
G3 = 1.0 / (2.0 * math.sqrt(3.0) * math.log(4.0 / 3.0))
G4 = 15.607189587574723


def test_double_cap_residuals_vanish_for_all_gamma():
    p = make_pattern([-0.5, 0.5])
    for g in np.geomspace(1e-3, 1e3, 50):
        r = residuals(p, float(g))
        assert float(np.max(np.abs(r))) <= 1e-12


def test_residual_layout_and_mass_row():
    p = make_pattern([-0.6, -0.1, 0.4])
    r = residuals(p, 1.0, m_target=p.m)
    assert r.shape == (p.n,)
    assert r[-1] == 0.0  # mass row measured against its own mean
    r2 = residuals(p, 1.0, m_target=p.m + 0.25)
    assert r2[-1] == pytest.approx(-0.25, abs=1e-15)


def test_lambda_spread_small_at_critical_point():
    cp = solve_critical(3, 2.0, initial_guess(3))
    assert lambda_spread(cp.pattern, 2.0) <= 1e-9
    vals = lambda_values(cp.pattern, 2.0)
    assert len(vals) == 3
    assert max(vals) - min(vals) <= 1e-9


def test_solver_reaches_frozen_three_interface_point():
    cp = solve_critical(3, 2.0, initial_guess(3))
    assert cp.residual_norm <= 1e-11
    assert cp.pattern.z[2] == pytest.approx(0.5906319456623301, abs=1e-10)
    assert cp.pattern.z[1] == pytest.approx(0.0, abs=1e-12)
    # the solved point sits exactly on the explicit branch curve
    assert gamma_of_z1_3(cp.pattern.z[2]) == pytest.approx(2.0, abs=1e-8)


def test_solver_trace_is_reported():
    cp = solve_critical(2, 5.0, make_pattern([-0.42, 0.55]))
    assert cp.trace.iterations >= 1
    assert cp.trace.init_label == "caller"
    # an init that is already critical converges in zero iterations
    assert solve_critical(2, 5.0, initial_guess(2)).trace.iterations == 0


def test_continuation_monotone_branch():
    seed = initial_guess(3)
    pts = continue_gamma(3, 1.05, 10.0, 12, seed)
    assert len(pts) == 12
    outer = [cp.pattern.z[2] for cp in pts]
    assert all(b > a for a, b in zip(outer, outer[1:]))  # circles spread outward
    for cp in pts:
        assert cp.residual_norm <= 1e-11
        rec = catalog_record(cp)
        assert rec["min_gap"] >= 1e-4
        assert set(rec) == {"n", "gamma", "z", "lambda", "residual", "min_gap"}


def test_continuation_losing_the_branch():
    with pytest.raises(BranchLost):
        continue_gamma(3, 1.05, 1e9, 4, initial_guess(3))


def test_three_interface_curve_anchors():
    assert gamma_of_z1_3(0.5) == pytest.approx(G3, rel=1e-13)
    assert gamma_of_z1_3(1e-5) == pytest.approx(0.25000375006041753, rel=1e-12)
    root = denominator_root_3()
    assert root == pytest.approx(0.6909077386953869, abs=1e-9)
    # blows up on both sides of the vanishing denominator
    assert abs(gamma_of_z1_3(root + 1e-7)) > 1e5
    assert abs(gamma_of_z1_3(root - 1e-7)) > 1e5
    with pytest.raises(Asymptote):
        gamma_of_z1_3(denominator_root_3(tol=1e-16))
    with pytest.raises(OutOfRange):
        gamma_of_z1_3(-0.1)
    with pytest.raises(OutOfRange):
        gamma_of_z1_3(1.0)


def test_four_interface_curve_anchors():
    # closed form at z1 = 3/4, derived by direct substitution
    ref = (3.0 / math.sqrt(7.0) + 1.0 / math.sqrt(15.0)) / (3.0 * math.log(5.0 / 7.0) + math.log(3.0))
    assert gamma_of_z1_4(0.75) == pytest.approx(ref, rel=1e-13)
    assert gamma_of_z1_4(0.75) == pytest.approx(G4, rel=1e-13)
    assert gamma_of_z1_4(0.5 + 1e-10) == pytest.approx(G3, abs=1e-8)
    root = denominator_root_4()
    assert root == pytest.approx(0.7855385915644, abs=1e-9)
    assert abs(root - 0.78554) <= 1e-4
    with pytest.raises(OutOfRange):
        gamma_of_z1_4(0.5)


def test_uniform_placements():
    assert uniform_pattern(3).z == (-0.5, 0.0, 0.5)
    assert uniform_pattern(4).z == (-0.75, -0.25, 0.25, 0.75)
    assert uniform_pattern(5).z == pytest.approx((-2 / 3, -1 / 3, 0.0, 1 / 3, 2 / 3), abs=1e-15)
    for c in range(1, 9):
        assert abs(uniform_pattern(c).m) <= 1e-15


def test_initial_guess_kinds():
    u = initial_guess(4, "uniform")
    s = initial_guess(4, "stretch")
    assert u.z == uniform_pattern(4).z
    assert s.z[0] == pytest.approx(u.z[0], abs=1e-15) and s.z[-1] == pytest.approx(u.z[-1], abs=1e-15)
    assert s.z[1] < u.z[1]  # interior circles crowd toward the equator
    with pytest.raises(OutOfRange):
        initial_guess(3, "nope")


def test_uniform_check_small_counts():
    for c in (1, 2):
        chk = uniform_criticality_check(c)
        assert chk.all_gamma and chk.critical_gamma is None
    chk3 = uniform_criticality_check(3)
    assert not chk3.all_gamma
    assert chk3.critical_gamma == pytest.approx(G3, rel=1e-12)
    chk4 = uniform_criticality_check(4)
    assert chk4.critical_gamma == pytest.approx(G4, rel=1e-12)
    # central pair of the 4-placement is constraint-free
    assert chk4.pair_gammas[1] is None


def test_uniform_check_rigidity():
    """Five or more evenly spaced circles are never critical."""
    floors = {5: 0.7222304030109801, 6: 0.3939648797541395}
    for count, floor in floors.items():
        chk = uniform_criticality_check(count)
        assert chk.critical_gamma is None
        assert chk.residual_floor is not None and chk.residual_floor >= 1e-3
        assert chk.residual_floor == pytest.approx(floor, rel=1e-6)
    assert "sign" in uniform_criticality_check(5).obstruction
    assert "different couplings" in uniform_criticality_check(6).obstruction


def test_uniform_residuals_confirm_special_gammas():
    assert float(np.max(np.abs(residuals(uniform_pattern(3), G3)))) <= 1e-11
    assert float(np.max(np.abs(residuals(uniform_pattern(4), G4)))) <= 1e-11


def test_polar_cap_bound_values():
    assert polar_cap_bound(0.0) == -0.5  # a(0) = -1/sqrt(3) exactly
    assert polar_cap_bound(1.0) == pytest.approx(-0.9411527111841357, abs=1e-12)
    gs = np.linspace(0.0, 20.0, 41)
    vals = [polar_cap_bound(float(g)) for g in gs]
    assert all(b < a for a, b in zip(vals, vals[1:]))  # tightens toward -1
    assert vals[-1] > -1.0
    with pytest.raises(OutOfRange):
        polar_cap_bound(-0.5)


def test_catalogued_points_respect_polar_cap_bound():
    for n, g_hi in ((2, 50.0), (3, 20.0)):
        for cp in continue_gamma(n, 0.5 if n == 2 else 1.05, g_hi, 8, initial_guess(n)):
            assert cp.pattern.z[0] >= polar_cap_bound(cp.gamma)


def test_gap_diagnostics_symmetric_point():
    cp = solve_critical(3, 2.0, initial_guess(3))
    rep = gap_diagnostics(cp.pattern, 2.0)
    assert len(rep.gaps) == 2
    assert rep.stretched_gap_variance <= 1e-20
    assert rep.stretched_nodes[1] == pytest.approx(0.0, abs=1e-12)


def test_solver_options_mass_target():
    opts = SolveOptions(m_target=-0.2)
    cp = solve_critical(2, 1.0, make_pattern([-0.3, 0.55]), opts)
    assert cp.pattern.m == pytest.approx(-0.2, abs=1e-11)
    assert cp.residual_norm <= 1e-11
