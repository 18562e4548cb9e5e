"""Critical interface configurations and explicit criticality curves.

A pattern is critical when kappa_g(z_k) + 4*gamma*v(z_k) takes the same
value lambda on every interface.  Eliminating lambda gives the consecutive
difference system

    R_k = kappa_g(z_{k+1}) - kappa_g(z_k) + 4*gamma*(v(z_{k+1}) - v(z_k)),
    k = 1..n-1,

closed by the mean-value constraint R_n = m(z) - m_target.  The system is
solved by a damped Newton iteration with a central finite-difference
Jacobian; gamma families are traced by predictor-corrector continuation.

Two one-parameter families admit closed-form couplings gamma(z1): the
symmetric three-interface family {-z1, 0, z1} and the four-interface
family {-z1, 1/2 - z1, z1 - 1/2, z1}.  Both denominators vanish at an
interior abscissa, located here by sign-change bisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    Asymptote,
    BranchLost,
    LeftDomain,
    NoConvergence,
    NonPositive,
    OutOfRange,
)
from .pattern import AxisymPattern, kappa_g, make_pattern, mass_of_interfaces
from .potential import v_at_interfaces, v_diff

__all__ = [
    "SolveOptions",
    "SolverTrace",
    "CriticalPoint",
    "GapReport",
    "UniformCheck",
    "residuals",
    "lambda_values",
    "lambda_spread",
    "solve_critical",
    "continue_gamma",
    "gamma_of_z1_3",
    "gamma_of_z1_4",
    "denominator_root_3",
    "denominator_root_4",
    "uniform_pattern",
    "initial_guess",
    "uniform_criticality_check",
    "polar_cap_bound",
    "gap_diagnostics",
    "catalog_record",
]


def residuals(p: AxisymPattern, gamma: float, m_target: float = 0.0) -> np.ndarray:
    """Consecutive-difference residuals plus the mean-value constraint."""
    out = np.empty(p.n)
    for k in range(1, p.n):
        out[k - 1] = kappa_g(p, k + 1) - kappa_g(p, k) + 4.0 * gamma * v_diff(p, k)
    out[p.n - 1] = p.m - m_target
    return out


def lambda_values(p: AxisymPattern, gamma: float) -> tuple[float, ...]:
    """Per-interface multiplier kappa_g(z_k) + 4*gamma*v(z_k)."""
    pot = v_at_interfaces(p)
    return tuple(
        kappa_g(p, k) + 4.0 * gamma * pot.values[k - 1] for k in range(1, p.n + 1)
    )


def lambda_spread(p: AxisymPattern, gamma: float) -> float:
    lams = lambda_values(p, gamma)
    return max(lams) - min(lams)


# ------------------------------------------------------------------- solver


@dataclass(frozen=True)
class SolveOptions:
    tol: float = 1e-11  # on the max-norm of the residual vector
    max_iter: int = 60
    fd_step: float = 1e-6  # scaled by max(1, |z_k|), capped by local gaps
    max_halvings: int = 40
    m_target: float = 0.0


@dataclass(frozen=True)
class SolverTrace:
    iterations: int
    damping_events: int
    init_label: str


@dataclass(frozen=True)
class CriticalPoint:
    pattern: AxisymPattern
    gamma: float
    lam: float
    residual_norm: float
    trace: SolverTrace


def _in_domain(z: np.ndarray) -> bool:
    if not (-1.0 < z[0] and z[-1] < 1.0):
        return False
    return bool(np.all(np.diff(z) > 0.0))


def _residuals_z(z: np.ndarray, gamma: float, m_target: float) -> np.ndarray:
    p = AxisymPattern(z=tuple(z), m=mass_of_interfaces(z))
    return residuals(p, gamma, m_target)


def _jacobian(z: np.ndarray, gamma: float, m_target: float, fd_step: float) -> np.ndarray:
    n = z.size
    jac = np.empty((n, n))
    nodes = np.concatenate(([-1.0], z, [1.0]))
    for i in range(n):
        h = fd_step * max(1.0, abs(z[i]))
        gap = min(z[i] - nodes[i], nodes[i + 2] - z[i])
        h = min(h, 0.25 * gap)  # keep both FD states strictly ordered
        zp, zm = z.copy(), z.copy()
        zp[i] += h
        zm[i] -= h
        jac[:, i] = (_residuals_z(zp, gamma, m_target) - _residuals_z(zm, gamma, m_target)) / (
            2.0 * h
        )
    return jac


def solve_critical(
    n: int,
    gamma: float,
    init: AxisymPattern,
    opts: SolveOptions = SolveOptions(),
    init_label: str = "caller",
) -> CriticalPoint:
    """Damped Newton on the residual system from the given start.

    Steps are halved until the trial iterate keeps strict ordering inside
    (-1, 1) and reduces the squared residual norm; LeftDomain reports
    damping that cannot restore ordering at all, NoConvergence an exhausted
    iteration budget.
    """
    if init.n != n:
        raise OutOfRange(f"initial pattern has {init.n} interfaces, expected {n}")
    z = np.array(init.z)
    res = _residuals_z(z, gamma, opts.m_target)
    damping_events = 0
    for it in range(opts.max_iter):
        norm = float(np.max(np.abs(res)))
        if norm <= opts.tol:
            pat = make_pattern(z)
            lams = lambda_values(pat, gamma)
            return CriticalPoint(
                pattern=pat,
                gamma=gamma,
                lam=float(np.mean(lams)),
                residual_norm=norm,
                trace=SolverTrace(iterations=it, damping_events=damping_events, init_label=init_label),
            )
        jac = _jacobian(z, gamma, opts.m_target, opts.fd_step)
        try:
            step = np.linalg.solve(jac, -res)
        except np.linalg.LinAlgError as exc:
            raise NoConvergence(f"singular Jacobian at iteration {it}") from exc
        scale = 1.0
        old_sq = float(res @ res)
        for halving in range(opts.max_halvings + 1):
            trial = z + scale * step
            if _in_domain(trial):
                trial_res = _residuals_z(trial, gamma, opts.m_target)
                if float(trial_res @ trial_res) < old_sq:
                    break
            scale *= 0.5
            damping_events += 1
        else:
            if not _in_domain(z + scale * 2.0 * step):
                raise LeftDomain("damping cannot restore interface ordering")
            raise NoConvergence("no residual decrease along the Newton direction")
        z, res = trial, trial_res
    raise NoConvergence(f"residual {float(np.max(np.abs(res))):.3e} after {opts.max_iter} iterations")


def continue_gamma(
    n: int,
    gamma_start: float,
    gamma_end: float,
    steps: int,
    seed: AxisymPattern,
    opts: SolveOptions = SolveOptions(),
) -> list[CriticalPoint]:
    """Trace a critical branch over a log-spaced gamma schedule.

    The previous solution seeds each correction.  On a Newton failure the
    gamma increment is halved and retried once; a second failure aborts
    with BranchLost.
    """
    if steps < 2:
        raise OutOfRange("continuation needs at least two steps")
    if gamma_start <= 0.0 or gamma_end <= 0.0:
        raise NonPositive("continuation expects positive gamma endpoints")
    gammas = [float(g) for g in np.geomspace(gamma_start, gamma_end, steps)]
    out: list[CriticalPoint] = []
    current = seed
    prev_gamma = None
    for g in gammas:
        try:
            cp = solve_critical(n, float(g), current, opts, init_label="continuation")
        except (NoConvergence, LeftDomain):
            if prev_gamma is None:
                raise BranchLost(f"no solution at branch start gamma={g!r}")
            half = math.sqrt(prev_gamma * g)  # halve the log-step
            try:
                mid = solve_critical(n, half, current, opts, init_label="continuation")
                cp = solve_critical(n, float(g), mid.pattern, opts, init_label="continuation")
            except (NoConvergence, LeftDomain) as exc:
                raise BranchLost(f"corrector failed twice near gamma={g!r}") from exc
        out.append(cp)
        current = cp.pattern
        prev_gamma = float(g)
    return out


def catalog_record(cp: CriticalPoint) -> dict:
    """JSON-lines record for a solved point."""
    return {
        "n": cp.pattern.n,
        "gamma": cp.gamma,
        "z": list(cp.pattern.z),
        "lambda": cp.lam,
        "residual": cp.residual_norm,
        "min_gap": cp.pattern.min_gap(),
    }


# ----------------------------------------------------- closed-form branches


def _check_open(z1: float, lo: float, hi: float) -> None:
    if not lo < z1 < hi:
        raise OutOfRange(f"z1={z1!r} outside ({lo}, {hi})")


def gamma_of_z1_3(z1: float) -> float:
    """Coupling at which {-z1, 0, z1} is critical, 0 < z1 < 1.

    gamma = -(z1/sqrt(1-z1^2)) / (4*[z1*log(1+z1) - (z1-1)*log(1-z1)]);
    tends to 1/4 as z1 -> 0+ and blows up where the bracket vanishes.
    """
    _check_open(z1, 0.0, 1.0)
    den = 4.0 * (z1 * math.log1p(z1) - (z1 - 1.0) * math.log1p(-z1))
    if abs(den) <= 1e-12:
        raise Asymptote(f"three-interface denominator vanishes at z1={z1!r}")
    return -(z1 / math.sqrt(1.0 - z1 * z1)) / den


def gamma_of_z1_4(z1: float) -> float:
    """Coupling for {-z1, 1/2 - z1, z1 - 1/2, z1}, 1/2 < z1 < 1."""
    _check_open(z1, 0.5, 1.0)
    w = z1 - 0.5
    num = z1 / math.sqrt(1.0 - z1 * z1) + w / math.sqrt(1.0 - w * w)
    den = 4.0 * (
        -z1 * math.log((1.0 + z1) / (0.5 + z1))
        - (z1 - 1.0) * math.log((1.5 - z1) / (1.0 - z1))
    )
    if abs(den) <= 1e-12:
        raise Asymptote(f"four-interface denominator vanishes at z1={z1!r}")
    return num / den


def _bisect_root(f, lo: float, hi: float, tol: float = 1e-10) -> float:
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise OutOfRange(f"no sign change on [{lo}, {hi}]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if flo * fm < 0.0:
            hi = mid
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


def denominator_root_3(tol: float = 1e-10) -> float:
    """Vertical asymptote of the three-interface branch (about 0.69)."""
    return _bisect_root(
        lambda t: t * math.log1p(t) - (t - 1.0) * math.log1p(-t), 0.5, 0.8, tol
    )


def denominator_root_4(tol: float = 1e-10) -> float:
    """Vertical asymptote of the four-interface branch (about 0.7855)."""

    def den(t: float) -> float:
        return -t * math.log((1.0 + t) / (0.5 + t)) - (t - 1.0) * math.log(
            (1.5 - t) / (1.0 - t)
        )

    return _bisect_root(den, 0.6, 0.99, tol)


# ------------------------------------------------------- uniform placements


def uniform_pattern(count: int) -> AxisymPattern:
    """Evenly placed interfaces with zero mean.

    Odd count 2n-1 uses z_i = -1 + i/n; even count 2n uses
    z_i = -1 + (2i-1)/(2n).
    """
    if count < 1:
        raise NonPositive("interface count must be positive")
    if count % 2 == 1:
        n = (count + 1) // 2
        zs = [-1.0 + i / n for i in range(1, count + 1)]
    else:
        n = count // 2
        zs = [-1.0 + (2 * i - 1) / (2 * n) for i in range(1, count + 1)]
    return make_pattern(zs)


def initial_guess(count: int, kind: str = "uniform") -> AxisymPattern:
    """Solver starting pattern: evenly placed, or respaced evenly in atanh(z).

    The stretched variant keeps the extreme placements and crowds the rest
    toward the equator; its mean value is generally nonzero, which is fine
    for a Newton start since the mass equation is part of the system.
    """
    if kind == "uniform":
        return uniform_pattern(count)
    if kind == "stretch":
        base = uniform_pattern(count)
        if count == 1:
            return base
        hi = math.atanh(base.z[-1])
        ts = np.linspace(-hi, hi, count)
        return make_pattern([math.tanh(t) for t in ts])
    raise OutOfRange(f"unknown initial-guess kind {kind!r}")


@dataclass(frozen=True)
class UniformCheck:
    """Outcome of probing an evenly placed pattern for criticality."""

    count: int
    all_gamma: bool
    critical_gamma: float | None
    pair_gammas: tuple[float | None, ...] = field(default=())
    obstruction: str | None = None
    obstruction_pair: tuple[float, float] | None = None
    obstruction_gap: float | None = None
    residual_floor: float | None = None


def uniform_criticality_check(count: int, gamma_max: float = 1e4) -> UniformCheck:
    """Decide for which couplings the evenly placed pattern is critical.

    One or two interfaces: critical for every gamma (all pairwise residuals
    vanish identically).  Three or four: each consecutive pair demands the
    same coupling, giving the unique critical gamma.  Five or more: the
    pair equations demand incompatible couplings (or a non-positive one);
    the first incompatible consecutive pair of demanded couplings is
    reported together with its gap and a residual floor over a gamma sweep.
    """
    p = uniform_pattern(count)
    if count <= 2:
        return UniformCheck(count=count, all_gamma=True, critical_gamma=None)

    # Each pairwise equation is linear in gamma: the demanded coupling is
    # -(kappa difference) / (4 * potential difference).  A pair with both
    # differences zero (the central pair of the even-count placements)
    # constrains nothing and is recorded as None.
    candidates: list[float | None] = []
    unsatisfiable = False
    for k in range(1, p.n):
        dk = kappa_g(p, k + 1) - kappa_g(p, k)
        dv = v_diff(p, k)
        if abs(dv) <= 1e-12:  # equal potentials: rounding noise, not a ratio
            candidates.append(None)
            unsatisfiable = unsatisfiable or abs(dk) > 1e-12
        else:
            candidates.append(-dk / (4.0 * dv))

    finite = [c for c in candidates if c is not None]
    same = finite and all(abs(c - finite[0]) <= 1e-9 * max(1.0, abs(finite[0])) for c in finite)
    if same and not unsatisfiable and finite[0] > 0.0:
        g = float(np.mean(finite))
        return UniformCheck(
            count=count,
            all_gamma=False,
            critical_gamma=g,
            pair_gammas=tuple(candidates),
        )

    pair = None
    gap = None
    for a, b in zip(candidates, candidates[1:]):
        if a is None or b is None:
            continue
        if abs(a - b) > 1e-9 * max(1.0, abs(a)) or a <= 0.0 or b <= 0.0:
            pair, gap = (a, b), abs(a - b)
            break
    negs = [c for c in candidates if c is not None and c <= 0.0]
    if negs:
        obstruction = "a pair demands a non-positive coupling (same-sign differences)"
    else:
        obstruction = "consecutive pairs demand different couplings"

    floor = math.inf
    for g in np.geomspace(1e-3, gamma_max, 60):
        floor = min(floor, float(np.max(np.abs(residuals(p, float(g))[:-1]))))
    return UniformCheck(
        count=count,
        all_gamma=False,
        critical_gamma=None,
        pair_gammas=tuple(candidates),
        obstruction=obstruction,
        obstruction_pair=pair,
        obstruction_gap=gap,
        residual_floor=floor,
    )


# ------------------------------------------------------------------ bounds


def polar_cap_bound(gamma: float) -> float:
    """Lower bound on the first interface height of nontrivial criticals.

    a / sqrt(1 + a^2) with a = -6*gamma/e - 1/sqrt(3); tends to -1/2 as
    gamma -> 0 and to -1 for strong coupling.
    """
    if gamma < 0.0:
        raise OutOfRange("coupling must be nonnegative")
    a = -6.0 * gamma / math.e - 1.0 / math.sqrt(3.0)
    return a / math.sqrt(1.0 + a * a)


@dataclass(frozen=True)
class GapReport:
    """Spacing diagnostics for a solved pattern."""

    gaps: tuple[float, ...]
    scaled: tuple[float, ...]  # gap * gamma / max(|z_k|, |z_{k+1}|)
    stretched_nodes: tuple[float, ...]  # atanh(z_k)
    stretched_gaps: tuple[float, ...]
    stretched_gap_variance: float


def gap_diagnostics(p: AxisymPattern, gamma: float) -> GapReport:
    gaps = tuple(b - a for a, b in zip(p.z, p.z[1:]))
    scaled = tuple(
        g * gamma / max(abs(a), abs(b)) if max(abs(a), abs(b)) > 0.0 else math.inf
        for g, a, b in zip(gaps, p.z, p.z[1:])
    )
    stretched = tuple(math.atanh(v) for v in p.z)
    sgaps = tuple(b - a for a, b in zip(stretched, stretched[1:]))
    var = float(np.var(sgaps)) if sgaps else 0.0
    return GapReport(
        gaps=gaps,
        scaled=scaled,
        stretched_nodes=stretched,
        stretched_gaps=sgaps,
        stretched_gap_variance=var,
    )
