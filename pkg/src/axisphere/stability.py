"""Second-variation analysis on a per-circle Fourier basis.

Normal perturbations of the interface circles are expanded per circle as
constant + cos(k th) + sin(k th).  Because the interaction kernel between
two circles depends only on the angle difference, modes with different
wavenumber or parity never couple and the quadratic form splits into
small symmetric blocks, one pair (cos, sin) per wavenumber plus one
constants block carrying the zero-mean constraint.

The kernel integrals reduce to

    integral_0^{2pi} log(a - b cos u) cos(ku) du
        = -(2pi/k) q^k,  q = b / (a + sqrt(a^2 - b^2)),      k >= 1
    integral_0^{2pi} log(a - b cos u) du = 2pi log((a + sqrt(a^2-b^2))/2)

where a = r_i^2 + r_j^2 + (z_i - z_j)^2 and b = 2 r_i r_j encode the
squared chord distance a - b cos u between points of the two circles.
The q form keeps full precision in the self-interaction case a = b,
where q = 1 and the integrand has a log singularity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .criticality import residuals
from .errors import DomainError, NotCritical, OutOfRange
from .pattern import AxisymPattern
from .potential import grad_v_normal

__all__ = [
    "JMatrix",
    "StabilityReport",
    "fourier_log_integral",
    "doublecap_kernel_integral",
    "single_mode_J",
    "axisym_pm_bound",
    "assemble_J",
    "min_eig_constrained",
    "stability_report",
]

CRITICAL_TOL = 1e-8
CERT_MODES = 6


def fourier_log_integral(a: float, b: float, k: int) -> float:
    """Fourier coefficient of log(a - b cos u) over a full period."""
    if a <= 0.0 or b < 0.0 or b > a:
        raise DomainError(f"need a >= b >= 0 with a > 0, got a={a!r}, b={b!r}")
    if k < 0:
        raise OutOfRange("wavenumber must be nonnegative")
    s = math.sqrt((a - b) * (a + b))
    if k == 0:
        return 2.0 * math.pi * math.log(0.5 * (a + s))
    q = b / (a + s)
    return -(2.0 * math.pi / k) * q**k


def doublecap_kernel_integral(k: int) -> float:
    """Double integral of log(5 - 3cos(th-al)) cos(k th) cos(k al).

    Integrating the angle difference first leaves a single cos^2 average,
    so the value is pi times the single-circle coefficient; equals
    -2 pi^2 / (k 3^k).  The sin-sin variant gives the same number.
    """
    if k < 1:
        raise OutOfRange("wavenumber must be at least 1")
    return math.pi * fourier_log_integral(5.0, 3.0, k)


def single_mode_J(z_n: float, gamma: float, k: int) -> float:
    """Quadratic form per pi of a single cos/sin mode on the top circle.

    Valid for equatorially symmetric zero-mean critical patterns, where
    the slope-accumulation value at the top interface is -(1 - z_n) and
    the self-interaction q equals 1.
    """
    if not 0.0 < z_n < 1.0:
        raise DomainError(f"z_n={z_n!r} outside (0, 1)")
    if k < 1:
        raise DomainError("wavenumber must be at least 1")
    r2 = 1.0 - z_n * z_n
    return (k * k - 1.0) / math.sqrt(r2) + 4.0 * gamma * (r2 / k + (z_n - 1.0))


def axisym_pm_bound(z_n: float, gamma: float) -> float:
    """Upper bound per pi on the +1/-1 two-circle constant perturbation.

    Negative values certify instability; the bound replaces the cross
    interaction by the worst chord (squared distance at most 4), so the
    exact two-circle form never exceeds it.
    """
    if not 0.0 < z_n < 1.0:
        raise DomainError(f"z_n={z_n!r} outside (0, 1)")
    r2 = 1.0 - z_n * z_n
    return (
        -4.0 / math.sqrt(r2)
        + gamma * 32.0 * r2 * (math.log(2.0) - math.log(math.sqrt(r2)))
        + gamma * 16.0 * (z_n - 1.0)
    )


@dataclass(frozen=True)
class JMatrix:
    """Assembled second-variation blocks for one critical pattern."""

    pattern: AxisymPattern
    gamma: float
    K: int
    const_block: np.ndarray
    k_blocks: tuple  # index k-1 -> shared cos/sin block, ndarray (n, n)
    weights: np.ndarray  # zero-mean constraint on constants: w . c = 0

    def block(self, k: int, parity: str = "cos") -> np.ndarray:
        if parity not in ("constant", "cos", "sin"):
            raise OutOfRange(f"unknown parity {parity!r}")
        if k == 0:
            return self.const_block
        if not 1 <= k <= self.K:
            raise OutOfRange(f"wavenumber {k} outside 0..{self.K}")
        return self.k_blocks[k - 1]

    def dense(self) -> np.ndarray:
        """Full matrix over {constant} + {cos k, sin k : k <= K} per circle."""
        n = self.pattern.n
        dim = n * (2 * self.K + 1)
        out = np.zeros((dim, dim))
        out[:n, :n] = self.const_block
        for k in range(1, self.K + 1):
            for half in range(2):
                lo = n + (2 * (k - 1) + half) * n
                out[lo : lo + n, lo : lo + n] = self.k_blocks[k - 1]
        return out


def assemble_J(p: AxisymPattern, gamma: float, K: int = 32) -> JMatrix:
    """Blockwise second variation about a critical pattern.

    Diagonal carries the curvature part ((k^2-1)/r_i weighted by the mode
    norm) and the normal derivative of the screened potential; every pair
    of circles couples through the log-kernel Fourier coefficient at its
    chord geometry.
    """
    if K < 1:
        raise OutOfRange("mode cutoff must be at least 1")
    res = residuals(p, gamma, m_target=p.m)
    if float(np.max(np.abs(res))) > CRITICAL_TOL:
        raise NotCritical(f"pattern residual {float(np.max(np.abs(res))):.3e} exceeds {CRITICAL_TOL}")
    n = p.n
    r = np.array([p.radius(i) for i in range(1, n + 1)])
    z = np.array(p.z)
    g = np.array([grad_v_normal(p, i) for i in range(1, n + 1)])
    a = r[:, None] ** 2 + r[None, :] ** 2 + (z[:, None] - z[None, :]) ** 2
    b = 2.0 * r[:, None] * r[None, :]

    const = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            const[i, j] = -4.0 * gamma * r[i] * r[j] * fourier_log_integral(a[i, j], b[i, j], 0)
    const[np.diag_indices(n)] += -2.0 * math.pi / r + 4.0 * gamma * g * 2.0 * math.pi * r

    blocks = []
    for k in range(1, K + 1):
        blk = np.empty((n, n))
        for i in range(n):
            for j in range(n):
                blk[i, j] = -2.0 * gamma * r[i] * r[j] * fourier_log_integral(a[i, j], b[i, j], k)
        blk[np.diag_indices(n)] += math.pi * (k * k - 1.0) / r + 4.0 * gamma * g * math.pi * r
        blocks.append(blk)

    return JMatrix(
        pattern=p,
        gamma=gamma,
        K=K,
        const_block=const,
        k_blocks=tuple(blocks),
        weights=2.0 * math.pi * r,
    )


@dataclass(frozen=True)
class StabilityReport:
    gamma: float
    K: int
    min_eig: float
    mode_circle: int  # 1-based circle carrying the largest component
    mode_k: int
    mode_parity: str
    single_mode_values: tuple  # certificate per wavenumber 1..CERT_MODES, or ()
    axisym_pm_value: float | None
    verdict: str

    def to_json(self) -> dict:
        return {
            "gamma": self.gamma,
            "K": self.K,
            "min_eig": self.min_eig,
            "mode": {"circle": self.mode_circle, "k": self.mode_k, "parity": self.mode_parity},
            "certificates": {
                "single_mode": list(self.single_mode_values),
                "axisym_pm": self.axisym_pm_value,
            },
            "verdict": self.verdict,
        }


def _is_symmetric(p: AxisymPattern) -> bool:
    return all(abs(x + y) <= 1e-9 for x, y in zip(p.z, reversed(p.z)))


def min_eig_constrained(J: JMatrix) -> StabilityReport:
    """Smallest eigenvalue over zero-mean perturbations, with certificates.

    The constants block is restricted to the hyperplane w . c = 0 by an
    orthonormal complement of w; oscillatory blocks need no constraint.
    Degenerate cos/sin pairs are reported with the cos tag.
    """
    p = J.pattern
    n = p.n
    best = math.inf
    best_mode = (1, 1, "cos")
    if n >= 2:
        q_full, _ = np.linalg.qr(J.weights.reshape(n, 1), mode="complete")
        Q = q_full[:, 1:]
        vals, vecs = np.linalg.eigh(Q.T @ J.const_block @ Q)
        if vals[0] < best:
            best = float(vals[0])
            v = Q @ vecs[:, 0]
            best_mode = (int(np.argmax(np.abs(v))) + 1, 0, "constant")
    for k in range(1, J.K + 1):
        vals, vecs = np.linalg.eigh(J.k_blocks[k - 1])
        if vals[0] < best:
            best = float(vals[0])
            best_mode = (int(np.argmax(np.abs(vecs[:, 0]))) + 1, k, "cos")

    single: tuple = ()
    pm = None
    if _is_symmetric(p) and abs(p.m) <= 1e-12 and p.z[-1] > 0.0:
        single = tuple(single_mode_J(p.z[-1], J.gamma, k) for k in range(1, CERT_MODES + 1))
        if n >= 2:
            pm = axisym_pm_bound(p.z[-1], J.gamma)

    certified = best < -1e-9 or any(v < 0.0 for v in single) or (pm is not None and pm < 0.0)
    return StabilityReport(
        gamma=J.gamma,
        K=J.K,
        min_eig=best,
        mode_circle=best_mode[0],
        mode_k=best_mode[1],
        mode_parity=best_mode[2],
        single_mode_values=single,
        axisym_pm_value=pm,
        verdict="certified-unstable" if certified else "no-certificate",
    )


def stability_report(p: AxisymPattern, gamma: float, K: int = 32) -> StabilityReport:
    return min_eig_constrained(assemble_J(p, gamma, K))
