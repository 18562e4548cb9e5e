"""Sharp-interface energy of an axisymmetric pattern.

Two ingredients: the interface perimeter 2*pi*sum_k sqrt(1 - z_k^2), and a
long-range term gamma * 2*pi * integral of xi(z)^2 / (1 - z^2) over [-1, 1],
where xi is the pattern's antiderivative profile.  The integral has a
closed form: on each band the integrand is a shifted parabola over 1 - z^2,

    int_{z_j}^{z_{j+1}} (xi_j + s_j (z - z_j))^2 / (1 - z^2) dz
      = -s_j^2 (z_{j+1} - z_j)
        + (c1_j^2 / 2) * log((1 - z_j) / (1 - z_{j+1}))
        + (c2_j^2 / 2) * log((1 + z_{j+1}) / (1 + z_j))

with c1_j = xi_j + s_j (1 - z_j) and c2_j = xi_j - s_j (1 + z_j).  At the
poles one coefficient vanishes identically because xi(+-1) = 0, so the
divergent logarithm is dropped analytically rather than evaluated as 0*inf.

The quadrature route integrates the same band integrands adaptively after
cancelling the pole factor by hand; it exists purely as an independent
cross-check of the closed form and shares no log-term code with it.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import EmptyRange, OutOfRange
from .pattern import AxisymPattern, make_pattern, xi_profile
from .quadrature import QuadratureSpec, integrate_adaptive

__all__ = [
    "EnergyBreakdown",
    "SweepGrid",
    "QuadratureSpec",
    "perimeter",
    "nonlocal_closed",
    "nonlocal_quadrature",
    "total_energy",
    "two_interface_grid",
]

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class EnergyBreakdown:
    """Perimeter and long-range parts; total is always their sum.

    ``per_segment`` lists each band's contribution to the long-range term
    (they sum to ``nonlocal``).
    """

    perimeter: float
    nonlocal_: float
    total: float
    per_segment: tuple[float, ...]

    @property
    def total_over_pi(self) -> float:
        return self.total / math.pi


def perimeter(p: AxisymPattern) -> float:
    """Total interface length 2*pi*sum sqrt(1 - z_k^2)."""
    return TWO_PI * sum(math.sqrt(1.0 - v * v) for v in p.z)


def _band_segments(p: AxisymPattern):
    """Yield (j, z_left, z_right, slope, xi_left) for each band."""
    prof = xi_profile(p)
    nodes_z = p.nodes()
    for j in range(p.n + 1):
        yield j, nodes_z[j], nodes_z[j + 1], prof.slopes[j], prof.nodes[j]


def nonlocal_closed(p: AxisymPattern, gamma: float) -> tuple[float, tuple[float, ...]]:
    """Closed-form long-range energy and its per-band split.

    Returns (value, per_segment).  Band j contributes
    2*pi*gamma * [ -s_j^2 dz + c1^2/2 L1 + c2^2/2 L2 ] with the south-pole
    band dropping its c2 term and the north-pole band its c1 term (the
    coefficient is exactly zero there, the log infinite).
    """
    last = p.n
    per = []
    for j, za, zb, s, xa in _band_segments(p):
        acc = -s * s * (zb - za)
        if j != last:
            c1 = xa + s * (1.0 - za)
            acc += 0.5 * c1 * c1 * math.log((1.0 - za) / (1.0 - zb))
        if j != 0:
            c2 = xa - s * (1.0 + za)
            acc += 0.5 * c2 * c2 * math.log((1.0 + zb) / (1.0 + za))
        per.append(TWO_PI * gamma * acc)
    return sum(per), tuple(per)


def nonlocal_quadrature(
    p: AxisymPattern, gamma: float, spec: QuadratureSpec = QuadratureSpec()
) -> float:
    """Long-range energy by adaptive panel quadrature (oracle route).

    Pole bands use the reduced integrands s^2 (1+z)/(1-z) and
    s^2 (1-z)/(1+z): xi vanishes linearly there and cancels one factor of
    the denominator, so every band integrand is smooth on its closure.
    """
    if gamma == 0.0:
        return 0.0
    last = p.n
    total = 0.0
    for j, za, zb, s, xa in _band_segments(p):
        if j == 0:

            def f(z, s=s):
                return s * s * (1.0 + z) / (1.0 - z)

        elif j == last:

            def f(z, s=s):
                return s * s * (1.0 - z) / (1.0 + z)

        else:

            def f(z, s=s, xa=xa, za=za):
                xi = xa + s * (z - za)
                return xi * xi / (1.0 - z * z)

        total += integrate_adaptive(f, za, zb, spec)
    return TWO_PI * gamma * total


def total_energy(p: AxisymPattern, gamma: float) -> EnergyBreakdown:
    """Perimeter plus closed-form long-range energy."""
    peri = perimeter(p)
    nl, per = nonlocal_closed(p, gamma)
    return EnergyBreakdown(perimeter=peri, nonlocal_=nl, total=peri + nl, per_segment=per)


# ------------------------------------------------------------------ sweeps


@dataclass(frozen=True)
class SweepGrid:
    """Energy-over-pi surface for the two-interface family z_2 = z_1 + 1."""

    z1: tuple[float, ...]
    gamma: tuple[float, ...]
    energy_over_pi: tuple[tuple[float, ...], ...]  # row per z1 value

    def to_csv(self, fh: io.TextIOBase) -> None:
        """Rows ordered z1-major; floats printed with repr precision."""
        fh.write("z1,gamma,energy_over_pi\n")
        for i, z1 in enumerate(self.z1):
            for j, g in enumerate(self.gamma):
                fh.write(f"{z1!r},{g!r},{self.energy_over_pi[i][j]!r}\n")


def _two_interface_pattern(z1: float) -> AxisymPattern:
    # z1 = 0 closes the upper band onto the pole: the limit is the single
    # cap with its interface on the equator, energy-continuous.
    if z1 == 0.0:
        return make_pattern([0.0])
    return make_pattern([z1, z1 + 1.0])


def two_interface_grid(
    z1_values: Sequence[float], gamma_values: Sequence[float]
) -> SweepGrid:
    """Zero-mean two-interface energies over a (z1, gamma) product grid."""
    z1s = tuple(float(v) for v in z1_values)
    gammas = tuple(float(g) for g in gamma_values)
    if not z1s or not gammas:
        raise EmptyRange("sweep needs at least one z1 and one gamma")
    for v in z1s:
        if not -1.0 < v <= 0.0:
            raise OutOfRange(f"two-interface sweep needs z1 in (-1, 0], got {v!r}")
    rows = []
    for v in z1s:
        pat = _two_interface_pattern(v)
        peri = perimeter(pat)
        nl_unit, _ = nonlocal_closed(pat, 1.0)  # linear in gamma
        rows.append(tuple((peri + g * nl_unit) / math.pi for g in gammas))
    return SweepGrid(z1=z1s, gamma=gammas, energy_over_pi=tuple(rows))
