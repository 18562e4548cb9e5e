"""Axisymmetric two-phase patterns on the unit sphere.

A pattern is a unit-sphere function taking values +-1 that depends only on
the height z = cos(polar angle).  It is stored as the strictly increasing
tuple of interface heights z_1 < ... < z_n in (-1, 1); the sign convention
is fixed: the value is -1 on the first (southern) band, so the band
[z_k, z_{k+1}) carries the sign (-1)^(k+1) with sentinels z_0 = -1 and
z_{n+1} = +1.

The antiderivative profile xi (the running integral of the pattern minus
its mean) is the workhorse for both the long-range energy and the surface
potential: it is piecewise linear, vanishes at both poles, and has slope
(-1)^(k+1) - m on the k-th band.
"""

from __future__ import annotations

import json
import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import (
    IndexOutOfRange,
    MassMismatch,
    NonIncreasing,
    NonPositive,
    OutOfRange,
)

__all__ = [
    "AxisymPattern",
    "XiProfile",
    "make_pattern",
    "mass_of_interfaces",
    "kappa_g",
    "xi_profile",
    "xi_eval",
    "reflect",
    "negate",
    "radius_to_gamma",
    "pattern_to_json",
    "pattern_from_json",
]

# Mass recomputation after a rigid pair move stays within this bound.
MASS_CLOSURE_TOL = 1e-13


@dataclass(frozen=True)
class AxisymPattern:
    """Interface heights plus the mean value they induce.

    ``z`` is strictly increasing inside (-1, 1); ``m`` is the mean of the
    pattern over the sphere, determined by ``z`` (stored to let moves carry
    it bit-exactly).
    """

    z: tuple[float, ...]
    m: float

    @property
    def n(self) -> int:
        return len(self.z)

    def nodes(self) -> tuple[float, ...]:
        """Interface heights with the pole sentinels attached."""
        return (-1.0, *self.z, 1.0)

    def region_sign(self, j: int) -> int:
        """Sign of the pattern on the band [z_j, z_{j+1}), j = 0..n."""
        if not 0 <= j <= self.n:
            raise IndexOutOfRange(f"band index {j} outside 0..{self.n}")
        return -1 if j % 2 == 0 else 1

    def radius(self, k: int) -> float:
        """Circle radius sqrt(1 - z_k^2) of the k-th interface (1-based)."""
        zk = self.z[_check_interface_index(self, k) - 1]
        return math.sqrt(1.0 - zk * zk)

    def min_gap(self) -> float:
        """Smallest spacing among interfaces and to the poles."""
        nodes = self.nodes()
        return min(b - a for a, b in zip(nodes, nodes[1:]))


@dataclass(frozen=True)
class XiProfile:
    """Piecewise-linear antiderivative of (pattern - mean).

    ``nodes[k]`` is xi(z_k) for k = 0..n+1 with the pole values pinned to
    exactly 0.0; ``slopes[j]`` is the slope on band j.
    """

    nodes: tuple[float, ...]
    slopes: tuple[float, ...]


def _check_interface_index(p: AxisymPattern, k: int) -> int:
    if not 1 <= k <= p.n:
        raise IndexOutOfRange(f"interface index {k} outside 1..{p.n}")
    return k


def mass_of_interfaces(zs: Sequence[float]) -> float:
    """Mean value (1/2) sum_k (-1)^k (z_k - z_{k-1}) over the full sphere.

    Single interface at z_1 gives -z_1: the pattern is -1 below z_1, so a
    high interface leaves mostly negative phase.
    """
    nodes = (-1.0, *zs, 1.0)
    total = 0.0
    for k in range(1, len(nodes)):
        diff = nodes[k] - nodes[k - 1]
        total += -diff if k % 2 == 1 else diff
    return 0.5 * total


def make_pattern(zs: Iterable[float], expect_mass: float | None = None) -> AxisymPattern:
    """Validate interface heights and build a pattern.

    Heights must lie strictly inside (-1, 1) and be strictly increasing;
    equal neighbours are a boundary state handled by the minimizer module,
    not a valid pattern here.  ``expect_mass`` cross-checks the induced
    mean to 1e-12.
    """
    z = tuple(float(v) for v in zs)
    if not z:
        raise OutOfRange("need at least one interface")
    for v in z:
        if not -1.0 < v < 1.0:
            raise OutOfRange(f"interface height {v!r} outside (-1, 1)")
    for a, b in zip(z, z[1:]):
        if not a < b:
            raise NonIncreasing(f"heights not strictly increasing near {a!r}")
    m = mass_of_interfaces(z)
    if expect_mass is not None and abs(m - expect_mass) > 1e-12:
        raise MassMismatch(f"mean {m!r} differs from expected {expect_mass!r}")
    return AxisymPattern(z=z, m=m)


def kappa_g(p: AxisymPattern, k: int) -> float:
    """Signed geodesic curvature of the k-th interface circle (1-based).

    The sign follows the phase just above the interface: the curvature is
    u(z_k+) * z_k / sqrt(1 - z_k^2), so a double cap {-1/2, 1/2} carries
    -1/sqrt(3) at both circles.
    """
    k = _check_interface_index(p, k)
    zk = p.z[k - 1]
    sign = 1.0 if k % 2 == 1 else -1.0  # u just above z_k is (-1)^(k+1)
    return sign * zk / math.sqrt(1.0 - zk * zk)


def xi_profile(p: AxisymPattern) -> XiProfile:
    """Node values and slopes of xi; both pole values are exactly zero.

    The recursion closes at the north pole up to rounding (the slopes sum
    against the band widths to twice the mean minus itself); the stored
    endpoint is pinned to 0.0 so downstream closed forms can drop the
    divergent pole logarithms analytically.
    """
    nodes_z = p.nodes()
    slopes = tuple(p.region_sign(j) - p.m for j in range(p.n + 1))
    nodes = [0.0]
    for j in range(p.n):
        nodes.append(nodes[-1] + slopes[j] * (nodes_z[j + 1] - nodes_z[j]))
    nodes.append(0.0)
    return XiProfile(nodes=tuple(nodes), slopes=slopes)


def xi_eval(p: AxisymPattern, z: float) -> float:
    """Evaluate xi at height z in [-1, 1]."""
    if not -1.0 <= z <= 1.0:
        raise OutOfRange(f"height {z!r} outside [-1, 1]")
    if z == -1.0 or z == 1.0:
        return 0.0
    prof = xi_profile(p)
    nodes_z = p.nodes()
    j = bisect_right(nodes_z, z) - 1  # band containing z
    j = min(j, p.n)
    return prof.nodes[j] + prof.slopes[j] * (z - nodes_z[j])


def reflect(p: AxisymPattern) -> AxisymPattern:
    """Mirror the pattern through the equator: z_k -> -z_{n+1-k}.

    For an odd interface count the stored mean flips sign (the south-pole
    sign convention forces renormalization); for an even count it is kept.
    Energy is invariant either way.
    """
    return make_pattern(tuple(-v for v in reversed(p.z)))


def negate(p: AxisymPattern) -> AxisymPattern:
    """Representative of the complementary (sign-flipped) pattern.

    The convention pins the south pole to the -1 phase, so the pointwise
    complement is representable only after composing with the equatorial
    reflection, which is a rigid motion of the sphere: for odd n the result
    is exactly the complement rotated pole-to-pole (mean -m); for even n
    the complement touches both poles with the +1 phase and leaves the
    representable class entirely, so the reflected pattern stands in as its
    energy-equal representative.
    """
    return reflect(p)


def radius_to_gamma(radius: float) -> float:
    """Coupling on the unit sphere equivalent to working on radius R: R**3."""
    if not radius > 0.0:
        raise NonPositive(f"sphere radius must be positive, got {radius!r}")
    return radius**3


def pattern_to_json(p: AxisymPattern) -> str:
    """Serialize as {"z": [...], "m": ...}; floats round-trip bit-exactly."""
    return json.dumps({"z": list(p.z), "m": p.m})


def pattern_from_json(text: str) -> AxisymPattern:
    data = json.loads(text)
    p = make_pattern(data["z"])
    if "m" in data and abs(p.m - data["m"]) > 1e-12:
        raise MassMismatch(f"stored mean {data['m']!r} inconsistent with interfaces")
    return p
