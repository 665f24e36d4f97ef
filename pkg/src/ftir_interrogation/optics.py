"""Closed-form evanescent optics and the reflect/tunnel amplitude split.

Lengths are in nanometers and angles in radians throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .errors import DomainError, SingularityError

NORMALIZATION_TOL = 1e-12


class TunnelingIndex(str, Enum):
    """Which refractive index sets the decay length across the gap."""

    OBJECT = "object"
    GAP = "gap"


@dataclass(frozen=True)
class OpticalStack:
    n_incident: float
    n_gap: float
    n_object: float
    theta_incidence: float
    wavelength_incident: float
    gap_distance: float

    def __post_init__(self):
        if not self.n_gap > 0:
            raise DomainError(f"n_gap must be positive, got {self.n_gap}")
        if not self.n_incident > self.n_gap:
            raise DomainError(
                f"total internal reflection needs n_incident > n_gap "
                f"({self.n_incident} <= {self.n_gap})"
            )
        if not 0 < self.theta_incidence <= math.pi / 2:
            raise DomainError(f"theta_incidence must lie in (0, pi/2], got {self.theta_incidence}")
        if not self.wavelength_incident > 0:
            raise DomainError(f"wavelength_incident must be positive, got {self.wavelength_incident}")
        if not self.gap_distance >= 0:
            raise DomainError(f"gap_distance must be >= 0, got {self.gap_distance}")
        if not self.n_object > 0:
            raise DomainError(f"n_object must be positive, got {self.n_object}")
        if self.n_object == self.n_gap:
            raise DomainError("n_object must differ from n_gap, otherwise nothing frustrates the reflection")

    def with_gap(self, gap_distance: float) -> "OpticalStack":
        return replace(self, gap_distance=gap_distance)

    def with_angle(self, theta_incidence: float) -> "OpticalStack":
        return replace(self, theta_incidence=theta_incidence)

    def outer_index(self, tunneling_index: TunnelingIndex | str = TunnelingIndex.GAP) -> float:
        if TunnelingIndex(tunneling_index) is TunnelingIndex.OBJECT:
            return self.n_object
        return self.n_gap


@dataclass(frozen=True)
class SplitAmplitudes:
    a_reflect: float
    b_tunnel: float

    def __post_init__(self):
        if not 0.0 <= self.b_tunnel <= 1.0:
            raise DomainError(f"b_tunnel must lie in [0, 1], got {self.b_tunnel}")
        if self.a_reflect < 0.0:
            raise DomainError(f"a_reflect must be nonnegative, got {self.a_reflect}")
        norm = self.a_reflect**2 + self.b_tunnel**2
        if abs(norm - 1.0) > NORMALIZATION_TOL:
            raise DomainError(f"a^2 + b^2 = {norm!r}, expected 1")

    @classmethod
    def from_tunnel_probability(cls, p_tunnel: float) -> "SplitAmplitudes":
        if not 0.0 <= p_tunnel <= 1.0:
            raise DomainError(f"tunnel probability must lie in [0, 1], got {p_tunnel}")
        return cls(a_reflect=math.sqrt(1.0 - p_tunnel), b_tunnel=math.sqrt(p_tunnel))

    @classmethod
    def from_damage_ratio(cls, damage_ratio: float) -> "SplitAmplitudes":
        """Split whose reflect/tunnel probability ratio equals ``damage_ratio``."""
        if not damage_ratio > 0:
            raise DomainError(f"damage_ratio must be positive, got {damage_ratio}")
        return cls.from_tunnel_probability(1.0 / (1.0 + damage_ratio))

    @property
    def p_reflect(self) -> float:
        return self.a_reflect**2

    @property
    def p_tunnel(self) -> float:
        return self.b_tunnel**2


def critical_angle(n_incident: float, n_gap: float) -> float:
    if n_incident <= 0 or n_gap <= 0:
        raise DomainError("refractive indices must be positive")
    if n_gap >= n_incident:
        raise DomainError(f"no total internal reflection for n_gap={n_gap} >= n_incident={n_incident}")
    return math.asin(n_gap / n_incident)


def vacuum_to_medium_wavelength(wavelength_vacuum: float, n_medium: float) -> float:
    """Wavelength inside a medium of index ``n_medium``. Never applied implicitly."""
    if wavelength_vacuum <= 0 or n_medium <= 0:
        raise DomainError("wavelength and index must be positive")
    return wavelength_vacuum / n_medium


def _check_depth_args(n_incident, n_outer, theta):
    if n_incident <= 0 or n_outer <= 0:
        raise DomainError("refractive indices must be positive")
    if n_outer >= n_incident:
        raise SingularityError(
            f"outer index {n_outer} >= incident index {n_incident}: the field does not decay"
        )
    theta_c = math.asin(n_outer / n_incident)
    if theta <= theta_c:
        raise SingularityError(
            f"theta_incidence={theta!r} is not above the critical angle {theta_c!r}"
        )


def penetration_depth_raw(n_incident: float, n_outer: float, theta: float, wavelength: float) -> float:
    """lambda / (2 pi sqrt(n_i^2 sin^2 theta - n_outer^2))."""
    _check_depth_args(n_incident, n_outer, theta)
    projected = n_incident * math.sin(theta)
    arg = (projected - n_outer) * (projected + n_outer)
    if arg <= 0.0:
        raise SingularityError("penetration depth diverges: denominator is not positive")
    return wavelength / (2.0 * math.pi * math.sqrt(arg))


def penetration_depth_angular(n_incident: float, n_outer: float, theta: float, wavelength: float) -> float:
    """Same decay length written through the critical angle.

    Evaluated as sin^2 theta - sin^2 theta_c = sin(theta - theta_c) sin(theta + theta_c)
    so that the difference keeps full relative precision right above the critical angle.
    """
    _check_depth_args(n_incident, n_outer, theta)
    theta_c = math.asin(n_outer / n_incident)
    diff = math.sin(theta - theta_c) * math.sin(theta + theta_c)
    if diff <= 0.0:
        raise SingularityError("penetration depth diverges: denominator is not positive")
    return wavelength / (2.0 * math.pi * n_incident * math.sqrt(diff))


def penetration_depth(stack: OpticalStack, n_outer: float | None = None) -> float:
    """1/e decay length of the evanescent field behind the reflecting face.

    ``n_outer`` defaults to the gap index. Raises :class:`SingularityError` when the
    incidence angle does not exceed the critical angle for ``n_outer``.
    """
    if n_outer is None:
        n_outer = stack.n_gap
    return penetration_depth_raw(stack.n_incident, n_outer, stack.theta_incidence, stack.wavelength_incident)


def evanescent_amplitude(depth_y: float, xi: float) -> float:
    if depth_y < 0:
        raise DomainError(f"depth must be nonnegative, got {depth_y}")
    if not xi > 0:
        raise DomainError(f"penetration depth must be positive, got {xi}")
    return math.exp(-depth_y / xi)


def tunneling_depth(stack: OpticalStack, tunneling_index: TunnelingIndex | str = TunnelingIndex.GAP) -> float:
    return penetration_depth(stack, stack.outer_index(tunneling_index))


def split_amplitudes(stack: OpticalStack, tunneling_index: TunnelingIndex | str = TunnelingIndex.GAP) -> SplitAmplitudes:
    xi = tunneling_depth(stack, tunneling_index)
    b = math.exp(-stack.gap_distance / xi)
    # 1 - b^2 via expm1 keeps a accurate when the gap is tiny
    a = math.sqrt(-math.expm1(-2.0 * stack.gap_distance / xi))
    return SplitAmplitudes(a_reflect=a, b_tunnel=b)


def gap_for_damage_ratio(
    stack: OpticalStack,
    damage_ratio: float,
    tunneling_index: TunnelingIndex | str = TunnelingIndex.GAP,
) -> float:
    """Gap distance at which reflect/tunnel probabilities stand in ``damage_ratio``.

    Solves exp(-2 d / xi) = 1 / (1 + ratio), i.e. d = xi * ln(sqrt(1 + ratio)).
    """
    if not damage_ratio > 0:
        raise DomainError(f"damage_ratio must be positive, got {damage_ratio}")
    xi = tunneling_depth(stack, tunneling_index)
    return 0.5 * xi * math.log1p(damage_ratio)


def detection_probabilities(split: SplitAmplitudes) -> tuple[float, float]:
    """Return ``(p_absorb, p_damage_free)``."""
    return split.p_tunnel, split.p_reflect


def penetration_depth_grid(n_incident: float, n_outer: float, thetas, wavelength: float) -> np.ndarray:
    """Vectorized decay length over an array of incidence angles."""
    thetas = np.asarray(thetas, dtype=float)
    theta_c = critical_angle(n_incident, n_outer)
    if np.any(thetas <= theta_c):
        raise SingularityError("every angle in the grid must exceed the critical angle")
    projected = n_incident * np.sin(thetas)
    arg = (projected - n_outer) * (projected + n_outer)
    return wavelength / (2.0 * np.pi * np.sqrt(arg))
