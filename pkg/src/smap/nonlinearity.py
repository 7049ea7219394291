"""Right-hand sides of both formulations of the flow.

Chart side: the derivative Schrodinger nonlinearity
2*conj(u)/(1+|u|^2) * sum_j (du/dx_j)^2, with the rational prefactor
computed by direct pointwise division (exact and unconditionally stable).
Sphere side: the cross-product term s x Laplacian(s).

Every physical-space product or composition is followed by the configured
dealiasing rule; the 2/3 rule is standard pseudospectral practice for
non-polynomial nonlinearities.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .geometry import SphereField
from .grid import GridSpec
from .spectral import (
    PHYSICAL,
    ComplexField,
    gradient,
    laplacian_values,
    samples_of,
    spectrum_of,
    to_physical,
)


@dataclass(frozen=True)
class DealiasPolicy:
    """Spectral truncation applied after pointwise products; rule in {two_thirds, none}."""

    rule: str = "two_thirds"

    def __post_init__(self):
        if self.rule not in ("two_thirds", "none"):
            raise ValueError(f"unknown dealias rule {self.rule!r}")

    def mask(self, grid: GridSpec) -> np.ndarray:
        return _dealias_mask(grid.d, grid.n, grid.period, self.rule)

    def apply_values(self, values: np.ndarray, grid: GridSpec) -> np.ndarray:
        if self.rule == "none":
            return values
        spec = spectrum_of(values)
        spec *= self.mask(grid)
        return samples_of(spec)

    def apply(self, u: ComplexField) -> ComplexField:
        if self.rule == "none":
            return u
        u = to_physical(u)
        return ComplexField(u.grid, u.time, PHYSICAL, self.apply_values(u.values, u.grid))


TWO_THIRDS = DealiasPolicy("two_thirds")
NO_DEALIAS = DealiasPolicy("none")


@lru_cache(maxsize=64)
def _dealias_mask(d: int, n: int, period: float, rule: str) -> np.ndarray:
    grid = GridSpec(d, n, period)
    cutoff = (2.0 / 3.0) * grid.nyquist
    mask = np.ones(grid.shape)
    for axis in range(d):
        mask *= np.abs(grid.wavenumber_component(axis)) < cutoff
    mask.flags.writeable = False
    return mask


def n_zero(u: ComplexField, policy: DealiasPolicy = TWO_THIRDS) -> ComplexField:
    """Rational prefactor 2*conj(u)/(1+|u|^2); denominator >= 1, so total."""
    u = to_physical(u)
    vals = 2.0 * np.conj(u.values) / (1.0 + np.abs(u.values) ** 2)
    return ComplexField(u.grid, u.time, PHYSICAL, policy.apply_values(vals, u.grid))


def nonlinearity(u: ComplexField, policy: DealiasPolicy = TWO_THIRDS) -> ComplexField:
    """Spatial part of the derivative nonlinearity: n_zero(u) * sum_j (d_j u)^2."""
    u = to_physical(u)
    grad_sq = np.zeros(u.grid.shape, dtype=np.complex128)
    for axis in range(1, u.grid.d + 1):
        grad_sq += to_physical(gradient(u, axis)).values ** 2
    grad_sq = policy.apply_values(grad_sq, u.grid)
    prod = n_zero(u, policy).values * grad_sq
    return ComplexField(u.grid, u.time, PHYSICAL, policy.apply_values(prod, u.grid))


def cross_rhs(s: SphereField) -> np.ndarray:
    """Sphere-form right-hand side s x Laplacian(s) as a raw (3, *grid) array.

    The Laplacian is spectral (multiplier -|xi|^2) for consistency with the
    chart-side computation; tangency s . (s x Lap s) = 0 holds pointwise by
    the triple-product identity, up to rounding.
    """
    lap = laplacian_values(s.values, s.grid)
    return np.cross(s.values, lap, axis=0)
