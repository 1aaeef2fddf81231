"""Numerical transform between coordinate wavefunctions and holomorphic states.

Coordinate-side functions live on a uniform symmetric grid in the scaled
position x -> x sqrt(m omega / hbar), so the oscillator eigenfunctions are

    psi_n(x) = pi^{-1/4} / sqrt(2^n n!) e^{-x^2/2} H_n(x),

generated by the stable normalized three-term recurrence.  The transform

    (Af)(z) = integral exp[-s (z^2 - 2 sqrt(2) z x + x^2)] f(x) dx

maps psi_n onto the monomial z^n/sqrt(n!) times one z-independent constant
when the exponent scale is s = 1/2 (the default).  The overall constant is
never assumed: it is calibrated empirically from (A psi_0)(0).  The
unhalved variant s = 1 is kept behind ``exponent_scale`` for comparison;
it is not an isometry (it sends psi_0 to a Gaussian in z, not a constant).

The inverse/stable route to coefficients is the overlap quadrature
c_n = <psi_n, f>, which is what ``to_holo_state`` uses.

The Husimi-Kano distribution of a normalized state is taken as
Q(z) = |f(conj(z))|^2 e^{-|z|^2} / pi^d, which is nonnegative and
integrates to one; the (2 pi)^{-d} e^{-|z|^2/2} variant is available via
``paper_form=True`` but does not normalize under these conventions.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid

from .holo import HoloState, evaluate

DEFAULT_HALF_WIDTH = 12.0
DEFAULT_POINTS = 2048
EDGE_TOLERANCE = 1e-8


class GridWarning(UserWarning):
    """The sampled function does not decay at the grid edge."""


def default_grid(half_width=DEFAULT_HALF_WIDTH, points=DEFAULT_POINTS):
    return np.linspace(-half_width, half_width, int(points))


@dataclass
class SampledWavefunction:
    """Complex samples on a uniform grid symmetric about 0."""

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.values = np.asarray(self.values, dtype=complex)
        if self.grid.ndim != 1 or self.grid.size < 8:
            raise ValueError("grid must be a 1-d array with at least 8 points")
        if self.values.shape != self.grid.shape:
            raise ValueError("values and grid shapes differ")
        steps = np.diff(self.grid)
        if not np.allclose(steps, steps[0], rtol=1e-12, atol=0.0):
            raise ValueError("grid must be uniform")
        if abs(self.grid[0] + self.grid[-1]) > 1e-9 * max(abs(self.grid[-1]), 1.0):
            raise ValueError("grid must be symmetric about 0")
        peak = np.max(np.abs(self.values))
        if peak > 0:
            edge = max(abs(self.values[0]), abs(self.values[-1]))
            if edge > EDGE_TOLERANCE * peak:
                warnings.warn(
                    f"samples at the grid edge are {edge / peak:.2e} of the peak; "
                    "widen the grid", GridWarning, stacklevel=2)

    @property
    def spacing(self):
        return float(self.grid[1] - self.grid[0])

    @property
    def half_width(self):
        return float(self.grid[-1])

    def norm_sq(self):
        return float(trapezoid(np.abs(self.values) ** 2, self.grid))

    def __add__(self, other):
        if not isinstance(other, SampledWavefunction):
            return NotImplemented
        if not np.array_equal(other.grid, self.grid):
            raise ValueError("grids differ")
        return SampledWavefunction(self.grid, self.values + other.values)

    def __rmul__(self, scalar):
        return SampledWavefunction(self.grid, complex(scalar) * self.values)


def hermite_values(n, x):
    """Oscillator eigenfunction psi_n on an array, via the normalized
    recurrence (no factorials are formed):

        h_0 = pi^{-1/4} e^{-x^2/2}
        h_{k+1} = x sqrt(2/(k+1)) h_k - sqrt(k/(k+1)) h_{k-1}.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    x = np.asarray(x, dtype=float)
    h_prev = np.zeros_like(x)
    h = math.pi ** -0.25 * np.exp(-0.5 * x ** 2)
    for k in range(n):
        h, h_prev = x * math.sqrt(2.0 / (k + 1)) * h - math.sqrt(k / (k + 1.0)) * h_prev, h
    return h


def hermite_wavefunction(n, grid=None):
    """psi_n sampled on the grid; raises if the grid cannot hold it."""
    grid = default_grid() if grid is None else np.asarray(grid, dtype=float)
    values = hermite_values(n, grid)
    peak = np.max(np.abs(values))
    edge = max(abs(values[0]), abs(values[-1]))
    if peak == 0 or edge > EDGE_TOLERANCE * peak:
        raise ValueError(
            f"grid half-width {grid[-1]:.3g} too narrow for psi_{n} "
            f"(edge/peak = {edge / max(peak, 1e-300):.2e})")
    return SampledWavefunction(grid, values)


def overlap(f, g):
    """Trapezoid <f|g>, conjugate-linear in f."""
    if not np.array_equal(f.grid, g.grid):
        raise ValueError("grids differ")
    return complex(trapezoid(np.conj(f.values) * g.values, f.grid))


def segal_bargmann(f, z, exponent_scale=0.5):
    """Transform value (Af)(z) by direct quadrature of

        exp[-exponent_scale * (z^2 - 2 sqrt(2) z x + x^2)] f(x).

    No prefactor is applied; calibrate one constant from psi_0 when
    comparing against monomials (``transform_calibration``).
    """
    z = complex(z)
    x = f.grid
    kern = np.exp(-exponent_scale * (z * z - 2.0 * math.sqrt(2.0) * z * x + x * x))
    return complex(trapezoid(kern * f.values, x))


def transform_calibration(grid=None, exponent_scale=0.5):
    """The z-independent constant (A psi_0)(0) used to normalize transform
    values against holomorphic-state evaluations."""
    psi0 = hermite_wavefunction(0, grid)
    return segal_bargmann(psi0, 0.0, exponent_scale)


def to_holo_state(f, cutoff):
    """Holomorphic state of a sampled wavefunction via the stable overlap
    route c_n = <psi_n, f> (consistent with pointwise ``segal_bargmann``
    values after calibration)."""
    cutoff = int(cutoff)
    coeffs = {}
    for n in range(cutoff + 1):
        psi_n = hermite_values(n, f.grid)
        coeffs[(n,)] = complex(trapezoid(psi_n * f.values, f.grid))
    return HoloState((cutoff,), coeffs)


def husimi_q(state, z, paper_form=False):
    """Husimi-Kano Q of a normalized holomorphic state at the phase-space
    point(s) z (complex scalar or array per mode for multi-mode states).

    Q(z) = |f(conj(z))|^2 e^{-|z|^2} / pi^d  (defaults; integrates to 1).
    """
    norm = state.norm_sq()
    if abs(norm - 1.0) > 1e-8:
        raise ValueError(f"state must be normalized (|norm^2 - 1| = {abs(norm - 1):.2e})")
    pts = (z,) if np.isscalar(z) else tuple(z)
    if len(pts) != state.mode_count:
        raise ValueError("one phase-space coordinate per mode required")
    amp = evaluate(state, tuple(complex(p).conjugate() for p in pts))
    sq = sum(abs(complex(p)) ** 2 for p in pts)
    d = state.mode_count
    if paper_form:
        return float(abs(amp) ** 2 * math.exp(-0.5 * sq) / (2.0 * math.pi) ** d)
    return float(abs(amp) ** 2 * math.exp(-sq) / math.pi ** d)


def husimi_normalization(state, half_width=6.0, points=121):
    """2-d trapezoid of Q over the square |Re z|,|Im z| <= half_width
    (single-mode states); should be 1 up to quadrature error."""
    if state.mode_count != 1:
        raise ValueError("normalization quadrature implemented for one mode")
    axis = np.linspace(-half_width, half_width, int(points))
    q = np.empty((axis.size, axis.size))
    for i, re in enumerate(axis):
        for j, im in enumerate(axis):
            q[i, j] = husimi_q(state, complex(re, im))
    return float(trapezoid(trapezoid(q, axis, axis=1), axis))
