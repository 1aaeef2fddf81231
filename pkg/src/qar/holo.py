"""Truncated holomorphic states on the Bargmann space.

A bosonic state is a polynomial in the phase-space variables z_i, stored
as a sparse map from occupation multi-indices to the coefficients of the
*normalized* monomials z^n / sqrt(n!).  In that basis the Gaussian-measure
inner product reduces to the plain Hermitian dot product, and the ladder
operators act coefficient-wise:

    z_i       (create):      c'[n + e_i] = sqrt(n_i + 1) * c[n]
    d/dz_i    (annihilate):  c'[n - e_i] = sqrt(n_i)     * c[n]

Every mode carries a hard cutoff.  Weight pushed past the cutoff by z_i is
dropped, and the dropped squared weight accumulates on the result state so
that truncation loss stays observable to callers.

Multi-indices are plain tuples of non-negative ints; Bargmann points are
plain sequences of complex coordinates, one per mode.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

# Stored amplitudes below this magnitude are dropped; keeps the maps sparse
# without touching anything at the 1e-10 assertion level.
PRUNE_THRESHOLD = 1e-15

# Coherent/cat constructors refuse cutoffs whose truncation tail exceeds this.
TAIL_TOLERANCE = 1e-10

_sqrt_fact = np.array([1.0])


def sqrt_factorial(n):
    """sqrt(n!), from a cumulative-product cache grown on demand.

    Exact to double rounding for the desk-scale cutoffs used here (n <= ~300
    before sqrt(n!) overflows a double).
    """
    global _sqrt_fact
    if n >= _sqrt_fact.size:
        ext = np.sqrt(np.arange(_sqrt_fact.size, n + 1, dtype=float))
        _sqrt_fact = np.concatenate([_sqrt_fact, _sqrt_fact[-1] * np.cumprod(ext)])
    return _sqrt_fact[int(n)]


def _as_cutoff(cutoff):
    if isinstance(cutoff, (int, np.integer)):
        cutoff = (int(cutoff),)
    cutoff = tuple(int(c) for c in cutoff)
    if any(c < 0 for c in cutoff):
        raise ValueError(f"cutoff components must be >= 0, got {cutoff}")
    return cutoff


def _as_point(p, mode_count):
    if np.isscalar(p):
        p = (p,)
    coords = tuple(complex(c) for c in p)
    if len(coords) != mode_count:
        raise ValueError(f"point has {len(coords)} coords, state has {mode_count} modes")
    return coords


@dataclass
class HoloState:
    """Sparse state over normalized monomials z^n/sqrt(n!).

    ``cutoff`` is the per-mode maximum exponent.  ``lost_weight`` is the
    squared norm discarded by cutoff truncation in the operations that
    produced this state (0 for freshly constructed states).  Treat
    instances as immutable; all operations return new states.
    """

    cutoff: tuple[int, ...]
    coeffs: dict[tuple[int, ...], complex] = field(default_factory=dict)
    lost_weight: float = 0.0

    def __post_init__(self):
        self.cutoff = _as_cutoff(self.cutoff)
        clean = {}
        for idx, amp in self.coeffs.items():
            idx = tuple(int(i) for i in (idx if isinstance(idx, tuple) else (idx,)))
            if len(idx) != len(self.cutoff):
                raise ValueError(f"index {idx} does not match mode count {self.mode_count}")
            if any(i < 0 for i in idx):
                raise ValueError(f"negative occupation in index {idx}")
            if any(i > c for i, c in zip(idx, self.cutoff)):
                raise ValueError(f"index {idx} exceeds cutoff {self.cutoff}")
            amp = complex(amp)
            if abs(amp) >= PRUNE_THRESHOLD:
                clean[idx] = amp
        self.coeffs = clean

    @property
    def mode_count(self):
        return len(self.cutoff)

    def norm_sq(self):
        return float(sum(abs(a) ** 2 for a in self.coeffs.values()))

    def norm(self):
        return math.sqrt(self.norm_sq())

    def normalized(self):
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero state")
        return HoloState(self.cutoff, {k: v / n for k, v in self.coeffs.items()},
                         self.lost_weight)

    def __add__(self, other):
        if not isinstance(other, HoloState):
            return NotImplemented
        if other.cutoff != self.cutoff:
            raise ValueError("cutoff mismatch in state addition")
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0.0) + v
        return HoloState(self.cutoff, out, self.lost_weight + other.lost_weight)

    def __sub__(self, other):
        return self + (-1.0) * other

    def __rmul__(self, scalar):
        scalar = complex(scalar)
        return HoloState(self.cutoff, {k: scalar * v for k, v in self.coeffs.items()},
                         abs(scalar) ** 2 * self.lost_weight)


def monomial_state(index, cutoff):
    """Basis state z^n/sqrt(n!) for the multi-index ``index``."""
    cutoff = _as_cutoff(cutoff)
    if isinstance(index, (int, np.integer)):
        index = (int(index),)
    index = tuple(int(i) for i in index)
    if len(index) != len(cutoff):
        raise ValueError(f"index {index} does not match cutoff {cutoff}")
    if any(i < 0 for i in index):
        raise ValueError(f"negative occupation in {index}")
    if any(i > c for i, c in zip(index, cutoff)):
        raise ValueError(f"index {index} out of range for cutoff {cutoff}")
    return HoloState(cutoff, {index: 1.0})


def inner_product(f, g):
    """Gaussian-measure inner product <f|g>, conjugate-linear in f.

    Equals sum_n conj(f_n) g_n in the normalized-monomial convention.
    """
    if f.mode_count != g.mode_count:
        raise ValueError("mode count mismatch in inner product")
    a, b = (f.coeffs, g.coeffs) if len(f.coeffs) <= len(g.coeffs) else (g.coeffs, f.coeffs)
    total = 0.0 + 0.0j
    if a is f.coeffs:
        for k, v in a.items():
            w = b.get(k)
            if w is not None:
                total += v.conjugate() * w
    else:
        for k, v in a.items():
            w = b.get(k)
            if w is not None:
                total += w.conjugate() * v
    return total


def evaluate(f, p):
    """Evaluate f at the Bargmann point p: sum_n c_n prod_i p_i^{n_i}/sqrt(n_i!)."""
    coords = _as_point(p, f.mode_count)
    total = 0.0 + 0.0j
    for idx, amp in f.coeffs.items():
        term = amp
        for c, n in zip(coords, idx):
            if n:
                term *= c ** n / sqrt_factorial(n)
        total += term
    return total


def apply_create(f, mode):
    """Multiply by z_mode.  Weight pushed past the cutoff is dropped and
    recorded in the result's ``lost_weight``."""
    if not 0 <= mode < f.mode_count:
        raise ValueError(f"mode {mode} out of range for {f.mode_count} modes")
    top = f.cutoff[mode]
    out = {}
    lost = f.lost_weight
    for idx, amp in f.coeffs.items():
        n = idx[mode]
        new_amp = math.sqrt(n + 1) * amp
        if n + 1 > top:
            lost += abs(new_amp) ** 2
            continue
        new_idx = idx[:mode] + (n + 1,) + idx[mode + 1:]
        out[new_idx] = out.get(new_idx, 0.0) + new_amp
    return HoloState(f.cutoff, out, lost)


def apply_annihilate(f, mode):
    """Differentiate with respect to z_mode; the vacuum component vanishes."""
    if not 0 <= mode < f.mode_count:
        raise ValueError(f"mode {mode} out of range for {f.mode_count} modes")
    out = {}
    for idx, amp in f.coeffs.items():
        n = idx[mode]
        if n == 0:
            continue
        new_idx = idx[:mode] + (n - 1,) + idx[mode + 1:]
        out[new_idx] = out.get(new_idx, 0.0) + math.sqrt(n) * amp
    return HoloState(f.cutoff, out, f.lost_weight)


def kernel(z, w):
    """Reproducing kernel K(z, w) = exp(sum_i z_i conj(w_i))."""
    z = tuple(complex(c) for c in ((z,) if np.isscalar(z) else z))
    w = tuple(complex(c) for c in ((w,) if np.isscalar(w) else w))
    if len(z) != len(w):
        raise ValueError("kernel arguments must have equal length")
    return cmath.exp(sum(a * b.conjugate() for a, b in zip(z, w)))


def kernel_state(w, cutoff):
    """K_w as a truncated state, coefficients conj(w)^n/sqrt(n!).

    Pairing it with f reproduces the evaluation: <K_w, f> = f(w) up to the
    kernel's own truncation tail.
    """
    cutoff = _as_cutoff(cutoff)
    w = _as_point(w, len(cutoff))
    coeffs = {}
    for idx in np.ndindex(*(c + 1 for c in cutoff)):
        amp = 1.0 + 0.0j
        for c, n in zip(w, idx):
            amp *= c.conjugate() ** n / sqrt_factorial(n)
        coeffs[tuple(idx)] = amp
    return HoloState(cutoff, coeffs)


def coherent_tail(alpha, cutoff):
    """Squared weight of the coherent state |alpha> beyond the cutoff."""
    a2 = abs(alpha) ** 2
    partial = 0.0
    term = 1.0
    for n in range(int(cutoff) + 1):
        partial += term
        term *= a2 / (n + 1)
    return max(0.0, 1.0 - math.exp(-a2) * partial)


def coherent_state(alpha, cutoff):
    """Coherent state e^{-|a|^2/2} sum_n a^n/sqrt(n!) |n>, single mode.

    Raises if the truncation tail at ``cutoff`` exceeds 1e-10.
    """
    cutoff = _as_cutoff(cutoff)
    if len(cutoff) != 1:
        raise ValueError("coherent_state builds single-mode states")
    alpha = complex(alpha)
    tail = coherent_tail(alpha, cutoff[0])
    if tail >= TAIL_TOLERANCE:
        raise ValueError(
            f"cutoff {cutoff[0]} insufficient for |alpha|={abs(alpha):.3g}: "
            f"tail weight {tail:.3e} >= {TAIL_TOLERANCE:.0e}")
    pre = math.exp(-abs(alpha) ** 2 / 2.0)
    coeffs = {}
    amp = pre + 0.0j
    for n in range(cutoff[0] + 1):
        coeffs[(n,)] = amp
        amp *= alpha / math.sqrt(n + 1)
    return HoloState(cutoff, coeffs)


def cat_state(alpha, parity, cutoff):
    """Superposition |alpha> +/- |-alpha> (unnormalized, matching the usual
    cat-state convention).  'even' keeps only even occupations, 'odd' only odd.
    """
    if parity not in ("even", "odd"):
        raise ValueError("parity must be 'even' or 'odd'")
    plus = coherent_state(alpha, cutoff)
    minus = coherent_state(-complex(alpha), cutoff)
    return plus + minus if parity == "even" else plus - minus


def cat_closed_form(alpha, z, parity):
    """Closed-form cat-state evaluation:

        even: 2 e^{-|a|^2/2} cosh(a z)
        odd:  2 e^{-|a|^2/2} sinh(a z)

    Cross-validated at every call against the modified-Bessel form
    sqrt(2 pi a z) e^{-|a|^2/2} I_{-1/2 or +1/2}(a z); the two agree
    identically (the half-order Bessel functions are the hyperbolics).
    """
    if parity not in ("even", "odd"):
        raise ValueError("parity must be 'even' or 'odd'")
    alpha = complex(alpha)
    z = complex(z)
    pre = math.exp(-abs(alpha) ** 2 / 2.0)
    x = alpha * z
    hyper = 2.0 * pre * (cmath.cosh(x) if parity == "even" else cmath.sinh(x))
    if abs(x) > 1e-12:
        order = -0.5 if parity == "even" else 0.5
        bessel = np.sqrt(2.0 * np.pi * np.complex128(x)) * special.iv(order, np.complex128(x)) * pre
        assert abs(bessel - hyper) <= 1e-9 * max(1.0, abs(hyper)), \
            f"Bessel form {bessel} disagrees with hyperbolic form {hyper}"
    return hyper
