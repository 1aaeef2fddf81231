"""Finite Grassmann (exterior) algebra for two-level fermionic modes.

A basis word theta_{i1} theta_{i2} ... with i1 < i2 < ... is stored as a
bit mask over mode indices, so theta_j^2 = 0 is structural.  All signs
follow from one convention: words are kept in ascending canonical order
and derivatives are LEFT derivatives,

    d/dtheta_j (theta_{i1} ... theta_j ... ) =
        (-1)^{# generators before theta_j} (word with theta_j removed).

The Berezin integral over theta_j is the same operation as d/dtheta_j;
in particular the integral of a constant vanishes.

``MixedState`` attaches a bosonic HoloState to each fermionic word; it is
the state type acted on by mixed operator words (Jaynes-Cummings model).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .holo import PRUNE_THRESHOLD, HoloState, inner_product

FULL_MASK_LIMIT = 63  # bit masks live in a machine int


def sign_below(mask, mode):
    """(-1)^{number of set bits in mask strictly below mode}."""
    return -1.0 if bin(mask & ((1 << mode) - 1)).count("1") % 2 else 1.0


def multiply_words(a, b):
    """Exterior product of two canonical words.

    Returns (sign, mask) or None when a generator repeats.
    """
    if a & b:
        return None
    # count inversions: pairs (i in a, j in b) with i > j
    inversions = 0
    rest = a
    bb = b
    while bb:
        j = (bb & -bb).bit_length() - 1
        inversions += bin(rest >> (j + 1)).count("1")
        bb &= bb - 1
    return (-1.0 if inversions % 2 else 1.0, a | b)


@dataclass
class GrassmannElement:
    """Complex linear combination of canonical Grassmann words."""

    fermi_mode_count: int
    terms: dict[int, complex] = field(default_factory=dict)

    def __post_init__(self):
        if not 0 < self.fermi_mode_count <= FULL_MASK_LIMIT:
            raise ValueError(f"bad fermionic mode count {self.fermi_mode_count}")
        clean = {}
        limit = 1 << self.fermi_mode_count
        for mask, amp in self.terms.items():
            mask = int(mask)
            if not 0 <= mask < limit:
                raise ValueError(f"word {mask:#b} outside {self.fermi_mode_count} modes")
            amp = complex(amp)
            if abs(amp) >= PRUNE_THRESHOLD:
                clean[mask] = amp
        self.terms = clean

    def __add__(self, other):
        if not isinstance(other, GrassmannElement):
            return NotImplemented
        if other.fermi_mode_count != self.fermi_mode_count:
            raise ValueError("mode count mismatch")
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0.0) + v
        return GrassmannElement(self.fermi_mode_count, out)

    def __rmul__(self, scalar):
        scalar = complex(scalar)
        return GrassmannElement(self.fermi_mode_count,
                                {k: scalar * v for k, v in self.terms.items()})

    def norm_sq(self):
        return float(sum(abs(a) ** 2 for a in self.terms.values()))


def g_multiply(a, b):
    """Exterior product a * b with reordering signs; theta^2 = 0 kills terms."""
    if a.fermi_mode_count != b.fermi_mode_count:
        raise ValueError("mode count mismatch in Grassmann product")
    out = {}
    for ma, va in a.terms.items():
        for mb, vb in b.terms.items():
            prod = multiply_words(ma, mb)
            if prod is None:
                continue
            sign, mask = prod
            out[mask] = out.get(mask, 0.0) + sign * va * vb
    return GrassmannElement(a.fermi_mode_count, out)


def g_derivative(a, mode):
    """Left derivative d/dtheta_mode."""
    if not 0 <= mode < a.fermi_mode_count:
        raise ValueError(f"mode {mode} out of range")
    bit = 1 << mode
    out = {}
    for mask, amp in a.terms.items():
        if not mask & bit:
            continue
        out[mask & ~bit] = out.get(mask & ~bit, 0.0) + sign_below(mask, mode) * amp
    return GrassmannElement(a.fermi_mode_count, out)


def berezin_integrate(a, mode):
    """Berezin integral over theta_mode, identical to the left derivative.

    Hence: integral of theta is 1, integral of a constant is 0, and
    integral of (a theta + b) is a.
    """
    return g_derivative(a, mode)


@dataclass
class MixedState:
    """Fermionic words with a bosonic HoloState attached to each.

    All attached states must share the same cutoff; the squared norm is the
    sum of the attached squared norms (the words {1, theta_j, ...} are
    orthonormal).
    """

    fermi_mode_count: int
    sectors: dict[int, HoloState] = field(default_factory=dict)

    def __post_init__(self):
        if not 0 <= self.fermi_mode_count <= FULL_MASK_LIMIT:
            raise ValueError(f"bad fermionic mode count {self.fermi_mode_count}")
        limit = 1 << max(self.fermi_mode_count, 1)
        cutoff = None
        clean = {}
        for mask, state in self.sectors.items():
            mask = int(mask)
            if not 0 <= mask < limit:
                raise ValueError(f"word {mask:#b} outside {self.fermi_mode_count} modes")
            if cutoff is None:
                cutoff = state.cutoff
            elif state.cutoff != cutoff:
                raise ValueError("all sectors of a MixedState must share one cutoff")
            if state.coeffs or state.lost_weight:
                clean[mask] = state
        self.sectors = clean

    @property
    def boson_cutoff(self):
        for state in self.sectors.values():
            return state.cutoff
        return None

    def norm_sq(self):
        return float(sum(s.norm_sq() for s in self.sectors.values()))

    def norm(self):
        return math.sqrt(self.norm_sq())

    def lost_weight(self):
        return float(sum(s.lost_weight for s in self.sectors.values()))

    def __add__(self, other):
        if not isinstance(other, MixedState):
            return NotImplemented
        if other.fermi_mode_count != self.fermi_mode_count:
            raise ValueError("mode count mismatch")
        out = dict(self.sectors)
        for mask, state in other.sectors.items():
            out[mask] = out[mask] + state if mask in out else state
        return MixedState(self.fermi_mode_count, out)

    def __rmul__(self, scalar):
        return MixedState(self.fermi_mode_count,
                          {m: scalar * s for m, s in self.sectors.items()})


def mixed_inner(a, b):
    """Inner product on MixedStates, conjugate-linear in the first slot."""
    if a.fermi_mode_count != b.fermi_mode_count:
        raise ValueError("mode count mismatch")
    total = 0.0 + 0.0j
    for mask, state in a.sectors.items():
        other = b.sectors.get(mask)
        if other is not None:
            total += inner_product(state, other)
    return total


def fermi_number(s, mode):
    """Number operator theta_mode d/dtheta_mode on a MixedState.

    Keeps (unchanged) the sectors whose word contains theta_mode, kills the
    rest; idempotent per mode.
    """
    if not 0 <= mode < max(s.fermi_mode_count, 1):
        raise ValueError(f"mode {mode} out of range")
    bit = 1 << mode
    return MixedState(s.fermi_mode_count,
                      {m: st for m, st in s.sectors.items() if m & bit})
