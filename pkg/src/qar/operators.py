"""Operator expressions over the holomorphic ladder generators.

An operator is a weighted sum of ordered words over the four primitive
generators

    z_i  (boson create)      dz_i  = d/dz_i      (boson annihilate)
    theta_j (fermi create)   dtheta_j = d/dtheta_j (fermi annihilate)

with the rightmost generator of a word acting first.  Words are kept
unsimplified; operator identities are established numerically through
truncated matrices (``matrix_of``) rather than by a rewrite system.
Because creation past a cutoff silently truncates, identity checks are
meaningful only on "interior" basis columns where no word of either side
lost weight; ``exact_columns`` / ``interior_max_diff`` implement that.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import grassmann, holo
from .grassmann import MixedState, sign_below
from .holo import HoloState, monomial_state

_ADJOINT_KIND = {"z": "dz", "dz": "z", "theta": "dtheta", "dtheta": "theta"}


class DegeneracyError(ValueError):
    """Raised when nondegenerate perturbation theory hits a degenerate pair."""

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class ResonanceWarning(UserWarning):
    """Signals refrigerator frequencies off the omega_h = omega_c + omega_w resonance."""


@dataclass(frozen=True)
class Generator:
    """One primitive generator; kind is 'z', 'dz', 'theta' or 'dtheta'."""

    kind: str
    mode: int

    def __post_init__(self):
        if self.kind not in _ADJOINT_KIND:
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if self.mode < 0:
            raise ValueError("negative mode index")


@dataclass
class OperatorExpr:
    """Weighted sum of generator words; the empty word is the identity."""

    boson_mode_count: int
    fermi_mode_count: int
    terms: list[tuple[complex, tuple[Generator, ...]]] = field(default_factory=list)

    def __post_init__(self):
        clean = []
        for weight, word in self.terms:
            word = tuple(word)
            for gen in word:
                count = (self.boson_mode_count if gen.kind in ("z", "dz")
                         else self.fermi_mode_count)
                if gen.mode >= count:
                    raise ValueError(f"generator {gen} out of range")
            clean.append((complex(weight), word))
        self.terms = clean

    def _check_compatible(self, other):
        if (self.boson_mode_count, self.fermi_mode_count) != \
                (other.boson_mode_count, other.fermi_mode_count):
            raise ValueError("operator mode counts do not match")

    def __add__(self, other):
        if not isinstance(other, OperatorExpr):
            return NotImplemented
        self._check_compatible(other)
        return OperatorExpr(self.boson_mode_count, self.fermi_mode_count,
                            self.terms + other.terms)

    def __sub__(self, other):
        return self + (-1.0) * other

    def __neg__(self):
        return (-1.0) * self

    def __mul__(self, other):
        if isinstance(other, OperatorExpr):
            self._check_compatible(other)
            terms = [(wa * wb, worda + wordb)
                     for wa, worda in self.terms
                     for wb, wordb in other.terms]
            return OperatorExpr(self.boson_mode_count, self.fermi_mode_count, terms)
        return complex(other) * self

    def __rmul__(self, scalar):
        scalar = complex(scalar)
        return OperatorExpr(self.boson_mode_count, self.fermi_mode_count,
                            [(scalar * w, word) for w, word in self.terms])


def adjoint(expr):
    """Formal adjoint: reverse each word, swap create <-> annihilate,
    conjugate the weights."""
    terms = [(w.conjugate(),
              tuple(Generator(_ADJOINT_KIND[g.kind], g.mode) for g in reversed(word)))
             for w, word in expr.terms]
    return OperatorExpr(expr.boson_mode_count, expr.fermi_mode_count, terms)


def commutator(a, b):
    """Formal a*b - b*a (no simplification)."""
    return a * b - b * a


def anticommutator(a, b):
    """Formal a*b + b*a (no simplification)."""
    return a * b + b * a


@dataclass(frozen=True)
class Algebra:
    """Factory for generators over a fixed number of boson/fermion modes."""

    boson_mode_count: int
    fermi_mode_count: int = 0

    def _single(self, kind, mode):
        return OperatorExpr(self.boson_mode_count, self.fermi_mode_count,
                            [(1.0, (Generator(kind, mode),))])

    def z(self, mode=0):
        return self._single("z", mode)

    def dz(self, mode=0):
        return self._single("dz", mode)

    def theta(self, mode=0):
        return self._single("theta", mode)

    def dtheta(self, mode=0):
        return self._single("dtheta", mode)

    def identity(self):
        return OperatorExpr(self.boson_mode_count, self.fermi_mode_count, [(1.0, ())])

    def number(self, mode=0):
        return self.z(mode) * self.dz(mode)


def _apply_generator(gen, sectors, fermi_mode_count):
    out = {}

    def accumulate(mask, state):
        out[mask] = out[mask] + state if mask in out else state

    if gen.kind == "z":
        for mask, state in sectors.items():
            accumulate(mask, holo.apply_create(state, gen.mode))
    elif gen.kind == "dz":
        for mask, state in sectors.items():
            accumulate(mask, holo.apply_annihilate(state, gen.mode))
    elif gen.kind == "theta":
        bit = 1 << gen.mode
        for mask, state in sectors.items():
            if mask & bit:
                continue  # theta^2 = 0
            accumulate(mask | bit, sign_below(mask, gen.mode) * state)
    else:  # dtheta
        bit = 1 << gen.mode
        for mask, state in sectors.items():
            if not mask & bit:
                continue
            accumulate(mask & ~bit, sign_below(mask, gen.mode) * state)
    return out


def apply(expr, state):
    """Apply an operator expression to a MixedState or a HoloState.

    The result has the same type as the input; truncation loss from every
    word accumulates into its lost weight.
    """
    plain = isinstance(state, HoloState)
    if plain:
        if expr.fermi_mode_count != 0:
            raise ValueError("operator has fermionic generators; need a MixedState")
        if expr.boson_mode_count != state.mode_count:
            raise ValueError("boson mode count mismatch")
        sectors = {0: state}
        cutoff = state.cutoff
        fermi = 0
    else:
        if expr.fermi_mode_count != state.fermi_mode_count:
            raise ValueError("fermionic mode count mismatch")
        cutoff = state.boson_cutoff
        if cutoff is not None and expr.boson_mode_count != len(cutoff):
            raise ValueError("boson mode count mismatch")
        sectors = state.sectors
        fermi = state.fermi_mode_count

    total = {}
    for weight, word in expr.terms:
        cur = sectors
        for gen in reversed(word):
            cur = _apply_generator(gen, cur, fermi)
            if not cur:
                break
        for mask, st in cur.items():
            st = weight * st
            total[mask] = total[mask] + st if mask in total else st

    if plain:
        result = total.get(0, HoloState(cutoff))
        extra_lost = sum(st.lost_weight for m, st in total.items() if m != 0)
        if extra_lost:
            result = HoloState(result.cutoff, result.coeffs, result.lost_weight + extra_lost)
        return result
    return MixedState(fermi, total)


@dataclass
class MatrixRep:
    """Dense matrix of an operator in the truncated joint basis.

    Basis order: fermionic mask major (ascending), boson multi-index minor
    (lexicographic, last mode fastest).
    """

    matrix: np.ndarray
    boson_cutoff: tuple[int, ...]
    fermi_mode_count: int
    basis: list[tuple[int, tuple[int, ...]]]
    _index: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self._index:
            self._index = {b: i for i, b in enumerate(self.basis)}

    @property
    def dim(self):
        return self.matrix.shape[0]

    def index_of(self, mask, occ):
        return self._index[(int(mask), tuple(occ))]

    def hermiticity_defect(self):
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    def is_hermitian(self, tol=1e-12):
        return self.hermiticity_defect() <= tol


def joint_basis(cutoffs, fermi_mode_count=0):
    dims = tuple(int(c) + 1 for c in cutoffs)
    return [(mask, tuple(occ))
            for mask in range(1 << fermi_mode_count)
            for occ in np.ndindex(*dims)]


def matrix_of(expr, cutoffs, dim_cap=4096):
    """Dense matrix of ``expr`` in the truncated joint basis.

    Column j is the expansion of expr applied to basis state j; exact
    within truncation (creation images past the cutoff are dropped).
    """
    if isinstance(cutoffs, (int, np.integer)):
        cutoffs = (int(cutoffs),) * expr.boson_mode_count
    cutoffs = tuple(int(c) for c in cutoffs)
    if len(cutoffs) != expr.boson_mode_count:
        raise ValueError("cutoff count does not match boson mode count")
    if any(c < 0 for c in cutoffs):
        raise ValueError("cutoffs must be >= 0")
    basis = joint_basis(cutoffs, expr.fermi_mode_count)
    dim = len(basis)
    if dim > dim_cap:
        raise ValueError(f"basis dimension {dim} exceeds cap {dim_cap}")
    mat = np.zeros((dim, dim), dtype=complex)
    rep = MatrixRep(mat, cutoffs, expr.fermi_mode_count, basis)
    for j, (mask, occ) in enumerate(basis):
        image = apply(expr, MixedState(expr.fermi_mode_count,
                                       {mask: monomial_state(occ, cutoffs)}))
        for m2, st in image.sectors.items():
            for idx, amp in st.coeffs.items():
                mat[rep.index_of(m2, idx), j] += amp
    return rep


def exact_columns(expr, cutoffs):
    """Boolean mask of basis columns on which ``expr`` loses no weight to
    truncation (the interior block for identity checks)."""
    if isinstance(cutoffs, (int, np.integer)):
        cutoffs = (int(cutoffs),) * expr.boson_mode_count
    basis = joint_basis(cutoffs, expr.fermi_mode_count)
    mask = np.zeros(len(basis), dtype=bool)
    for j, (fm, occ) in enumerate(basis):
        image = apply(expr, MixedState(expr.fermi_mode_count,
                                       {fm: monomial_state(occ, cutoffs)}))
        mask[j] = image.lost_weight() == 0.0
    return mask


def interior_max_diff(a, b, cutoffs):
    """max |matrix_of(a) - matrix_of(b)| over columns exact for both sides."""
    cols = exact_columns(a, cutoffs) & exact_columns(b, cutoffs)
    if not cols.any():
        raise ValueError("no interior columns at these cutoffs")
    diff = matrix_of(a, cutoffs).matrix - matrix_of(b, cutoffs).matrix
    return float(np.max(np.abs(diff[:, cols])))


# ---------------------------------------------------------------------------
# Model Hamiltonians
# ---------------------------------------------------------------------------

def build_h0(frequencies):
    """Free Hamiltonian sum_i omega_i z_i d/dz_i (hbar = 1)."""
    freqs = [float(w) for w in np.atleast_1d(frequencies)]
    if any(w <= 0 for w in freqs):
        raise ValueError("frequencies must be positive")
    alg = Algebra(len(freqs))
    h = OperatorExpr(len(freqs), 0, [])
    for i, w in enumerate(freqs):
        h = h + w * alg.number(i)
    return h


@dataclass
class RefrigeratorHamiltonianParams:
    """Frequencies of the three-oscillator refrigerator, hbar = 1.

    Mode order is (hot, cold, work) = (0, 1, 2).  The machine is meant to
    run on the omega_h = omega_c + omega_w resonance; off-resonant values
    are accepted but warned about.
    """

    omega_h: float
    omega_c: float
    omega_w: float
    omega_int: float

    def __post_init__(self):
        if min(self.omega_h, self.omega_c, self.omega_w) <= 0:
            raise ValueError("oscillator frequencies must be positive")
        if self.omega_int < 0:
            raise ValueError("interaction strength must be >= 0")
        mismatch = abs(self.omega_h - self.omega_c - self.omega_w)
        if mismatch > 1e-12 * max(self.omega_h, self.omega_c + self.omega_w):
            warnings.warn(
                f"omega_h = {self.omega_h} is off the omega_c + omega_w = "
                f"{self.omega_c + self.omega_w} resonance",
                ResonanceWarning, stacklevel=2)

    @property
    def frequencies(self):
        return (self.omega_h, self.omega_c, self.omega_w)


def build_refrigerator_h(params):
    """Three-oscillator refrigerator Hamiltonian

        H = sum_i omega_i z_i dz_i
            + omega_int (z_h dz_c dz_w + z_c z_w dz_h),

    modes ordered (h, c, w)."""
    alg = Algebra(3)
    h = build_h0(params.frequencies)
    h_int = params.omega_int * (alg.z(0) * alg.dz(1) * alg.dz(2)
                                + alg.z(1) * alg.z(2) * alg.dz(0))
    return h + h_int


def build_jc(omega_c, omega_eg, g_c):
    """Jaynes-Cummings Hamiltonian, one cavity mode and one two-level atom:

        H = omega_c z dz + omega_eg theta dtheta + g_c (theta dz + dtheta z).
    """
    if omega_c <= 0 or omega_eg < 0:
        raise ValueError("cavity frequency must be positive, omega_eg >= 0")
    alg = Algebra(1, 1)
    return (omega_c * alg.number(0)
            + omega_eg * (alg.theta(0) * alg.dtheta(0))
            + g_c * (alg.theta(0) * alg.dz(0) + alg.dtheta(0) * alg.z(0)))


def jc_total_number():
    """N = theta dtheta + z dz; commutes with the JC Hamiltonian."""
    alg = Algebra(1, 1)
    return alg.theta(0) * alg.dtheta(0) + alg.number(0)


def jc_dressed_state(n, phi, sign, cutoff=None):
    """Dressed JC eigenstate ansatz at excitation n >= 1:

        |n,+> = cos(phi/2) |e,n-1> + sin(phi/2) |g,n>
        |n,-> = cos(phi/2) |g,n>   - sin(phi/2) |e,n-1>

    with |g> = 1 and |e> = theta.  The mixing angle is caller-supplied
    (see ``jc_mixing_angle`` for the resonant-detuning convenience rule).
    """
    if n < 1:
        raise ValueError("dressed states need n >= 1 (no |e,-1> component)")
    if sign not in (+1, -1, "+", "-"):
        raise ValueError("sign must be +1 or -1")
    plus = sign in (+1, "+")
    cutoff = (int(n) if cutoff is None else int(cutoff),)
    excited = MixedState(1, {1: monomial_state(n - 1, cutoff)})
    ground = MixedState(1, {0: monomial_state(n, cutoff)})
    c, s = math.cos(phi / 2.0), math.sin(phi / 2.0)
    if plus:
        return c * excited + s * ground
    return c * ground + (-s) * excited


def jc_mixing_angle(n, g_c, detuning):
    """Convenience rule tan(phi_n) = 2 g_c sqrt(n) / detuning (an extension;
    the dressed-state contract itself takes phi_n from the caller)."""
    return math.atan2(2.0 * g_c * math.sqrt(n), detuning)


def su2_generators():
    """Quadratic two-mode generators over modes (h, c) = (0, 1):

        X1 = z_h dz_c + z_c dz_h      (swap generator)
        X2 = i (z_h dz_c - z_c dz_h)
        X3 = z_h dz_h - z_c dz_c
        N  = z_h dz_h + z_c dz_c

    Closing relations (checked numerically on interior blocks):
    [X1,X2] = -2i X3 and cyclic; [Xk, N] = 0.
    """
    alg = Algebra(2)
    swap_up = alg.z(0) * alg.dz(1)
    swap_dn = alg.z(1) * alg.dz(0)
    x1 = swap_up + swap_dn
    x2 = 1j * (swap_up - swap_dn)
    x3 = alg.number(0) - alg.number(1)
    n_tot = alg.number(0) + alg.number(1)
    return x1, x2, x3, n_tot


# ---------------------------------------------------------------------------
# Holomorphic perturbation theory for the three-oscillator refrigerator
# ---------------------------------------------------------------------------

def h0_energy(index, params):
    """Unperturbed energy omega . n of a three-mode occupation index."""
    return sum(w * k for w, k in zip(params.frequencies, index))


def perturbation_matrix_element(m, n, omega_int):
    """<m|H_int|n> for the three-oscillator interaction, analytic rule:

        omega_int [ d_{m,(n_h+1,n_c-1,n_w-1)} sqrt((n_h+1) n_c n_w)
                  + d_{m,(n_h-1,n_c+1,n_w+1)} sqrt(n_h (n_c+1)(n_w+1)) ].
    """
    m = tuple(int(i) for i in m)
    n = tuple(int(i) for i in n)
    if len(m) != 3 or len(n) != 3:
        raise ValueError("indices must have three modes (h, c, w)")
    nh, nc, nw = n
    if m == (nh + 1, nc - 1, nw - 1):
        return complex(omega_int * math.sqrt((nh + 1) * nc * nw))
    if m == (nh - 1, nc + 1, nw + 1):
        return complex(omega_int * math.sqrt(nh * (nc + 1) * (nw + 1)))
    return 0.0 + 0.0j


def coupled_indices(n):
    nh, nc, nw = n
    out = []
    if nc >= 1 and nw >= 1:
        out.append((nh + 1, nc - 1, nw - 1))
    if nh >= 1:
        out.append((nh - 1, nc + 1, nw + 1))
    return out


def first_order_state(n, params, cutoff, denominator="h0"):
    """First-order eigenstate correction sum_{m != n} <m|H_int|n>/(E0_n - E0_m) |m>.

    ``denominator`` selects the unperturbed-energy convention:
      * "h0"    - the physical H0 spectrum omega . n (default); the
                  correction is then linear in omega_int.
      * "total" - E0_n - E0_m = omega_int (sum n - sum m), which makes the
                  correction independent of omega_int (compatibility mode).

    On the omega_h = omega_c + omega_w resonance the coupled pair is
    degenerate under "h0" and a DegeneracyError is raised.
    """
    if denominator not in ("h0", "total"):
        raise ValueError("denominator must be 'h0' or 'total'")
    n = tuple(int(i) for i in n)
    if isinstance(cutoff, (int, np.integer)):
        cutoff = (int(cutoff),) * 3
    cutoff = tuple(int(c) for c in cutoff)
    if params.omega_int == 0.0:
        return HoloState(cutoff)
    coeffs = {}
    e_n = h0_energy(n, params)
    for m in coupled_indices(n):
        if any(mi > ci for mi, ci in zip(m, cutoff)):
            raise ValueError(f"coupled index {m} exceeds cutoff {cutoff}")
        amp = perturbation_matrix_element(m, n, params.omega_int)
        if denominator == "h0":
            gap = e_n - h0_energy(m, params)
        else:
            gap = params.omega_int * (sum(n) - sum(m))
        if abs(gap) <= 1e-12 * (abs(e_n) + 1.0):
            raise DegeneracyError(
                f"states {n} and {m} are degenerate (E0 gap = {gap:.3e}); "
                "nondegenerate perturbation theory does not apply",
                pair=(n, m))
        coeffs[m] = amp / gap
    return HoloState(cutoff, coeffs)
