"""GKS-L dynamics in the truncated Fock basis.

The noise-driven absorption refrigerator lives on two bosonic modes,
ordered (hot, cold) = (0, 1).  The generator is

    d rho/dt = -i [H0, rho] + L_h(rho) + L_c(rho) + L_n(rho),      hbar = 1,

with thermal dissipators carrying downward rate gamma (nbar + 1) and
upward rate gamma nbar, and the Gaussian-noise dissipator
L_n(rho) = -eta [X1, [X1, rho]] driving the swap generator X1.  The noise
channel equals a standard dissipator with jump operator X1 at rate 2 eta.

Superoperators are vectorized row-major: vec(A rho B) = (A kron B^T) vec(rho).

Heat currents are computed as Tr[(omega n) . dissipator-increment] with the
*truncated* matrices.  On the truncated space these sums telescope exactly
to traces against the generator residual, so the first law and the COP
identity hold to solver precision rather than to truncation-tail accuracy;
the textbook form omega gamma (nbar - <n>) agrees up to the tail and is
kept as a cross-check in the tests.

Temperatures are in energy units (k_B = 1).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp
from scipy.linalg import eigh, svd
from scipy.sparse.linalg import LinearOperator, eigs, expm_multiply, splu

from .operators import Algebra, OperatorExpr, build_h0, matrix_of, su2_generators


class DegenerateSteadyStateError(RuntimeError):
    """The generator has no unique stationary state."""


class DimensionCapError(ValueError):
    """The requested truncation exceeds the configured dimension cap."""


class IntegrationError(RuntimeError):
    """Fixed-step integration rejected or went unstable."""


class TruncationWarning(UserWarning):
    """Cutoffs leave more thermal tail weight than requested."""


def bose_einstein(omega, temperature):
    """Mean thermal occupation 1 / (exp(omega/T) - 1)."""
    if omega <= 0 or temperature <= 0:
        raise ValueError("bose_einstein needs omega > 0 and T > 0")
    return 1.0 / math.expm1(omega / temperature)


def thermal_tail(nbar, cutoff):
    """Weight of a thermal state beyond the cutoff: (nbar/(nbar+1))^(cutoff+1)."""
    if nbar <= 0:
        return 0.0
    return (nbar / (nbar + 1.0)) ** (int(cutoff) + 1)


def cutoff_for_tail(nbar, tail):
    """Smallest cutoff whose thermal tail is below ``tail``."""
    if nbar <= 0:
        return 1
    q = nbar / (nbar + 1.0)
    c = int(math.ceil(math.log(tail) / math.log(q))) - 1
    return max(c, 1)


# ---------------------------------------------------------------------------
# Specs
# ---------------------------------------------------------------------------

@dataclass
class ThermalBathSpec:
    """One thermal bath attached to one mode; nbar is derived from omega/T."""

    mode: int
    gamma: float
    temperature: float
    omega: float
    nbar: float = field(init=False)

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError("coupling rate must be >= 0")
        self.nbar = bose_einstein(self.omega, self.temperature)


@dataclass
class NoiseSpec:
    """Gaussian noise of strength eta driving ``generator`` (default: the
    two-mode swap generator X1).  Only the averaged dynamics enters: the
    dissipator is -eta [X1, [X1, .]]."""

    eta: float
    generator: OperatorExpr | None = None

    def __post_init__(self):
        if self.eta < 0:
            raise ValueError("noise strength must be >= 0")

    def generator_or_default(self, mode_count):
        if self.generator is not None:
            return self.generator
        if mode_count != 2:
            raise ValueError("default noise generator X1 needs exactly 2 modes")
        return su2_generators()[0]


@dataclass
class RefrigeratorParams:
    """Parameters of the two-mode noise-driven refrigerator.

    ``cutoff`` is the per-mode Fock cutoff (int applies to both modes).
    A warning is emitted when the thermal tail beyond the cutoff exceeds
    1e-6 on either mode.
    """

    omega_h: float
    omega_c: float
    gamma_h: float
    gamma_c: float
    temp_h: float
    temp_c: float
    eta: float
    cutoff: tuple[int, int]

    TAIL_WARN = 1e-6

    def __post_init__(self):
        if isinstance(self.cutoff, (int, np.integer)):
            self.cutoff = (int(self.cutoff), int(self.cutoff))
        self.cutoff = tuple(int(c) for c in self.cutoff)
        if min(self.omega_h, self.omega_c, self.gamma_h, self.gamma_c,
               self.temp_h, self.temp_c, self.eta) <= 0:
            raise ValueError("all refrigerator parameters must be positive")
        if len(self.cutoff) != 2 or min(self.cutoff) < 1:
            raise ValueError("cutoff must give two positive per-mode entries")
        tail = self.tail_weight()
        if tail >= self.TAIL_WARN:
            warnings.warn(
                f"thermal tail weight {tail:.2e} at cutoff {self.cutoff} exceeds "
                f"{self.TAIL_WARN:.0e}; raise the cutoff for quantitative results",
                TruncationWarning, stacklevel=2)

    @classmethod
    def with_auto_cutoff(cls, omega_h, omega_c, gamma_h, gamma_c, temp_h, temp_c,
                         eta, tail=1e-6, extra=0):
        """Pick per-mode cutoffs from the thermal tail target."""
        ch = cutoff_for_tail(bose_einstein(omega_h, temp_h), tail) + extra
        cc = cutoff_for_tail(bose_einstein(omega_c, temp_c), tail) + extra
        return cls(omega_h, omega_c, gamma_h, gamma_c, temp_h, temp_c, eta, (ch, cc))

    @property
    def nbar_h(self):
        return bose_einstein(self.omega_h, self.temp_h)

    @property
    def nbar_c(self):
        return bose_einstein(self.omega_c, self.temp_c)

    def tail_weight(self):
        return max(thermal_tail(self.nbar_h, self.cutoff[0]),
                   thermal_tail(self.nbar_c, self.cutoff[1]))

    def baths(self):
        return (ThermalBathSpec(0, self.gamma_h, self.temp_h, self.omega_h),
                ThermalBathSpec(1, self.gamma_c, self.temp_c, self.omega_c))

    def noise(self):
        return NoiseSpec(self.eta)

    def raised(self, extra):
        """Copy with both cutoffs raised by ``extra``."""
        return replace(self, cutoff=(self.cutoff[0] + extra, self.cutoff[1] + extra))


# ---------------------------------------------------------------------------
# States and operators as matrices
# ---------------------------------------------------------------------------

def _joint_dims(cutoff):
    return tuple(int(c) + 1 for c in cutoff)


@dataclass
class DensityMatrix:
    """Hermitian unit-trace state over the truncated joint Fock basis."""

    cutoff: tuple[int, ...]
    matrix: np.ndarray
    residual: float | None = None

    def __post_init__(self):
        if isinstance(self.cutoff, (int, np.integer)):
            self.cutoff = (int(self.cutoff),)
        self.cutoff = tuple(int(c) for c in self.cutoff)
        self.matrix = np.asarray(self.matrix, dtype=complex)
        dim = int(np.prod(_joint_dims(self.cutoff)))
        if self.matrix.shape != (dim, dim):
            raise ValueError(f"matrix shape {self.matrix.shape} != ({dim}, {dim})")

    @property
    def dim(self):
        return self.matrix.shape[0]

    def validate(self, herm_tol=1e-10, trace_tol=1e-10, eig_floor=-1e-8):
        defect = np.max(np.abs(self.matrix - self.matrix.conj().T))
        if defect > herm_tol:
            raise ValueError(f"not Hermitian: defect {defect:.2e}")
        tr = self.matrix.trace()
        if abs(tr - 1.0) > trace_tol:
            raise ValueError(f"trace {tr} != 1")
        lo = float(eigh(self.matrix, eigvals_only=True)[0])
        if lo < eig_floor:
            raise ValueError(f"negative eigenvalue {lo:.2e} below truncation slack")
        return self

    def expectation(self, op):
        return complex(np.trace(op @ self.matrix))

    @classmethod
    def fock(cls, cutoff, occupation):
        dims = _joint_dims(cutoff if not isinstance(cutoff, (int, np.integer)) else (cutoff,))
        occupation = ((occupation,) if isinstance(occupation, (int, np.integer))
                      else tuple(occupation))
        idx = int(np.ravel_multi_index(occupation, dims))
        mat = np.zeros((int(np.prod(dims)), int(np.prod(dims))), dtype=complex)
        mat[idx, idx] = 1.0
        return cls(cutoff, mat)

    @classmethod
    def vacuum(cls, cutoff):
        zeros = (0,) * (1 if isinstance(cutoff, (int, np.integer)) else len(cutoff))
        return cls(cutoff, cls.fock(cutoff, zeros).matrix)

    @classmethod
    def thermal_product(cls, cutoff, nbars):
        """Product of per-mode truncated geometric (thermal) states; this is
        the exact fixed point of the truncated thermal dissipators."""
        if isinstance(cutoff, (int, np.integer)):
            cutoff = (int(cutoff),)
        nbars = np.atleast_1d(nbars).astype(float)
        if len(nbars) != len(cutoff):
            raise ValueError("one nbar per mode required")
        pops = None
        for c, nb in zip(cutoff, nbars):
            q = nb / (nb + 1.0) if nb > 0 else 0.0
            p = q ** np.arange(c + 1)
            p /= p.sum()
            pops = p if pops is None else np.kron(pops, p)
        return cls(cutoff, np.diag(pops).astype(complex))


def mode_matrices(cutoff):
    """Annihilation and number matrices per mode, plus the identity, in the
    joint truncated basis (built through the operator-word machinery)."""
    cutoff = tuple(int(c) for c in cutoff)
    alg = Algebra(len(cutoff))
    dim = int(np.prod(_joint_dims(cutoff)))
    lower = [matrix_of(alg.dz(i), cutoff, dim_cap=max(dim, 4096)).matrix
             for i in range(len(cutoff))]
    number = [matrix_of(alg.number(i), cutoff, dim_cap=max(dim, 4096)).matrix
              for i in range(len(cutoff))]
    return lower, number, np.eye(dim, dtype=complex)


def _as_matrix(op, cutoff):
    if isinstance(op, OperatorExpr):
        dim = int(np.prod(_joint_dims(cutoff)))
        return matrix_of(op, cutoff, dim_cap=max(dim, 4096)).matrix
    return np.asarray(op, dtype=complex)


def _as_state_matrix(rho):
    return rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)


# ---------------------------------------------------------------------------
# Dissipators (Schroedinger picture increments)
# ---------------------------------------------------------------------------

def dissipator_apply(jump, rate, rho, cutoff=None):
    """gamma (L rho L+ - 1/2 {L+L, rho}); trace-free by construction."""
    if rate < 0:
        raise ValueError("dissipator rate must be >= 0")
    if cutoff is None and isinstance(rho, DensityMatrix):
        cutoff = rho.cutoff
    L = _as_matrix(jump, cutoff)
    r = _as_state_matrix(rho)
    if L.shape != r.shape:
        raise ValueError("jump operator and state shapes differ")
    Ld = L.conj().T
    LdL = Ld @ L
    return rate * (L @ r @ Ld - 0.5 * (LdL @ r + r @ LdL))


def thermal_dissipator_apply(bath, rho, cutoff=None):
    """gamma (nbar+1) D[a_mode](rho) + gamma nbar D[a+_mode](rho)."""
    if cutoff is None:
        if not isinstance(rho, DensityMatrix):
            raise ValueError("need a DensityMatrix or an explicit cutoff")
        cutoff = rho.cutoff
    lower, _, _ = mode_matrices(cutoff)
    a = lower[bath.mode]
    out = dissipator_apply(a, bath.gamma * (bath.nbar + 1.0), rho, cutoff)
    if bath.nbar > 0:
        out = out + dissipator_apply(a.conj().T, bath.gamma * bath.nbar, rho, cutoff)
    return out


def noise_dissipator_apply(noise, rho, cutoff=None):
    """-eta [X1, [X1, rho]]; trace-free and Hermiticity-preserving."""
    if cutoff is None:
        if not isinstance(rho, DensityMatrix):
            raise ValueError("need a DensityMatrix or an explicit cutoff")
        cutoff = rho.cutoff
    X = _as_matrix(noise.generator_or_default(len(cutoff)), cutoff)
    r = _as_state_matrix(rho)
    inner = X @ r - r @ X
    return -noise.eta * (X @ inner - inner @ X)


def adjoint_generator_apply(hamiltonian, baths, noise, observable, cutoff):
    """Heisenberg-picture generator on an observable:

        +i [H, O] + sum_baths (L+ O L - 1/2 {L+L, O}) - eta [X1, [X1, O]].

    The +i sign is fixed by the duality Tr[O L(rho)] = Tr[L+(O) rho] with
    the Schroedinger generator used everywhere else here.
    """
    cutoff = tuple(int(c) for c in cutoff)
    O = _as_matrix(observable, cutoff)
    out = np.zeros_like(O)
    if hamiltonian is not None:
        H = _as_matrix(hamiltonian, cutoff)
        out = out + 1j * (H @ O - O @ H)
    lower, _, _ = mode_matrices(cutoff)
    for bath in baths:
        a = lower[bath.mode]
        ad = a.conj().T
        for rate, L in ((bath.gamma * (bath.nbar + 1.0), a),
                        (bath.gamma * bath.nbar, ad)):
            if rate == 0.0:
                continue
            Ld = L.conj().T
            LdL = Ld @ L
            out = out + rate * (Ld @ O @ L - 0.5 * (LdL @ O + O @ LdL))
    if noise is not None and noise.eta > 0:
        X = _as_matrix(noise.generator_or_default(len(cutoff)), cutoff)
        inner = X @ O - O @ X
        out = out - noise.eta * (X @ inner - inner @ X)
    return out


# ---------------------------------------------------------------------------
# Vectorized generator
# ---------------------------------------------------------------------------

@dataclass
class LiouvillianMatrix:
    """Sparse vectorized GKS-L generator: d vec(rho)/dt = M vec(rho),
    row-major vec convention."""

    matrix: sp.csr_matrix
    cutoff: tuple[int, ...]

    @property
    def hilbert_dim(self):
        return int(np.prod(_joint_dims(self.cutoff)))

    def scale(self):
        """Infinity norm of M (bounds the spectral radius)."""
        return float(abs(self.matrix).sum(axis=1).max())

    def trace_defect(self):
        """Norm of the trace functional applied to M; zero means exact
        trace preservation."""
        dim = self.hilbert_dim
        t = np.zeros(dim * dim)
        t[:: dim + 1] = 1.0
        return float(np.max(np.abs(t @ self.matrix)))

    def apply_to(self, rho):
        r = _as_state_matrix(rho)
        return (self.matrix @ r.reshape(-1)).reshape(r.shape)

    def totals(self):
        """Total occupation of each joint Fock basis state."""
        dims = _joint_dims(self.cutoff)
        grids = np.meshgrid(*[np.arange(d) for d in dims], indexing="ij")
        return sum(g.reshape(-1) for g in grids)


def liouvillian_matrix(hamiltonian, baths, noise, cutoff, dim_cap=128):
    """Assemble the vectorized generator for Hamiltonian + thermal baths +
    optional Gaussian noise.  ``dim_cap`` bounds the Hilbert dimension."""
    cutoff = ((int(cutoff),) if isinstance(cutoff, (int, np.integer))
              else tuple(int(c) for c in cutoff))
    dim = int(np.prod(_joint_dims(cutoff)))
    if dim > dim_cap:
        raise DimensionCapError(f"Hilbert dimension {dim} exceeds cap {dim_cap}")
    eye = sp.identity(dim, dtype=complex, format="csr")

    def channel(rate, L):
        Ls = sp.csr_matrix(L)
        LdL = sp.csr_matrix(L.conj().T @ L)
        return rate * (sp.kron(Ls, Ls.conj(), format="csr")
                       - 0.5 * sp.kron(LdL, eye, format="csr")
                       - 0.5 * sp.kron(eye, LdL.T, format="csr"))

    M = sp.csr_matrix((dim * dim, dim * dim), dtype=complex)
    if hamiltonian is not None:
        H = sp.csr_matrix(_as_matrix(hamiltonian, cutoff))
        M = M - 1j * (sp.kron(H, eye, format="csr") - sp.kron(eye, H.T, format="csr"))
    lower, _, _ = mode_matrices(cutoff)
    for bath in baths:
        a = lower[bath.mode]
        if bath.gamma == 0.0:
            continue
        M = M + channel(bath.gamma * (bath.nbar + 1.0), a)
        if bath.nbar > 0:
            M = M + channel(bath.gamma * bath.nbar, a.conj().T)
    if noise is not None and noise.eta > 0:
        X = _as_matrix(noise.generator_or_default(len(cutoff)), cutoff)
        M = M + channel(2.0 * noise.eta, X)  # -eta[X,[X,.]] == 2 eta D[X]
    return LiouvillianMatrix(M.tocsr(), cutoff)


# ---------------------------------------------------------------------------
# Steady state
# ---------------------------------------------------------------------------

def _null_vector_dense(M, gap_rtol):
    s = None
    _, s, Vh = svd(M)
    if s[0] == 0.0:
        raise DegenerateSteadyStateError("generator is identically zero")
    if s[-2] <= gap_rtol * s[0]:
        raise DegenerateSteadyStateError(
            f"second-smallest singular value {s[-2]:.2e} <= "
            f"{gap_rtol:.0e} * ||M|| = {gap_rtol * s[0]:.2e}: steady state not unique")
    return Vh[-1].conj()


def _null_vector_sparse(M, scale, gap_rtol):
    """Smallest-magnitude eigenpair via shift-invert Arnoldi, with the
    eigenvalue gap standing in for the dense singular-value check."""
    n = M.shape[0]
    sigma = 1e-12 * scale
    shifted = (M - sigma * sp.identity(n, dtype=complex, format="csc")).tocsc()
    lu = splu(shifted)
    opinv = LinearOperator((n, n), matvec=lu.solve, dtype=complex)
    vals, vecs = eigs(M, k=2, sigma=sigma, OPinv=opinv, which="LM")
    order = np.argsort(np.abs(vals))
    lam0, lam1 = vals[order[0]], vals[order[1]]
    if abs(lam1) <= gap_rtol * scale:
        raise DegenerateSteadyStateError(
            f"two generator eigenvalues within {gap_rtol:.0e} * scale of zero "
            f"({lam0:.2e}, {lam1:.2e}): steady state not unique")
    v = vecs[:, order[0]]
    for _ in range(2):  # inverse-iteration polish on the same factorization
        v = lu.solve(v)
        v /= np.linalg.norm(v)
    return v


def steady_state(generator, gap_rtol=1e-8, residual_rtol=1e-9, dense_cutoff=3600,
                 block_dense_cutoff=600):
    """Stationary state of the vectorized generator.

    Below ``dense_cutoff`` superoperator rows the null vector and the
    uniqueness check use a full dense SVD.  Above it, the generator is first
    restricted to the conserved sector where ket and bra total occupations
    agree (verified entry-wise before use; the steady state must live there
    because it carries the trace); on that sector the null vector comes from
    a dense SVD when the block is small, else from shift-invert Arnoldi with
    the eigenvalue gap standing in for the singular-value uniqueness check.
    """
    M = generator.matrix.tocsr()
    D = M.shape[0]
    dim = generator.hilbert_dim
    scale = generator.scale()
    if scale == 0.0:
        raise DegenerateSteadyStateError("generator is identically zero")

    if D <= dense_cutoff:
        v = _null_vector_dense(M.toarray(), gap_rtol)
    else:
        totals = generator.totals()
        pair_tot_ket = np.repeat(totals, dim)
        pair_tot_bra = np.tile(totals, dim)
        inside = pair_tot_ket == pair_tot_bra
        idx = np.flatnonzero(inside)
        sub_rows = M[idx, :].tocsr()
        block = sub_rows[:, idx].tocsc()
        leak = abs(sub_rows).sum() - abs(block).sum()
        if leak > 1e-12 * scale:
            block, embed = M, None  # sector not conserved: solve in full space
        else:
            embed = idx
        if block.shape[0] <= block_dense_cutoff:
            x = _null_vector_dense(block.toarray(), gap_rtol)
        else:
            x = _null_vector_sparse(block, scale, gap_rtol)
        if embed is None:
            v = x
        else:
            v = np.zeros(D, dtype=complex)
            v[embed] = x

    rho = v.reshape(dim, dim)
    rho = 0.5 * (rho + rho.conj().T)
    tr = rho.trace().real
    if abs(tr) < 1e-10 * np.linalg.norm(rho):
        raise DegenerateSteadyStateError("null vector is traceless")
    rho = rho / rho.trace()
    vec = rho.reshape(-1)
    residual = float(np.linalg.norm(M @ vec) / np.linalg.norm(vec))
    if residual > residual_rtol * scale:
        raise DegenerateSteadyStateError(
            f"steady-state residual {residual:.2e} exceeds "
            f"{residual_rtol:.0e} * scale = {residual_rtol * scale:.2e}")
    out = DensityMatrix(generator.cutoff, rho, residual=residual)
    out.validate(herm_tol=1e-10, trace_tol=1e-10, eig_floor=-1e-8)
    return out


# ---------------------------------------------------------------------------
# Time evolution
# ---------------------------------------------------------------------------

def evolve(rho0, generator, t_final, dt):
    """Fixed-step classical RK4 on d vec(rho)/dt = M vec(rho).

    The step must satisfy dt * ||M||_inf <= 2.5 (inside the RK4 stability
    region for the dissipative spectrum); Hermiticity is restored after
    every step and the trace is monitored.
    """
    if t_final < 0 or dt <= 0:
        raise ValueError("need t_final >= 0 and dt > 0")
    M = generator.matrix
    scale = generator.scale()
    if dt * scale > 2.5:
        raise IntegrationError(
            f"dt * ||M|| = {dt * scale:.3g} > 2.5: reduce dt for stability")
    steps = max(int(round(t_final / dt)), 1) if t_final > 0 else 0
    if steps > 0:
        dt = t_final / steps
    dim = generator.hilbert_dim
    v = _as_state_matrix(rho0).reshape(-1).astype(complex)
    trace0 = v[:: dim + 1].sum().real
    bound = 10.0 * max(np.linalg.norm(v), 1.0)
    for _ in range(steps):
        k1 = M @ v
        k2 = M @ (v + 0.5 * dt * k1)
        k3 = M @ (v + 0.5 * dt * k2)
        k4 = M @ (v + dt * k3)
        v = v + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        r = v.reshape(dim, dim)
        r = 0.5 * (r + r.conj().T)
        v = r.reshape(-1)
        nrm = np.linalg.norm(v)
        if not np.isfinite(nrm) or nrm > bound:
            raise IntegrationError("time evolution blew up; reduce dt")
    drift = abs(v[:: dim + 1].sum().real - trace0)
    if drift > 1e-8:
        raise IntegrationError(f"trace drifted by {drift:.2e} (> 1e-8) over the run")
    cutoff = rho0.cutoff if isinstance(rho0, DensityMatrix) else generator.cutoff
    return DensityMatrix(cutoff, v.reshape(dim, dim))


# ---------------------------------------------------------------------------
# Currents, entropy, reports
# ---------------------------------------------------------------------------

def heat_current(bath, rho):
    """Heat flow out of the bath: Tr[(omega n_mode) . L_bath(rho)].

    Equals omega gamma (nbar - <n>) up to the truncation tail; positive
    J_c means heat is extracted from the cold bath.
    """
    if not isinstance(rho, DensityMatrix):
        raise ValueError("heat_current needs a DensityMatrix (mode structure)")
    _, number, _ = mode_matrices(rho.cutoff)
    increment = thermal_dissipator_apply(bath, rho)
    return float(np.trace(number[bath.mode] @ increment).real * bath.omega)


def noise_power(noise, hamiltonian, rho):
    """Power injected by the noise: Tr[H0 . L_n(rho)]; equals
    -2 eta (omega_h - omega_c) <X3> up to the truncation tail."""
    if not isinstance(rho, DensityMatrix):
        raise ValueError("noise_power needs a DensityMatrix (mode structure)")
    H = _as_matrix(hamiltonian, rho.cutoff)
    increment = noise_dissipator_apply(noise, rho)
    return float(np.trace(H @ increment).real)


def relative_entropy(rho, sigma, floor=1e-12):
    """Quantum relative entropy S(rho | sigma) = Tr rho (ln rho - ln sigma).

    Eigenvalues are floored at ``floor`` before the logarithms; the induced
    bias is bounded by floor * dim * |ln floor|.
    """
    r = _as_state_matrix(rho)
    s = _as_state_matrix(sigma)

    def log_mat(m, label):
        w, u = eigh(0.5 * (m + m.conj().T))
        if w.min() < -1e-8:
            raise ValueError(f"{label} is not positive semidefinite "
                             f"(min eigenvalue {w.min():.2e})")
        return (u * np.log(np.clip(w, floor, None))) @ u.conj().T

    return float(np.trace(r @ (log_mat(r, "rho") - log_mat(s, "sigma"))).real)


def entropy_production(generator, rho, rho_ss, step=None, floor=1e-12):
    """Spohn entropy production sigma(rho) = -d/dt S(rho_t | rho_ss) at t=0.

    Symmetric finite difference with Richardson extrapolation; the short
    evolutions use the exact matrix exponential acting on vec(rho).  When
    the backward half of the stencil leaves the state space (rho on the
    boundary, e.g. a pure state, where the semigroup is only defined
    forward) the derivative falls back to the one-sided forward stencil,
    Richardson-extrapolated to the same O(h^2).
    """
    M = generator.matrix.tocsc()
    scale = generator.scale()
    h = step if step is not None else 0.05 / max(scale, 1e-30)
    v0 = _as_state_matrix(rho).reshape(-1)
    dim = generator.hilbert_dim
    ss = _as_state_matrix(rho_ss)

    def entropy_at(t):
        w = expm_multiply(M * t, v0) if t != 0.0 else v0
        r = w.reshape(dim, dim)
        r = 0.5 * (r + r.conj().T)
        return relative_entropy(r, ss, floor=floor)

    def central(hh):
        return (entropy_at(hh) - entropy_at(-hh)) / (2.0 * hh)

    try:
        d1 = central(h)
        d2 = central(0.5 * h)
        return -float((4.0 * d2 - d1) / 3.0)
    except ValueError:
        s0 = entropy_at(0.0)
        d1 = (entropy_at(h) - s0) / h
        d2 = (entropy_at(0.5 * h) - s0) / (0.5 * h)
        return -float(2.0 * d2 - d1)


@dataclass
class SteadyStateReport:
    """Thermodynamic summary of one refrigerator operating point.

    ``entropy_production`` is the steady entropy production rate
    -J_h/T_h - J_c/T_c (the noise acts as an infinite-temperature work
    source, so its entropy flux vanishes); it coincides with
    ``second_law_value`` and must be >= 0 up to numerics.
    """

    solver: str
    params: RefrigeratorParams
    nbar_h: float
    nbar_c: float
    occ_h: float
    occ_c: float
    x3: float
    jc: float
    jh: float
    power: float
    cop_formula: float
    cop_measured: float
    first_law_residual: float
    second_law_value: float
    entropy_production: float
    tail_weight: float
    liouvillian_residual: float | None = None


def law_check(report):
    """(first, second) law residuals: |J_h + J_c + P| and -J_h/T_h - J_c/T_c."""
    first = abs(report.jh + report.jc + report.power)
    second = -report.jh / report.params.temp_h - report.jc / report.params.temp_c
    return first, second


def analytic_report(params):
    """Closed-form steady state from the moment equations (no matrices):

        <X3> = (nbar_h - nbar_c) / (1 + 2 eta (1/gamma_h + 1/gamma_c))
        <n_h> = nbar_h - (2 eta / gamma_h) <X3>
        <n_c> = nbar_c + (2 eta / gamma_c) <X3>
        J_c   = omega_c (nbar_c - nbar_h) / ((2 eta)^-1 + 1/gamma_c + 1/gamma_h)
        J_h   = 2 eta omega_h <X3>,   P = -2 eta (omega_h - omega_c) <X3>
        COP   = omega_c / (omega_h - omega_c)
    """
    nb_h, nb_c = params.nbar_h, params.nbar_c
    x3 = (nb_h - nb_c) / (1.0 + 2.0 * params.eta * (1.0 / params.gamma_h
                                                    + 1.0 / params.gamma_c))
    occ_h = nb_h - (2.0 * params.eta / params.gamma_h) * x3
    occ_c = nb_c + (2.0 * params.eta / params.gamma_c) * x3
    jc = params.omega_c * (nb_c - nb_h) / (1.0 / (2.0 * params.eta)
                                           + 1.0 / params.gamma_c
                                           + 1.0 / params.gamma_h)
    jh = 2.0 * params.eta * params.omega_h * x3
    power = -2.0 * params.eta * (params.omega_h - params.omega_c) * x3
    if params.omega_h == params.omega_c:
        cop_formula = math.nan  # degenerate swap: no work scale
    else:
        cop_formula = params.omega_c / (params.omega_h - params.omega_c)
    cop_measured = jc / power if abs(power) > 1e-300 else math.nan
    second = -jh / params.temp_h - jc / params.temp_c
    return SteadyStateReport(
        solver="formula", params=params, nbar_h=nb_h, nbar_c=nb_c,
        occ_h=occ_h, occ_c=occ_c, x3=x3, jc=jc, jh=jh, power=power,
        cop_formula=cop_formula, cop_measured=cop_measured,
        first_law_residual=abs(jh + jc + power), second_law_value=second,
        entropy_production=second, tail_weight=params.tail_weight())


def refrigerator_liouvillian(params, dim_cap=512):
    """Vectorized generator of the two-mode noise-driven refrigerator."""
    H = build_h0((params.omega_h, params.omega_c))
    return liouvillian_matrix(H, params.baths(), params.noise(),
                              params.cutoff, dim_cap=dim_cap)


def numeric_report(params, dim_cap=512):
    """Steady state of the truncated Liouvillian and the measured
    thermodynamics; see ``analytic_report`` for the closed-form targets."""
    gen = refrigerator_liouvillian(params, dim_cap=dim_cap)
    rho = steady_state(gen)
    baths = params.baths()
    noise = params.noise()
    _, number, _ = mode_matrices(params.cutoff)
    x3 = float((rho.expectation(number[0]) - rho.expectation(number[1])).real)
    occ_h = float(rho.expectation(number[0]).real)
    occ_c = float(rho.expectation(number[1]).real)
    jh = heat_current(baths[0], rho)
    jc = heat_current(baths[1], rho)
    h0 = _as_matrix(build_h0((params.omega_h, params.omega_c)), params.cutoff)
    power = noise_power(noise, h0, rho)
    if params.omega_h == params.omega_c:
        cop_formula = math.nan
    else:
        cop_formula = params.omega_c / (params.omega_h - params.omega_c)
    cop_measured = jc / power if power != 0.0 else math.nan
    second = -jh / params.temp_h - jc / params.temp_c
    return SteadyStateReport(
        solver="liouvillian", params=params, nbar_h=params.nbar_h,
        nbar_c=params.nbar_c, occ_h=occ_h, occ_c=occ_c, x3=x3,
        jc=jc, jh=jh, power=power, cop_formula=cop_formula,
        cop_measured=cop_measured, first_law_residual=abs(jh + jc + power),
        second_law_value=second, entropy_production=second,
        tail_weight=params.tail_weight(), liouvillian_residual=rho.residual)
