"""Exactly solvable reduced dynamics for a system coupled to an environment
through a product interaction, plus a brute-force joint-evolution oracle.

Two closed-form models are provided.  In the commuting (dephasing) model the
system coupling has a gapped point spectrum, every intersector block of the
state just picks up the factor chi((l_m - l_n) t), and chi is the Fourier
transform of the environment's spectral weight along the coupling operator.
In the spin model a transverse system field no longer commutes with the
coupling; the reduced state is an average of rigidly rotated polarization
vectors and contracts toward a fixed linear image q = M p of the initial
vector.  The oracle assembles the full joint Hamiltonian on a discretized
environment, evolves unitarily and partial-traces, sharing no code path with
the closed forms.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    DimensionTooLarge,
    NotAState,
    NotDiscrete,
    NotHermitian,
)
from .operators import (
    hs_norm,
    partial_trace_env,
    propagator,
    require_hermitian,
    tensor_product,
)
from .quadrature import gauss_legendre_adaptive, oscillation_panels
from .states import PAULI, DensityOperator, bloch_to_density, trace_distance
from .superselection import SectorStructure, validate_sectors

NORMALIZATION_TOL = 1e-10
GAUSSIAN_TAIL_SIGMAS = 10.0
MAX_DENSE_DIM = 1024


class SpectralDensity:
    """Normalized nonnegative weight over the environment coupling spectrum.

    Continuous kinds: ``gaussian`` (width s), ``uniform`` and ``bump`` on a
    finite support.  The bump is exp(-1/(1-u^2)) mapped onto its support,
    smooth and vanishing to all orders at the endpoints, which is what makes
    arbitrarily fast power-law suppression reachable.  ``discrete`` holds
    explicit (point, weight) pairs and models a finite environment.
    """

    __slots__ = ("kind", "s", "a", "b", "points", "_bump_norm")

    def __init__(self, kind, s=None, a=None, b=None, points=None):
        self.kind = kind
        self.s = s
        self.a = a
        self.b = b
        self.points = points
        self._bump_norm = None
        if kind == "gaussian":
            if not s > 0:
                raise ValueError("gaussian width must be positive")
        elif kind in ("uniform", "bump"):
            if not b > a:
                raise ValueError(f"support must satisfy b > a, got [{a}, {b}]")
            if kind == "bump":
                # Gauss-Legendre nodes are interior, so 1 - u^2 never hits 0.
                plain = gauss_legendre_adaptive(
                    lambda u: np.exp(-1.0 / (1.0 - u**2)), -1.0, 1.0, tol=1e-13
                )
                self._bump_norm = 1.0 / (float(np.real(plain)) * (b - a) / 2.0)
        elif kind == "discrete":
            pts = np.asarray(points, dtype=float)
            if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] == 0:
                raise ValueError("discrete points must be a nonempty sequence of (v, w) pairs")
            if np.any(np.diff(pts[:, 0]) <= 0):
                raise ValueError("discrete points must be sorted by v and distinct")
            if pts[:, 1].min() < 0:
                raise ValueError("discrete weights must be nonnegative")
            if abs(pts[:, 1].sum() - 1.0) > NORMALIZATION_TOL:
                raise ValueError(f"discrete weights sum to {pts[:, 1].sum()!r}, not 1")
            self.points = pts
        else:
            raise ValueError(f"unknown spectral density kind {kind!r}")

    @classmethod
    def gaussian(cls, s: float) -> "SpectralDensity":
        return cls("gaussian", s=float(s))

    @classmethod
    def uniform(cls, a: float, b: float) -> "SpectralDensity":
        return cls("uniform", a=float(a), b=float(b))

    @classmethod
    def bump(cls, a: float, b: float) -> "SpectralDensity":
        return cls("bump", a=float(a), b=float(b))

    @classmethod
    def discrete(cls, points) -> "SpectralDensity":
        return cls("discrete", points=points)

    @property
    def is_discrete(self) -> bool:
        return self.kind == "discrete"

    def support(self):
        """Interval carrying (numerically) all of the weight."""
        if self.kind == "gaussian":
            r = GAUSSIAN_TAIL_SIGMAS * self.s
            return (-r, r)
        if self.kind == "discrete":
            return (float(self.points[0, 0]), float(self.points[-1, 0]))
        return (self.a, self.b)

    def density(self, v):
        """Weight density at v; vectorized, zero outside the support."""
        v = np.asarray(v, dtype=float)
        if self.kind == "gaussian":
            return np.exp(-(v**2) / (2.0 * self.s**2)) / (self.s * np.sqrt(2.0 * np.pi))
        if self.kind == "uniform":
            inside = (v >= self.a) & (v <= self.b)
            return np.where(inside, 1.0 / (self.b - self.a), 0.0)
        if self.kind == "bump":
            u = (2.0 * v - self.a - self.b) / (self.b - self.a)
            inside = np.abs(u) < 1.0
            safe = np.where(inside, u, 0.0)
            return np.where(inside, self._bump_norm * np.exp(-1.0 / (1.0 - safe**2)), 0.0)
        raise NotDiscrete("a discrete density has weights, not a density function")

    def discretize(self, n: int) -> "SpectralDensity":
        """Discrete density on n Gauss-Legendre nodes of the support.

        Weights are the quadrature weights times the density, renormalized so
        they sum to one exactly.
        """
        if self.is_discrete:
            raise ValueError("density is already discrete")
        if n < 2:
            raise ValueError("need at least 2 grid points")
        x, w = np.polynomial.legendre.leggauss(int(n))
        lo, hi = self.support()
        v = (hi + lo) / 2.0 + (hi - lo) / 2.0 * x
        weights = w * (hi - lo) / 2.0 * self.density(v)
        weights = weights / weights.sum()
        return SpectralDensity.discrete(np.column_stack([v, weights]))

    def __repr__(self):
        if self.kind == "gaussian":
            return f"SpectralDensity.gaussian(s={self.s!r})"
        if self.kind == "discrete":
            return f"SpectralDensity.discrete(<{self.points.shape[0]} points>)"
        return f"SpectralDensity.{self.kind}(a={self.a!r}, b={self.b!r})"


def decoherence_function(env: SpectralDensity, t: float, tol: float = 1e-9) -> complex:
    """Environment overlap chi(t): the Fourier transform of the density.

    chi(0) = 1 and |chi(t)| <= 1 for every density; its decay rate is what
    suppresses intersector coherence.  Continuous kinds are integrated with
    adaptive Gauss-Legendre panels pre-split for the oscillation rate |t|.
    """
    t = float(t)
    if env.is_discrete:
        v = env.points[:, 0]
        w = env.points[:, 1]
        return complex(np.sum(w * np.exp(-1j * v * t)))
    lo, hi = env.support()
    n0 = oscillation_panels(lo, hi, abs(t))
    value = gauss_legendre_adaptive(
        lambda v: env.density(v) * np.exp(-1j * v * t), lo, hi, tol=tol, initial_panels=n0
    )
    return complex(value)


def recurrence_window(env: SpectralDensity) -> float:
    """Conservative revival time 2 pi / (max adjacent point spacing).

    A finite environment makes chi almost periodic, so decay statements only
    hold up to this horizon; for an equally spaced grid it is the exact
    revival time.
    """
    if not env.is_discrete:
        raise NotDiscrete("recurrence windows only exist for discrete spectra")
    v = env.points[:, 0]
    if v.size < 2:
        return float("inf")
    return float(2.0 * np.pi / np.max(np.diff(v)))


@dataclass(frozen=True, eq=False)
class ArakiZurekModel:
    """Dephasing model: gapped point-spectrum coupling, commuting free part.

    ``lambdas`` are the coupling eigenvalues on the sectors, separated
    pairwise by at least ``delta``; ``h_s`` must commute with every sector
    projector.  The environment enters reduced quantities only through chi.
    """

    sectors: SectorStructure
    lambdas: np.ndarray
    h_s: np.ndarray
    env: SpectralDensity
    delta: float

    def __post_init__(self):
        validate_sectors(self.sectors)
        lambdas = np.asarray(self.lambdas, dtype=float)
        if lambdas.ndim != 1 or lambdas.size != len(self.sectors):
            raise DimensionMismatch("need one coupling eigenvalue per sector")
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        gaps = np.abs(lambdas[:, None] - lambdas[None, :])
        off = gaps[~np.eye(lambdas.size, dtype=bool)]
        if off.size and off.min() < self.delta:
            raise ValueError(
                f"eigenvalue gap {off.min():g} is below the declared delta {self.delta:g}"
            )
        h_s = require_hermitian(self.h_s, name="system Hamiltonian")
        if h_s.shape[0] != self.sectors.dim:
            raise DimensionMismatch("system Hamiltonian dimension does not match sectors")
        tol = 1e-10 * max(1.0, hs_norm(h_s))
        for m, p in enumerate(self.sectors.projectors):
            if hs_norm(h_s @ p - p @ h_s) > tol:
                raise ValueError(
                    f"system Hamiltonian does not commute with sector projector {m}"
                )
        object.__setattr__(self, "lambdas", lambdas)
        object.__setattr__(self, "h_s", h_s)

    @property
    def dim(self) -> int:
        return self.sectors.dim

    @property
    def v_s(self) -> np.ndarray:
        """Coupling operator rebuilt from its eigenvalues and projectors."""
        total = np.zeros((self.dim, self.dim), dtype=complex)
        for lam, p in zip(self.lambdas, self.sectors.projectors):
            total += lam * p
        return total


def _az_blocks(model: ArakiZurekModel, rho, t: float, chi_fn) -> np.ndarray:
    """sum_{m,n} chi((l_m - l_n) t) P_m rho P_n, conjugate-symmetric in chi."""
    projectors = model.sectors.projectors
    k = len(projectors)
    out = np.zeros_like(rho)
    for m in range(k):
        out += projectors[m] @ rho @ projectors[m]
    for m in range(k):
        for n in range(m + 1, k):
            chi = chi_fn((model.lambdas[m] - model.lambdas[n]) * t)
            block = projectors[m] @ rho @ projectors[n]
            out += chi * block + np.conj(chi) * block.conj().T
    return out


def az_evolve(model: ArakiZurekModel, rho0: DensityOperator, t: float,
              tol: float = 1e-9) -> DensityOperator:
    """Reduced state at time t for a factorized initial state.

    Each intersector block of rho0 is damped by chi((l_m - l_n) t) and the
    whole result is conjugated by exp(-i h_s t).  Diagonal blocks carry
    chi(0) = 1, so sector probabilities are conserved exactly.
    """
    if rho0.dim != model.dim:
        raise DimensionMismatch(f"state dim {rho0.dim} does not match model dim {model.dim}")
    damped = _az_blocks(model, rho0.matrix, t, lambda tau: decoherence_function(model.env, tau, tol))
    u = propagator(model.h_s, t)
    return DensityOperator(u @ damped @ u.conj().T)


@dataclass(frozen=True, eq=False)
class CorrelatedInitialState:
    """Initial joint state sum_mu rho_mu x omega_mu with classical S-E correlations.

    The system parts rho_mu are Hermitian but need not be positive on their
    own; only their sum must be a state.
    """

    terms: tuple

    def __post_init__(self):
        if not self.terms:
            raise NotAState("need at least one (rho_mu, omega_mu) term")
        cooked = []
        for i, (rho_mu, env_mu) in enumerate(self.terms):
            try:
                mat = require_hermitian(rho_mu, name=f"term {i} system part")
            except NotHermitian as exc:
                raise NotAState(str(exc)) from exc
            if not isinstance(env_mu, SpectralDensity):
                raise NotAState(f"term {i} environment part must be a SpectralDensity")
            cooked.append((mat, env_mu))
        dims = {mat.shape[0] for mat, _ in cooked}
        if len(dims) != 1:
            raise DimensionMismatch("system parts must share a dimension")
        total = sum(mat for mat, _ in cooked)
        DensityOperator(total)  # raises NotAState when the sum is not a state
        object.__setattr__(self, "terms", tuple(cooked))

    @property
    def reduced(self) -> DensityOperator:
        """The reduced system state sum_mu rho_mu at time zero."""
        return DensityOperator(sum(mat for mat, _ in self.terms))


def az_evolve_correlated(model: ArakiZurekModel, w0: CorrelatedInitialState, t: float,
                         tol: float = 1e-9) -> DensityOperator:
    """Reduced dephasing dynamics from a correlated initial state.

    Applies the factorized formula termwise, each term with the chi of its
    own environment part.  Sector emergence survives as long as the summed
    chi contributions still decay, which is why the induced structure is not
    sensitive to the initial conditions.
    """
    total = np.zeros((model.dim, model.dim), dtype=complex)
    for rho_mu, env_mu in w0.terms:
        if rho_mu.shape[0] != model.dim:
            raise DimensionMismatch("initial-state terms do not match the model dimension")
        total += _az_blocks(model, rho_mu, t, lambda tau: decoherence_function(env_mu, tau, tol))
    u = propagator(model.h_s, t)
    return DensityOperator(u @ total @ u.conj().T)


@dataclass(frozen=True, eq=False)
class SpinModel:
    """Spin-1/2 in a field ``a`` coupled through sigma_3 to a continuum.

    The environment Hamiltonian coefficient ``b`` multiplies the square of
    the position-like coordinate; it commutes with the coupling, drops out
    of every reduced quantity, and is kept only so the oracle can verify the
    cancellation.  ``env_diag`` is the diagonal kernel of the environment
    state in that coordinate.
    """

    a: np.ndarray
    b: float
    lam: float
    env_diag: SpectralDensity

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        if a.shape != (3,) or not np.all(np.isfinite(a)):
            raise ValueError("field must be a finite 3-vector")
        if not self.b > 0:
            raise ValueError("environment frequency coefficient b must be positive")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "lam", float(self.lam))

    @property
    def h_s(self) -> np.ndarray:
        return self.a[0] * PAULI[0] + self.a[1] * PAULI[1] + self.a[2] * PAULI[2]


def _fields(model: SpinModel, x: np.ndarray):
    """Effective field (a_1, a_2, a_3 + lam x) and its norm, per point."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    h = np.empty((x.size, 3))
    h[:, 0] = model.a[0]
    h[:, 1] = model.a[1]
    h[:, 2] = model.a[2] + model.lam * x
    norms = np.linalg.norm(h, axis=1)
    return h, norms


def _axes(model: SpinModel, x: np.ndarray):
    h, norms = _fields(model, x)
    n = np.empty_like(h)
    zero = norms == 0.0
    safe = np.where(zero, 1.0, norms)
    n[:] = h / safe[:, None]
    n[zero] = (0.0, 0.0, 1.0)
    return n, 2.0 * norms


def rotation_axis(model: SpinModel, x: float):
    """Rotation axis and angular speed of the conditional spin precession.

    The conditional evolution at environment coordinate x is generated by
    the 2x2 field a.sigma + lam x sigma_3; the induced rotation of the
    polarization vector has axis along that field and speed twice its norm
    (the usual spin-to-rotation angle doubling).  A vanishing field returns
    speed zero with axis e_3 by convention.
    """
    n, omega = _axes(model, np.array([float(x)]))
    return n[0], float(omega[0])


def _rotated(model: SpinModel, x: np.ndarray, t: float, p: np.ndarray) -> np.ndarray:
    """Rodrigues rotation of p about n(x) by angle omega(x) t, shape (m, 3)."""
    n, omega = _axes(model, x)
    phi = omega * float(t)
    c = np.cos(phi)[:, None]
    s = np.sin(phi)[:, None]
    along = (n @ p)[:, None] * n
    return c * p[None, :] + (1.0 - c) * along + s * np.cross(n, p[None, :])


def _averaged_rotation(model: SpinModel, t: float, p: np.ndarray, tol: float) -> np.ndarray:
    """Density-weighted average of the rotated polarization vector."""
    env = model.env_diag
    if env.is_discrete:
        x = env.points[:, 0]
        w = env.points[:, 1]
        return w @ _rotated(model, x, t, p)
    lo, hi = env.support()
    rate = 2.0 * abs(model.lam) * abs(t)
    n0 = oscillation_panels(lo, hi, rate)

    def integrand(x):
        return env.density(x)[:, None] * _rotated(model, x, t, p)

    return np.real(gauss_legendre_adaptive(integrand, lo, hi, tol=tol, initial_panels=n0))


def spin_evolve(model: SpinModel, p, t: float, tol: float = 1e-9) -> DensityOperator:
    """Reduced spin state at time t: the average of rotated polarizations.

    Conditioned on the environment coordinate x the spin precesses rigidly;
    the reduced state is the density-weighted average of those rotations
    applied to p, evaluated by quadrature (or exactly for a discrete
    environment).
    """
    p = np.asarray(p, dtype=float)
    avg = _averaged_rotation(model, t, p, tol)
    return bloch_to_density(avg)


def asymptotic_map(model: SpinModel, tol: float = 1e-9) -> np.ndarray:
    """Long-time contraction map M = avg of n(x) n(x)^T over the density.

    Oscillating parts of the conditional rotations dephase away and only the
    projections onto the local axes survive.  M is a symmetric contraction:
    a density-weighted average of rank-one projectors, so its eigenvalues
    lie in [0, 1].
    """
    env = model.env_diag
    if env.is_discrete:
        x = env.points[:, 0]
        w = env.points[:, 1]
        n, _ = _axes(model, x)
        return np.einsum("m,mi,mj->ij", w, n, n)
    lo, hi = env.support()

    def integrand(x):
        n, _ = _axes(model, x)
        return env.density(x)[:, None, None] * (n[:, :, None] * n[:, None, :])

    return np.real(gauss_legendre_adaptive(integrand, lo, hi, tol=tol, initial_panels=8))


def spin_asymptotics(model: SpinModel, p, t_grid, tol: float = 1e-9) -> np.ndarray:
    """Trace distances from the asymptotic state along a time grid.

    Returns (t, distance) rows measuring how far the evolved state still is
    from the contracted target q = M p; ready for ``fit_power_law_decay``.
    """
    p = np.asarray(p, dtype=float)
    target = bloch_to_density(asymptotic_map(model, tol) @ p)
    rows = np.empty((len(t_grid), 2))
    for i, t in enumerate(t_grid):
        rows[i, 0] = t
        rows[i, 1] = trace_distance(spin_evolve(model, p, t, tol), target)
    return rows


def _oracle_env(env: SpectralDensity, n_grid: int):
    if env.is_discrete:
        if env.points.shape[0] != n_grid:
            raise DimensionMismatch(
                f"discrete environment has {env.points.shape[0]} points, n_grid was {n_grid}"
            )
        return env.points[:, 0], env.points[:, 1]
    grid = env.discretize(n_grid)
    return grid.points[:, 0], grid.points[:, 1]


def full_simulation_oracle(model, rho0: DensityOperator, t: float, n_grid: int) -> DensityOperator:
    """Ground-truth reduced state from brute-force joint unitary evolution.

    Assembles the joint Hamiltonian on system x (n_grid-point environment),
    evolves rho0 x omega with the exact matrix exponential and traces out
    the environment.  No closed forms enter, so agreement with ``az_evolve``
    or ``spin_evolve`` validates those paths end to end.
    """
    if n_grid < 2:
        raise ValueError("n_grid must be at least 2")
    if isinstance(model, ArakiZurekModel):
        dim_s = model.dim
    elif isinstance(model, SpinModel):
        dim_s = 2
    else:
        raise TypeError(f"no oracle for model type {type(model).__name__}")
    if rho0.dim != dim_s:
        raise DimensionMismatch(f"initial state dim {rho0.dim} does not match system dim {dim_s}")
    if dim_s * n_grid > MAX_DENSE_DIM:
        raise DimensionTooLarge(f"joint dimension {dim_s * n_grid} exceeds {MAX_DENSE_DIM}")

    if isinstance(model, ArakiZurekModel):
        v, w = _oracle_env(model.env, n_grid)
        h_joint = tensor_product(model.h_s, np.eye(v.size)) + tensor_product(
            model.v_s, np.diag(v)
        )
    else:
        v, w = _oracle_env(model.env_diag, n_grid)
        h_joint = (
            tensor_product(model.h_s, np.eye(v.size))
            + model.b * tensor_product(np.eye(2), np.diag(v**2))
            + model.lam * tensor_product(PAULI[2], np.diag(v))
        )
    w0 = tensor_product(rho0.matrix, np.diag(w.astype(complex)))
    u = propagator(h_joint, t)
    reduced = partial_trace_env(u @ w0 @ u.conj().T, dim_s, v.size)
    return DensityOperator(reduced)
