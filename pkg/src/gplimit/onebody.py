"""Discretized one-body operators on a periodic box: the magnetic
Schroedinger operator h = (p + A)^2 + V, the high-momentum cutoff p^2
theta_s(p), and the shifted operator with its ground-level constant."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import eigen
from .potentials import smoothstep


class ConfinementError(RuntimeError):
    """Ground-state mass leaking into the outer shell of the box; the box is
    too small for the requested fields."""


@dataclass(frozen=True)
class Grid:
    """Uniform periodic sampling of [-L, L)^d with n points per axis."""

    d: int
    L: float
    n: int

    def __post_init__(self):
        if self.d not in (1, 2, 3):
            raise ValueError("dimension must be 1, 2 or 3")
        if self.n < 2 or (self.n & (self.n - 1)) != 0:
            raise ValueError("points per axis must be a power of two")
        if self.L <= 0:
            raise ValueError("box half-width must be positive")

    @property
    def dx(self) -> float:
        return 2.0 * self.L / self.n

    @property
    def shape(self) -> tuple:
        return (self.n,) * self.d

    @property
    def size(self) -> int:
        return self.n**self.d

    @property
    def weight(self) -> float:
        """Quadrature weight of one grid cell."""
        return self.dx**self.d

    @cached_property
    def x_axis(self) -> np.ndarray:
        return -self.L + self.dx * np.arange(self.n)

    @cached_property
    def k_axis(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.dx)

    def coords(self) -> list:
        """Sparse meshgrid of coordinates, broadcastable to ``shape``."""
        return list(np.meshgrid(*([self.x_axis] * self.d),
                                indexing="ij", sparse=True))

    @cached_property
    def radius2(self) -> np.ndarray:
        r2 = np.zeros(self.shape)
        for c in self.coords():
            r2 = r2 + c * c
        return r2

    @cached_property
    def k2(self) -> np.ndarray:
        out = np.zeros(self.shape)
        for ax in range(self.d):
            shape = [1] * self.d
            shape[ax] = self.n
            out = out + (self.k_axis**2).reshape(shape)
        return out

    @cached_property
    def kmag(self) -> np.ndarray:
        return np.sqrt(self.k2)

    @property
    def k_max(self) -> float:
        """Largest per-axis momentum on the lattice."""
        return float(np.pi / self.L * (self.n // 2))

    def inner(self, u, v) -> complex:
        return complex(np.vdot(u, v) * self.weight)

    def norm(self, u) -> float:
        return float(np.sqrt(np.vdot(u, u).real * self.weight))

    def integrate(self, f) -> float:
        return float(np.sum(f).real * self.weight)


@dataclass(frozen=True)
class FieldConfig:
    """One-body fields: confining potential V >= 0 and vector potential A."""

    V_kind: str = "harmonic"         # harmonic | zero | custom_samples
    V_stiffness: float = 1.0
    V_samples: np.ndarray | None = None
    A_kind: str = "zero"             # zero | rotation | custom_samples
    omega: float = 0.0
    A_samples: tuple | None = None   # one array per axis

    def potential(self, grid: Grid) -> np.ndarray:
        if self.V_kind == "harmonic":
            return self.V_stiffness * grid.radius2
        if self.V_kind == "zero":
            return np.zeros(grid.shape)
        if self.V_kind == "custom_samples":
            V = np.asarray(self.V_samples, dtype=float)
            if V.shape != grid.shape:
                raise ValueError("V samples do not match the grid")
            if np.any(V < 0):
                raise ValueError("V must be non-negative")
            return V
        raise ValueError(f"unknown V_kind {self.V_kind!r}")

    def vector_potential(self, grid: Grid) -> list | None:
        if self.A_kind == "zero":
            return None
        if self.A_kind == "rotation":
            if grid.d < 2:
                raise ValueError("rotation field needs d >= 2")
            c = grid.coords()
            zeros = np.zeros(grid.shape)
            A = [-self.omega * (zeros + c[1]), self.omega * (zeros + c[0])]
            if grid.d == 3:
                A.append(zeros)
            return A
        if self.A_kind == "custom_samples":
            A = [np.asarray(a, dtype=float) for a in self.A_samples]
            if len(A) != grid.d or any(a.shape != grid.shape for a in A):
                raise ValueError("A samples do not match the grid")
            return A
        raise ValueError(f"unknown A_kind {self.A_kind!r}")


@dataclass
class OperatorHandle:
    """Matrix-free Hermitian operator acting on grid functions."""

    grid: Grid
    apply: callable = field(repr=False)
    hermitian: bool = True
    lower_bound: float | None = None
    label: str = ""

    def __call__(self, u):
        return self.apply(u)

    def expectation(self, u) -> float:
        return self.grid.inner(u, self.apply(u)).real

    def apply_flat(self, v):
        return self.apply(v.reshape(self.grid.shape)).ravel()

    def to_dense(self) -> np.ndarray:
        dim = self.grid.size
        out = np.empty((dim, dim), dtype=complex)
        e = np.zeros(dim, dtype=complex)
        for j in range(dim):
            e[j] = 1.0
            out[:, j] = self.apply_flat(e)
            e[j] = 0.0
        return out


@dataclass(frozen=True)
class SpectralCutoff:
    """Momentum multiplier theta_s(|p|): 0 below s, 1 above 2s."""

    eps: float
    s: float

    def __post_init__(self):
        if not 0.0 < self.eps < 1.0:
            raise ValueError("eps must lie in (0, 1)")
        if self.s <= 0:
            raise ValueError("s must be positive")

    def multiplier(self, grid: Grid) -> np.ndarray:
        return smoothstep(grid.kmag / self.s - 1.0)


def _fft_multiplier(mult, u):
    return np.fft.ifftn(mult * np.fft.fftn(u))


def build_h(grid: Grid, fields: FieldConfig) -> OperatorHandle:
    """h = (p + A)^2 + V applied spectrally: p^2 u + A.(p u) + p.(A u)
    + |A|^2 u + V u."""
    V = fields.potential(grid)
    A = fields.vector_potential(grid)
    k2 = grid.k2
    if A is None:
        def apply(u):
            return _fft_multiplier(k2, u) + V * u
        return OperatorHandle(grid=grid, apply=apply, lower_bound=0.0,
                              label="h")

    A2 = np.zeros(grid.shape)
    for a in A:
        A2 = A2 + a * a
    k_parts = []
    for ax in range(grid.d):
        shape = [1] * grid.d
        shape[ax] = grid.n
        k_parts.append(grid.k_axis.reshape(shape))

    def apply(u):
        uk = np.fft.fftn(u)
        out = np.fft.ifftn(k2 * uk) + (V + A2) * u
        for ax in range(grid.d):
            pu = np.fft.ifftn(k_parts[ax] * uk)
            out = out + A[ax] * pu
            out = out + np.fft.ifftn(k_parts[ax] * np.fft.fftn(A[ax] * u))
        return out

    return OperatorHandle(grid=grid, apply=apply, label="h")


def lowest_eigenpairs(op: OperatorHandle, k: int, tol: float = 1e-9,
                      force_iterative: bool = False, seed: int = 7,
                      max_krylov: int | None = None):
    """k smallest eigenpairs of a Hermitian operator handle.

    Dense diagonalization below ``eigen.DENSE_CUTOFF`` grid points, block
    Lanczos with full reorthogonalization above.  Returns a list of
    (value, grid-shaped vector) with orthonormal vectors.
    """
    if not op.hermitian:
        raise ValueError("operator must be declared self-adjoint")
    dim = op.grid.size
    if dim <= eigen.DENSE_CUTOFF and not force_iterative:
        result = eigen.dense_lowest(op.to_dense(), k)
    else:
        result = eigen.block_lanczos_lowest(
            op.apply_flat, dim, k, tol=tol, max_krylov=max_krylov,
            rng=np.random.default_rng(seed))
        if np.any(result.residuals > tol):
            raise eigen.EigensolverError("residual above tolerance",
                                         float(result.residuals.max()))
    shape = op.grid.shape
    scale = 1.0 / np.sqrt(op.grid.weight)  # columns are unit in grid L2
    return [(float(result.values[j]),
             result.vectors[:, j].reshape(shape) * scale)
            for j in range(min(k, result.vectors.shape[1]))]


def build_htilde(grid: Grid, fields: FieldConfig, eps: float, s: float,
                 tol: float = 1e-10):
    """Shifted operator h - (1-eps) p^2 theta_s(p) - kappa with
    kappa = inf spec(h - (1-eps) p^2 theta_s(p) - 1), so min spec = 1."""
    cutoff = SpectralCutoff(eps, s)
    mult = (1.0 - eps) * grid.k2 * cutoff.multiplier(grid)
    h = build_h(grid, fields)

    def apply_base(u):
        return h.apply(u) - _fft_multiplier(mult, u)

    base = OperatorHandle(grid=grid, apply=apply_base, label="h-cut")
    kappa = lowest_eigenpairs(base, 1, tol=tol)[0][0] - 1.0

    def apply(u):
        return apply_base(u) - kappa * u

    handle = OperatorHandle(grid=grid, apply=apply, lower_bound=1.0,
                            label=f"htilde(eps={eps},s={s})")
    return handle, float(kappa)


def boundary_mass(grid: Grid, u) -> float:
    """L2 mass of u in the outer 10% shell of the box."""
    mask = np.zeros(grid.shape, dtype=bool)
    for ax, c in enumerate(grid.coords()):
        mask |= np.broadcast_to(np.abs(c) >= 0.9 * grid.L, grid.shape)
    total = grid.integrate(np.abs(u) ** 2)
    return float(grid.integrate(np.where(mask, np.abs(u) ** 2, 0.0)) / total)


def check_confinement(grid: Grid, u, threshold: float = 1e-8):
    m = boundary_mass(grid, u)
    if m > threshold:
        raise ConfinementError(
            f"boundary shell holds {m:.2e} of the mass (limit {threshold:g}); "
            "enlarge the box")
    return m
