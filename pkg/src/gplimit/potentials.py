"""Radial interaction potentials, their scaling transforms, and the smooth
cutoff / annulus profiles used by the soft-potential substitution."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

PROFILES = ("square_well", "smooth_bump", "custom_samples")


class HardCoreError(ValueError):
    """Pointwise evaluation requested for a hard-core potential.

    Hard cores are handled as a boundary condition in the scattering solver,
    never as a sampled amplitude."""


def _bump(t):
    """C-infinity bump exp(1 - 1/(1-t^2)) on |t| < 1, zero outside."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = np.abs(t) < 1.0
    ti = t[inside]
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - ti * ti))
    return out


def smoothstep(t):
    """Degree-5 polynomial smoothstep: 0 for t<=0, 1 for t>=1, C^2 in between."""
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    return t * t * t * (t * (6.0 * t - 15.0) + 10.0)


@dataclass(frozen=True)
class RadialPotential:
    """Non-negative radial potential of finite range R0.

    ``hard_core`` potentials carry R0 as the core radius and reject pointwise
    evaluation; all other profiles are ordinary bounded functions of |x|.
    """

    profile: str
    w0: float = 1.0
    R0: float = 1.0
    hard_core: bool = False
    samples: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self):
        if self.profile not in PROFILES:
            raise ValueError(f"unknown profile {self.profile!r}")
        if self.R0 <= 0:
            raise ValueError("range R0 must be positive")
        if self.w0 < 0:
            raise ValueError("amplitude must be non-negative (repulsive)")
        if self.profile == "custom_samples":
            if not self.samples:
                raise ValueError("custom_samples profile requires samples")
            rs = np.array([r for r, _ in self.samples])
            ws = np.array([w for _, w in self.samples])
            if np.any(np.diff(rs) <= 0) or rs[0] < 0:
                raise ValueError("sample radii must be increasing and >= 0")
            if np.any(ws < 0):
                raise ValueError("sample values must be non-negative")
            object.__setattr__(self, "R0", float(rs[-1]))

    def __call__(self, r):
        return evaluate(self, r)

    def to_json(self) -> str:
        d = {"profile": self.profile, "w0": self.w0, "R0": self.R0,
             "hard_core": self.hard_core}
        if self.samples is not None:
            d["samples"] = [list(p) for p in self.samples]
        return json.dumps(d)

    @staticmethod
    def from_json(text: str) -> "RadialPotential":
        d = json.loads(text)
        samples = d.get("samples")
        return RadialPotential(
            profile=d["profile"], w0=d.get("w0", 1.0), R0=d.get("R0", 1.0),
            hard_core=d.get("hard_core", False),
            samples=tuple(tuple(p) for p in samples) if samples else None)


def square_well(w0: float, R0: float) -> RadialPotential:
    return RadialPotential("square_well", w0=w0, R0=R0)


def smooth_bump(w0: float, R0: float) -> RadialPotential:
    return RadialPotential("smooth_bump", w0=w0, R0=R0)


def hard_core(R0: float) -> RadialPotential:
    return RadialPotential("square_well", w0=0.0, R0=R0, hard_core=True)


def custom_samples(samples) -> RadialPotential:
    return RadialPotential("custom_samples", samples=tuple(tuple(p) for p in samples))


def evaluate(pot: RadialPotential, r):
    """Evaluate w(r); vanishes beyond R0. Rejects hard cores."""
    if pot.hard_core:
        raise HardCoreError("hard-core potential has no pointwise values; "
                            "use the boundary-condition pathway")
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("radius must be non-negative")
    if pot.profile == "square_well":
        return np.where(r < pot.R0, pot.w0, 0.0)
    if pot.profile == "smooth_bump":
        return pot.w0 * _bump(r / pot.R0)
    rs = np.array([p[0] for p in pot.samples])
    ws = np.array([p[1] for p in pot.samples])
    return np.interp(r, rs, ws, right=0.0)


def scale_gp(pot: RadialPotential, N: int) -> RadialPotential:
    """Gross-Pitaevskii scaling w_N(x) = N^2 w(N x): range R0/N, amplitude N^2 w0."""
    return scale_beta(pot, N, 1.0)


def scale_beta(pot: RadialPotential, N: int, beta: float) -> RadialPotential:
    """Dilute-limit family N^{3 beta - 1} w(N^beta x); beta=1 is the GP scaling,
    beta=0 the plain mean-field division by N."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if not 0.0 <= beta <= 1.0:
        raise ValueError("beta must lie in [0, 1]")
    amp = float(N) ** (3.0 * beta - 1.0)
    shrink = float(N) ** (-beta)
    if pot.profile == "custom_samples":
        scaled = tuple((r * shrink, w * amp) for r, w in pot.samples)
        return replace(pot, samples=scaled, R0=pot.R0 * shrink)
    return replace(pot, w0=pot.w0 * amp, R0=pot.R0 * shrink)


def mass_3d(pot: RadialPotential) -> float:
    """3D integral of w: 4 pi int_0^inf w(r) r^2 dr."""
    if pot.hard_core:
        raise HardCoreError("hard-core potential has infinite integral")
    if pot.profile == "square_well":
        return 4.0 * np.pi / 3.0 * pot.w0 * pot.R0**3
    val, _ = quad(lambda r: evaluate(pot, r) * r * r, 0.0, pot.R0, limit=200)
    return 4.0 * np.pi * val


def lp_norm_3d(pot: RadialPotential, p: float) -> float:
    """L^p(R^3) norm of the radial function w."""
    if pot.hard_core:
        raise HardCoreError("hard-core potential has no finite L^p norm")
    val, _ = quad(lambda r: evaluate(pot, r) ** p * r * r, 0.0, pot.R0, limit=200)
    return (4.0 * np.pi * val) ** (1.0 / p)


@dataclass(frozen=True)
class CutoffFunction:
    """Smooth radial switch theta_R: 0 inside |x| <= R, 1 outside |x| >= 2R."""

    R: float

    def __post_init__(self):
        if self.R <= 0:
            raise ValueError("cutoff scale R must be positive")

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return smoothstep(r / self.R - 1.0)


def make_theta(R: float) -> CutoffFunction:
    return CutoffFunction(R)


@lru_cache(maxsize=1)
def _annulus_base_moment() -> float:
    # int_0^inf B((r - 3/4)/(1/4)) r^2 dr for the annulus bump on [1/2, 1]
    val, _ = quad(lambda r: _bump((r - 0.75) / 0.25)[()] * r * r, 0.5, 1.0, limit=200)
    return val


@dataclass(frozen=True)
class AnnulusPotential:
    """Soft replacement potential U_R: supported on R/2 <= |x| <= R with
    3D mass exactly 4 pi a."""

    R: float
    a: float
    _norm: float = field(init=False, repr=False)

    def __post_init__(self):
        if self.R <= 0 or self.a <= 0:
            raise ValueError("R and a must be positive")
        object.__setattr__(self, "_norm", self.a / _annulus_base_moment())

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        t = (r / self.R - 0.75) / 0.25
        return (self._norm / self.R**3) * _bump(t)

    @property
    def mass(self) -> float:
        """3D integral, 4 pi a by construction."""
        return 4.0 * np.pi * self.a

    @property
    def sup_value(self) -> float:
        # peak of the base bump is 1, reached at r = 3R/4
        return self._norm / self.R**3

    def lp_norm_3d(self, p: float) -> float:
        val, _ = quad(lambda r: self(r) ** p * r * r,
                      0.5 * self.R, self.R, limit=200)
        return (4.0 * np.pi * val) ** (1.0 / p)


def make_U(R: float, a: float) -> AnnulusPotential:
    return AnnulusPotential(R, a)
