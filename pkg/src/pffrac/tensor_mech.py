"""Symmetric 2x2 tensor algebra and the split elastic energy density.

The energy density degrades only the deviatoric and tensile-volumetric
strain contributions, so compression never drives damage:

    W(z, E) = h(z) * (mu |E_d|^2 + kappa |E_v+|^2) + kappa |E_v-|^2

with E_v = (tr E / 2) I, E_d = E - E_v, and E_v+/- built from the positive
and negative parts of tr E.  Everything here is exact scalar arithmetic on
the three independent components (xx, yy, xy); Frobenius norms carry the
2*xy^2 off-diagonal weight so the split identities hold to round-off.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

__all__ = [
    "SymTensor2",
    "MaterialModel",
    "default_material",
    "vol_dev_split",
    "tensile_compressive",
    "energy_density_W",
    "stress_dW",
    "dW_dz",
]


@dataclass(frozen=True)
class SymTensor2:
    """Symmetric 2x2 tensor stored as its three independent components."""

    xx: float
    yy: float
    xy: float

    def trace(self) -> float:
        return self.xx + self.yy

    def norm2(self) -> float:
        """Squared Frobenius norm, |T|^2 = xx^2 + yy^2 + 2 xy^2."""
        return self.xx * self.xx + self.yy * self.yy + 2.0 * self.xy * self.xy

    def norm(self) -> float:
        return math.sqrt(self.norm2())

    def dot(self, other: "SymTensor2") -> float:
        """Frobenius inner product T : S."""
        return self.xx * other.xx + self.yy * other.yy + 2.0 * self.xy * other.xy

    def __add__(self, other: "SymTensor2") -> "SymTensor2":
        return SymTensor2(self.xx + other.xx, self.yy + other.yy, self.xy + other.xy)

    def __sub__(self, other: "SymTensor2") -> "SymTensor2":
        return SymTensor2(self.xx - other.xx, self.yy - other.yy, self.xy - other.xy)

    def scaled(self, a: float) -> "SymTensor2":
        return SymTensor2(a * self.xx, a * self.yy, a * self.xy)

    @staticmethod
    def identity() -> "SymTensor2":
        return SymTensor2(1.0, 1.0, 0.0)

    @staticmethod
    def zero() -> "SymTensor2":
        return SymTensor2(0.0, 0.0, 0.0)


def _default_h(eta: float) -> tuple[Callable[[float], float], Callable[[float], float], Callable[[float], float]]:
    # h(z) = z^2 + eta: convex, h >= h(0) = eta > 0, mirrors the classic
    # Ambrosio-Tortorelli stiffness factor.
    return (lambda z: z * z + eta, lambda z: 2.0 * z, lambda z: 2.0)


def _default_f() -> tuple[Callable[[float], float], Callable[[float], float], Callable[[float], float]]:
    # f(z) = (z - 1)^2: strongly convex with modulus 2, minimum f(1) = 0.
    return (lambda z: (z - 1.0) ** 2, lambda z: 2.0 * (z - 1.0), lambda z: 2.0)


@dataclass(frozen=True)
class MaterialModel:
    """Elastic moduli plus the two degradation functions and derivatives.

    Parameters
    ----------
    mu, kappa : float
        Shear modulus and kappa = lambda + mu, both > 0.
    h, h1, h2 : callables
        Stiffness degradation factor, its first and (generalized) second
        derivative.  h must be convex with h(z) >= h(0) > 0.
    f, f1, f2 : callables
        Phase-field well, its derivatives.  f must be strongly convex with
        0 <= f(1) <= f(z).
    f_convexity : float
        Strong-convexity modulus of f (a lower bound on f'').
    """

    mu: float
    kappa: float
    h: Callable[[float], float]
    h1: Callable[[float], float]
    h2: Callable[[float], float]
    f: Callable[[float], float]
    f1: Callable[[float], float]
    f2: Callable[[float], float]
    f_convexity: float = 2.0

    def __post_init__(self):
        if self.mu <= 0.0 or self.kappa <= 0.0:
            raise ValueError("moduli mu and kappa must be positive")
        if self.f_convexity <= 0.0:
            raise ValueError("f must be strongly convex (positive modulus)")

    def validate_sampling(self, lo: float = -1.0, hi: float = 2.0, n: int = 301) -> None:
        """Sample the degradation hypotheses on [lo, hi]; raise on violation."""
        h0 = self.h(0.0)
        if not h0 > 0.0:
            raise ValueError("h(0) must be positive")
        f1v = self.f(1.0)
        if f1v < 0.0:
            raise ValueError("f(1) must be nonnegative")
        step = (hi - lo) / (n - 1)
        prev_h1 = None
        for i in range(n):
            z = lo + i * step
            if self.h(z) < h0 - 1e-12:
                raise ValueError(f"h({z}) < h(0): degradation floor violated")
            if self.f(z) < f1v - 1e-12:
                raise ValueError(f"f({z}) < f(1): well minimum violated")
            d = self.h1(z)
            if prev_h1 is not None and d < prev_h1 - 1e-12:
                raise ValueError("h' not nondecreasing: h is not convex")
            prev_h1 = d


def default_material(mu: float = 1.0, kappa: float = 1.0, eta: float = 1e-2) -> MaterialModel:
    """Material with h(z) = z^2 + eta and f(z) = (z - 1)^2."""
    h, h1, h2 = _default_h(eta)
    f, f1, f2 = _default_f()
    return MaterialModel(mu=mu, kappa=kappa, h=h, h1=h1, h2=h2, f=f, f1=f1, f2=f2, f_convexity=2.0)


def vol_dev_split(E: SymTensor2) -> tuple[SymTensor2, SymTensor2]:
    """Split E into volumetric E_v = (tr E / 2) I and deviatoric E_d = E - E_v."""
    half_tr = 0.5 * E.trace()
    ev = SymTensor2(half_tr, half_tr, 0.0)
    return ev, E - ev


def tensile_compressive(E: SymTensor2) -> tuple[SymTensor2, SymTensor2]:
    """Tensile and compressive volumetric parts; at most one is nonzero."""
    tr = E.trace()
    pos = 0.5 * max(tr, 0.0)
    neg = 0.5 * max(-tr, 0.0)
    return SymTensor2(pos, pos, 0.0), SymTensor2(neg, neg, 0.0)


def energy_density_W(z: float, E: SymTensor2, m: MaterialModel) -> float:
    """Split energy density; independent of z for pure compression."""
    _, ed = vol_dev_split(E)
    evp, evm = tensile_compressive(E)
    return m.h(z) * (m.mu * ed.norm2() + m.kappa * evp.norm2()) + m.kappa * evm.norm2()


def stress_dW(z: float, E: SymTensor2, m: MaterialModel) -> SymTensor2:
    """Strain gradient of W: 2 h(z) (mu E_d + kappa E_v+) - 2 kappa E_v-.

    Piecewise linear in E, continuous across the tr E = 0 kink.
    """
    _, ed = vol_dev_split(E)
    evp, evm = tensile_compressive(E)
    hz = m.h(z)
    t = ed.scaled(2.0 * hz * m.mu) + evp.scaled(2.0 * hz * m.kappa)
    return t - evm.scaled(2.0 * m.kappa)


def dW_dz(z: float, E: SymTensor2, m: MaterialModel) -> float:
    """z-derivative of W: h'(z) (mu |E_d|^2 + kappa |E_v+|^2)."""
    _, ed = vol_dev_split(E)
    evp, _ = tensile_compressive(E)
    return m.h1(z) * (m.mu * ed.norm2() + m.kappa * evp.norm2())
