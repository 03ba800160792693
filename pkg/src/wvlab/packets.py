"""Exact algebra of one-dimensional complex Gaussian wave packets.

A packet is stored as the coefficient triple (a, b, c) of

    chi(x) = exp(a*x**2 + b*x + c),      Re(a) < 0,

which is closed under Fourier transform, free evolution, Galilean
boost, translation and reflection.  Every operation below is therefore
an exact coefficient map -- no quadrature appears anywhere on this
path, which is what makes it usable as the analytic side of an
analytic/grid cross-check.

The standard constructors build the moving pair

    f_pm(x) = (2 dk_f^2 / pi)^(1/4) exp(i (k0 +- k1) x) exp(-x^2 dk_f^2)

centred at the origin with mean wavenumbers k0 +- k1, and the resting
packet

    g(x) = (2 dk_g^2 / pi)^(1/4) exp(-(x - x0)^2 dk_g^2)

centred at x0 with zero mean momentum.  The pair overlap is
<f_+|f_-> = exp(-k1^2 / (2 dk_f^2)) in closed form.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PhysicalConstants",
    "PacketRecipe",
    "ComplexGaussian",
    "DEFAULT_CONSTANTS",
    "make_f",
    "make_g",
    "fourier_transform",
    "inverse_fourier_transform",
    "inner_product",
    "momentum_moment",
    "free_evolve",
    "galilean_boost",
    "translate",
    "reflect",
    "f_pair_overlap",
]


@dataclass(frozen=True)
class PhysicalConstants:
    """Units of action and mass; defaults give dimensionless internals."""

    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        if not (self.hbar > 0 and math.isfinite(self.hbar)):
            raise ValueError(f"hbar must be positive and finite, got {self.hbar}")
        if not (self.mass > 0 and math.isfinite(self.mass)):
            raise ValueError(f"mass must be positive and finite, got {self.mass}")


DEFAULT_CONSTANTS = PhysicalConstants()


@dataclass(frozen=True)
class PacketRecipe:
    """Parameters of the three-packet family (moving pair plus resting packet).

    ``separation_ratio`` is x0 * 2 * min(dk_f, dk_g) -- the distance between
    the packet groups in units of the widest packet's half-width.  Analyses
    that treat the groups as disjoint expect it to be large (>= 20 is the
    gate used by the region-splitting checks).
    """

    k0: float
    k1: float
    dk_f: float
    dk_g: float
    x0: float

    def __post_init__(self):
        if not (self.dk_f > 0 and math.isfinite(self.dk_f)):
            raise ValueError(f"dk_f must be positive, got {self.dk_f}")
        if not (self.dk_g > 0 and math.isfinite(self.dk_g)):
            raise ValueError(f"dk_g must be positive, got {self.dk_g}")
        if not (self.x0 > 0 and math.isfinite(self.x0)):
            raise ValueError(f"x0 must be positive, got {self.x0}")
        for name in ("k0", "k1"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @property
    def separation_ratio(self) -> float:
        return self.x0 * 2.0 * min(self.dk_f, self.dk_g)


@dataclass(frozen=True)
class ComplexGaussian:
    """chi(x) = exp(a x^2 + b x + c) with Re(a) < 0."""

    a: complex
    b: complex
    c: complex

    def __post_init__(self):
        a, b, c = complex(self.a), complex(self.b), complex(self.c)
        if not (a.real < 0):
            raise ValueError(f"Re(a) must be negative for normalizability, got {a}")
        for z in (a, b, c):
            if not (math.isfinite(z.real) and math.isfinite(z.imag)):
                raise ValueError("packet coefficients must be finite")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    def __call__(self, x):
        """Evaluate chi at x (scalar or array)."""
        x = np.asarray(x, dtype=float)
        return np.exp((self.a * x + self.b) * x + self.c)

    @property
    def norm_squared(self) -> float:
        ar, br, cr = self.a.real, self.b.real, self.c.real
        return math.sqrt(math.pi / (-2.0 * ar)) * math.exp(
            2.0 * cr - br * br / (2.0 * ar)
        )

    @property
    def norm(self) -> float:
        return math.sqrt(self.norm_squared)

    @property
    def mean_position(self) -> float:
        return -self.b.real / (2.0 * self.a.real)

    @property
    def position_variance(self) -> float:
        return -1.0 / (4.0 * self.a.real)

    @property
    def mean_wavenumber(self) -> float:
        return self.b.imag + 2.0 * self.a.imag * self.mean_position

    @property
    def wavenumber_variance(self) -> float:
        return abs(self.a) ** 2 / (-self.a.real)

    def mean_velocity(self, consts: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
        return consts.hbar * self.mean_wavenumber / consts.mass


def make_f(recipe: PacketRecipe, sign: int) -> ComplexGaussian:
    """Unit-norm packet at the origin with mean wavenumber k0 + sign*k1."""
    if sign not in (+1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    dk2 = recipe.dk_f ** 2
    return ComplexGaussian(
        a=-dk2,
        b=1j * (recipe.k0 + sign * recipe.k1),
        c=0.25 * math.log(2.0 * dk2 / math.pi),
    )


def make_g(recipe: PacketRecipe) -> ComplexGaussian:
    """Unit-norm packet at rest, centred at x0."""
    dk2 = recipe.dk_g ** 2
    return ComplexGaussian(
        a=-dk2,
        b=2.0 * recipe.x0 * dk2,
        c=0.25 * math.log(2.0 * dk2 / math.pi) - recipe.x0 ** 2 * dk2,
    )


def f_pair_overlap(recipe: PacketRecipe) -> float:
    """Closed-form <f_+|f_-> = exp(-k1^2 / (2 dk_f^2))."""
    return math.exp(-recipe.k1 ** 2 / (2.0 * recipe.dk_f ** 2))


def _gaussian_integrals(p: ComplexGaussian, q: ComplexGaussian):
    """Moments I_n = integral x^n conj(chi_p) chi_q dx for n = 0, 1, 2."""
    A = p.a.conjugate() + q.a
    B = p.b.conjugate() + q.b
    C = p.c.conjugate() + q.c
    i0 = cmath.sqrt(math.pi / -A) * cmath.exp(C - B * B / (4.0 * A))
    mu = -B / (2.0 * A)
    i1 = mu * i0
    i2 = (mu * mu - 1.0 / (2.0 * A)) * i0
    return i0, i1, i2


def inner_product(p: ComplexGaussian, q: ComplexGaussian) -> complex:
    """<p|q> by closed-form complex Gaussian integral."""
    A = p.a.conjugate() + q.a
    B = p.b.conjugate() + q.b
    C = p.c.conjugate() + q.c
    return cmath.sqrt(math.pi / -A) * cmath.exp(C - B * B / (4.0 * A))


def momentum_moment(
    p: ComplexGaussian,
    q: ComplexGaussian,
    n: int,
    consts: PhysicalConstants = DEFAULT_CONSTANTS,
) -> complex:
    """<p| phat^n |q> with phat = -i hbar d/dx, for n in {0, 1, 2}."""
    i0, i1, i2 = _gaussian_integrals(p, q)
    if n == 0:
        return i0
    if n == 1:
        return -1j * consts.hbar * (2.0 * q.a * i1 + q.b * i0)
    if n == 2:
        return -(consts.hbar ** 2) * (
            2.0 * q.a * i0 + 4.0 * q.a * q.a * i2 + 4.0 * q.a * q.b * i1 + q.b * q.b * i0
        )
    raise ValueError(f"momentum power must be 0, 1 or 2, got {n}")


def fourier_transform(p: ComplexGaussian) -> ComplexGaussian:
    """Map to wavenumber space, chi~(k) = (2 pi)^(-1/2) int chi(x) e^{-ikx} dx.

    The result is again a packet in the (a, b, c) form, now as a function
    of k.  ``inverse_fourier_transform`` undoes it exactly.
    """
    a, b, c = p.a, p.b, p.c
    return ComplexGaussian(
        a=1.0 / (4.0 * a),
        b=1j * b / (2.0 * a),
        c=c - b * b / (4.0 * a) + 0.5 * cmath.log(1.0 / (-2.0 * a)),
    )


def inverse_fourier_transform(p: ComplexGaussian) -> ComplexGaussian:
    """Inverse of :func:`fourier_transform`."""
    a, b, c = p.a, p.b, p.c
    return ComplexGaussian(
        a=1.0 / (4.0 * a),
        b=-1j * b / (2.0 * a),
        c=c - b * b / (4.0 * a) + 0.5 * cmath.log(1.0 / (-2.0 * a)),
    )


def free_evolve(
    p: ComplexGaussian, t: float, consts: PhysicalConstants = DEFAULT_CONSTANTS
) -> ComplexGaussian:
    """Free-particle propagation by time t (negative t runs backward).

    In wavenumber space this is the exact phase exp(-i hbar k^2 t / 2m),
    i.e. a shift of the quadratic coefficient; position space is recovered
    by the exact inverse transform.
    """
    if not math.isfinite(t):
        raise ValueError(f"time must be finite, got {t}")
    kt = fourier_transform(p)
    shifted = ComplexGaussian(
        a=kt.a - 0.5j * consts.hbar * t / consts.mass, b=kt.b, c=kt.c
    )
    return inverse_fourier_transform(shifted)


def galilean_boost(
    p: ComplexGaussian, u: float, consts: PhysicalConstants = DEFAULT_CONSTANTS
) -> ComplexGaussian:
    """View the packet from a frame moving at velocity u.

    At the boost instant the density |chi|^2 is unchanged and the mean
    velocity drops by u; the momentum shift enters as the multiplicative
    phase exp(-i m u x / hbar).
    """
    return ComplexGaussian(p.a, p.b - 1j * consts.mass * u / consts.hbar, p.c)


def translate(p: ComplexGaussian, dx: float) -> ComplexGaussian:
    """Shift the packet by dx: chi'(x) = chi(x - dx)."""
    return ComplexGaussian(
        a=p.a,
        b=p.b - 2.0 * p.a * dx,
        c=p.c + p.a * dx * dx - p.b * dx,
    )


def reflect(p: ComplexGaussian, center: float, wavenumber_kick: float = 0.0) -> ComplexGaussian:
    """Spatial reflection about ``center`` with an optional phase ramp.

    chi'(x) = exp(i kick (x - center)) chi(2 center - x).

    With kick = 2 m u / hbar this is the exact action of an ideal mirror
    whose worldline passes through ``center`` at the reflection instant
    while moving at velocity u: the mean velocity maps v -> 2u - v and the
    value at the mirror point is preserved.
    """
    a, b, c = p.a, p.b, p.c
    return ComplexGaussian(
        a=a,
        b=1j * wavenumber_kick - 4.0 * a * center - b,
        c=c + 4.0 * a * center * center + 2.0 * b * center - 1j * wavenumber_kick * center,
    )
