"""Sampled wavefunctions on a uniform grid: the independent numerical oracle.

Everything the closed-form packet algebra computes is recomputed here
from first principles: inner products by Riemann sums (spectrally
accurate for smooth decaying functions on a wide domain), momentum
operators by FFT multiplication, free evolution by the exact momentum-
space phase, and region projectors as sharp masks.  Agreement between
the two paths is the package's core correctness check.

Labels of a superposed state sample into separate component grids;
inner products sum over matching labels only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Union

import numpy as np

from .errors import NearOrthogonalSelection, SupportOverflow
from .packets import DEFAULT_CONSTANTS, ComplexGaussian, PhysicalConstants
from .states import SuperposedState
from .weak_values import DENOMINATOR_FLOOR, LocalObservable, WeakValueReport

__all__ = [
    "GridSpec",
    "GridWavefunction",
    "DEFAULT_GRID",
    "sample_packet",
    "sample",
    "grid_overlap",
    "grid_norm",
    "apply_momentum",
    "project_interval",
    "evolve_free",
    "grid_weak_value",
    "momentum_representation",
    "dump_csv",
]

GUARD_SIGMAS = 8.0

GridLike = Union["GridWavefunction", Mapping[Optional[str], "GridWavefunction"]]


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid of n samples on [x_min, x_max), n a power of two >= 2**10."""

    x_min: float
    x_max: float
    n: int

    def __post_init__(self):
        if not self.x_max > self.x_min:
            raise ValueError("x_max must exceed x_min")
        if self.n < 2 ** 10 or (self.n & (self.n - 1)) != 0:
            raise ValueError(f"n must be a power of two >= 1024, got {self.n}")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n

    @property
    def nyquist_wavenumber(self) -> float:
        return math.pi / self.dx

    def points(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n)

    def wavenumbers(self) -> np.ndarray:
        return 2.0 * math.pi * np.fft.fftfreq(self.n, self.dx)


DEFAULT_GRID = GridSpec(-400.0, 500.0, 2 ** 15)


@dataclass(frozen=True)
class GridWavefunction:
    spec: GridSpec
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.spec.n,):
            raise ValueError("amplitude array must match the grid length")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2) * self.spec.dx)

    @property
    def norm(self) -> float:
        return math.sqrt(self.norm_squared)


def _check_support(packet: ComplexGaussian, spec: GridSpec, guard: float = GUARD_SIGMAS):
    sigma = math.sqrt(packet.position_variance)
    center = packet.mean_position
    if center - guard * sigma < spec.x_min or center + guard * sigma > spec.x_max:
        raise SupportOverflow(
            f"packet at {center:.3f} with sigma {sigma:.3f} leaks past the "
            f"guard band of [{spec.x_min}, {spec.x_max}]"
        )
    k_extent = abs(packet.mean_wavenumber) + guard * math.sqrt(packet.wavenumber_variance)
    if k_extent > spec.nyquist_wavenumber:
        raise SupportOverflow(
            f"packet wavenumber content {k_extent:.3f} exceeds the Nyquist "
            f"wavenumber {spec.nyquist_wavenumber:.3f}"
        )


def sample_packet(
    packet: ComplexGaussian, spec: GridSpec, guard: float = GUARD_SIGMAS
) -> GridWavefunction:
    """Pointwise samples of a single packet, with support/Nyquist guards."""
    _check_support(packet, spec, guard)
    return GridWavefunction(spec, packet(spec.points()))


def sample(
    state: SuperposedState, spec: GridSpec, guard: float = GUARD_SIGMAS
) -> dict[Optional[str], GridWavefunction]:
    """One sampled component per label, each a coherent sum of its terms."""
    parts: dict[Optional[str], np.ndarray] = {}
    x = spec.points()
    for term in state.terms:
        _check_support(term.packet, spec, guard)
        component = term.weight * term.packet(x)
        if term.label in parts:
            parts[term.label] = parts[term.label] + component
        else:
            parts[term.label] = component
    return {label: GridWavefunction(spec, amps) for label, amps in parts.items()}


def _as_parts(w: GridLike) -> dict[Optional[str], GridWavefunction]:
    if isinstance(w, GridWavefunction):
        return {None: w}
    return dict(w)


def _lift(w: GridLike, op):
    parts = _as_parts(w)
    out = {label: op(g) for label, g in parts.items()}
    if isinstance(w, GridWavefunction):
        return out[None]
    return out


def grid_overlap(w1: GridLike, w2: GridLike) -> complex:
    """<w1|w2> by Riemann sum, summed over matching labels."""
    p1, p2 = _as_parts(w1), _as_parts(w2)
    total = 0.0 + 0.0j
    for label, g1 in p1.items():
        g2 = p2.get(label)
        if g2 is None:
            continue
        if g1.spec != g2.spec:
            raise ValueError("grid specs must match for an overlap")
        total += complex(np.vdot(g1.amplitudes, g2.amplitudes)) * g1.spec.dx
    return total


def grid_norm(w: GridLike) -> float:
    return math.sqrt(grid_overlap(w, w).real)


def apply_momentum(
    w: GridLike, power: int, consts: PhysicalConstants = DEFAULT_CONSTANTS
) -> GridLike:
    """(hbar k)^power in the spectral representation."""
    if power not in (1, 2):
        raise ValueError(f"momentum power must be 1 or 2, got {power}")

    def op(g: GridWavefunction) -> GridWavefunction:
        k = g.spec.wavenumbers()
        tilde = np.fft.fft(g.amplitudes)
        tilde *= (consts.hbar * k) ** power
        return GridWavefunction(g.spec, np.fft.ifft(tilde))

    return _lift(w, op)


def project_interval(w: GridLike, region) -> GridLike:
    """Zero the amplitudes outside the region's intervals (sharp mask).

    Masks are half-open [lo, hi) at sample resolution, so complementary
    regions partition the grid exactly.
    """
    if region.mode != "interval":
        raise ValueError("project_interval needs an interval-mode projector")

    def op(g: GridWavefunction) -> GridWavefunction:
        x = g.spec.points()
        mask = np.zeros(g.spec.n, dtype=bool)
        for lo, hi in region.intervals:
            mask |= (x >= lo) & (x < hi)
        return GridWavefunction(g.spec, np.where(mask, g.amplitudes, 0.0))

    return _lift(w, op)


def evolve_free(
    w: GridLike, t: float, consts: PhysicalConstants = DEFAULT_CONSTANTS, edge_tol: float = 1e-12
) -> GridLike:
    """Exact free evolution by the momentum-space phase exp(-i hbar k^2 t / 2m)."""

    def op(g: GridWavefunction) -> GridWavefunction:
        k = g.spec.wavenumbers()
        phase = np.exp(-0.5j * consts.hbar * k * k * t / consts.mass)
        evolved = GridWavefunction(g.spec, np.fft.ifft(np.fft.fft(g.amplitudes) * phase))
        edge = 8
        edge_mass = float(
            np.sum(np.abs(evolved.amplitudes[:edge]) ** 2)
            + np.sum(np.abs(evolved.amplitudes[-edge:]) ** 2)
        ) * g.spec.dx
        if edge_mass > edge_tol * max(evolved.norm_squared, 1e-300):
            raise SupportOverflow(
                f"evolved wavefunction carries {edge_mass:.3e} of probability "
                "at the domain edges"
            )
        return evolved

    return _lift(w, op)


def momentum_representation(w: GridWavefunction):
    """(k, amplitudes) of the continuum transform, k sorted ascending.

    Normalized so that the Riemann sum of |amplitudes|^2 over k equals the
    position-space norm (Parseval).
    """
    k = w.spec.wavenumbers()
    tilde = np.fft.fft(w.amplitudes) * w.spec.dx / math.sqrt(2.0 * math.pi)
    tilde *= np.exp(-1j * k * w.spec.x_min)
    order = np.argsort(k)
    return k[order], tilde[order]


def _sandwich(
    obs: LocalObservable,
    pre_parts: GridLike,
    consts: PhysicalConstants,
) -> GridLike:
    cut = project_interval(pre_parts, obs.region)
    if obs.kind == "presence":
        return cut
    power = 1 if obs.kind == "momentum" else 2
    return project_interval(apply_momentum(cut, power, consts), obs.region)


def grid_weak_value(
    obs: LocalObservable,
    pre: SuperposedState,
    post: SuperposedState,
    spec: GridSpec = DEFAULT_GRID,
    consts: PhysicalConstants = DEFAULT_CONSTANTS,
    floor: float = DENOMINATOR_FLOOR,
) -> WeakValueReport:
    """Weak value evaluated end to end on the grid.

    Interval projectors are applied as masks (project, momentum power,
    project again).  Packet-isolating projectors keep whole terms, which
    is exact set algebra; the grid still supplies all the quadrature and
    momentum-operator numerics.
    """
    pre_parts = sample(pre, spec)
    post_parts = sample(post, spec)
    den = grid_overlap(post_parts, pre_parts)
    if abs(den) <= floor * grid_norm(pre_parts) * grid_norm(post_parts):
        raise NearOrthogonalSelection(
            f"|<post|pre>| = {abs(den):.3e} is below the floor on the grid"
        )

    if obs.region.mode == "interval":
        sandwiched = _sandwich(obs, pre_parts, consts)
        num = grid_overlap(post_parts, sandwiched)
    else:
        pre_cut = obs.region.apply(pre)
        post_cut = obs.region.apply(post)
        if pre_cut is None or post_cut is None:
            num = 0.0 + 0.0j
        else:
            pre_cut_parts = sample(pre_cut, spec)
            post_cut_parts = sample(post_cut, spec)
            if obs.kind == "presence":
                num = grid_overlap(post_cut_parts, pre_cut_parts)
            else:
                power = 1 if obs.kind == "momentum" else 2
                num = grid_overlap(
                    post_cut_parts, apply_momentum(pre_cut_parts, power, consts)
                )
    if obs.kind == "kinetic_energy":
        num = num / (2.0 * consts.mass)
    return WeakValueReport(num / den, num, den, "grid")


def dump_csv(w: GridWavefunction, path) -> None:
    """Write (x, Re, Im) rows for external plotting."""
    x = w.spec.points()
    with open(path, "w", newline="\n") as fh:
        fh.write("x,re,im\n")
        for xi, amp in zip(x, w.amplitudes):
            fh.write(f"{xi!r},{amp.real!r},{amp.imag!r}\n")
