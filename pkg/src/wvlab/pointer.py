"""Gaussian-pointer weak measurements with post-selection.

A pointer of width w couples to a two-outcome property (present/absent)
of a probe: presence deflects the pointer by d << w, absence leaves it
alone.  Conditioning on a post-selection leaves the exact two-branch
pointer wavefunction

    alpha G(x - d) + beta G(x),    alpha = <post|Pi|pre>, beta = <post|(1-Pi)|pre>,

whose normalized mean approaches d * Re(alpha / (alpha + beta)) -- the
real part of the presence weak value -- to second order in d/w.  The
Monte-Carlo layer draws pointer positions from the exact post-selected
density (rejection sampling under a two-Gaussian envelope) and estimates
the weak value as mean/d, including anomalous values outside [0, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PostSelectionImpossible
from .packets import DEFAULT_CONSTANTS, ComplexGaussian, PhysicalConstants, translate
from .states import SuperposedState, Term
from .weak_values import RegionProjector, WeakValueReport, local_momentum

__all__ = [
    "PointerConfig",
    "ProbeSelection",
    "EnsembleResult",
    "pointer_packet",
    "branch_amplitudes",
    "exact_pointer_state",
    "exact_pointer_mean",
    "postselection_probability",
    "first_order_pointer",
    "sample_ensemble",
    "momentum_pointer_shift",
    "probe_for_presence_weak_value",
]

WEAK_RATIO = 20.0
_AMPLITUDE_FLOOR = 1e-10
_CHUNK = 1 << 17


@dataclass(frozen=True)
class PointerConfig:
    """Pointer width w (standard deviation of |G|^2) and deflection d."""

    width: float
    deflection: float

    def __post_init__(self):
        if not (self.width > 0 and math.isfinite(self.width)):
            raise ValueError(f"pointer width must be positive, got {self.width}")
        if not (self.deflection >= 0 and math.isfinite(self.deflection)):
            raise ValueError(f"deflection must be non-negative, got {self.deflection}")

    @property
    def weak_ratio(self) -> float:
        return math.inf if self.deflection == 0 else self.width / self.deflection

    @property
    def is_weak(self) -> bool:
        return self.weak_ratio >= WEAK_RATIO


@dataclass(frozen=True)
class ProbeSelection:
    """Two-state probe amplitudes: pre on (present, absent), post likewise."""

    pre_present: complex
    pre_absent: complex
    post_present: complex
    post_absent: complex

    def __post_init__(self):
        for prefix in ("pre", "post"):
            a = complex(getattr(self, f"{prefix}_present"))
            b = complex(getattr(self, f"{prefix}_absent"))
            if abs(abs(a) ** 2 + abs(b) ** 2 - 1.0) > 1e-12:
                raise ValueError(f"{prefix} amplitudes must be normalized")
            object.__setattr__(self, f"{prefix}_present", a)
            object.__setattr__(self, f"{prefix}_absent", b)

    @property
    def alpha(self) -> complex:
        return self.pre_present * self.post_present.conjugate()

    @property
    def beta(self) -> complex:
        return self.pre_absent * self.post_absent.conjugate()

    @property
    def presence_weak_value(self) -> complex:
        a, b = self.alpha, self.beta
        if abs(a + b) <= _AMPLITUDE_FLOOR:
            raise PostSelectionImpossible("selection amplitude below floor")
        return a / (a + b)


@dataclass(frozen=True)
class EnsembleResult:
    n_samples: int
    n_postselected: int
    mean: float
    std_error: float
    estimated_weak_value: float
    ci95: tuple[float, float]
    postselection_probability: float


def probe_for_presence_weak_value(wv: float) -> ProbeSelection:
    """A (pre, post) pair whose presence weak value is the given real number."""
    s = math.sqrt(0.5)
    norm = math.sqrt(wv * wv + (1.0 - wv) ** 2)
    if norm == 0:
        raise ValueError("weak value 1/2 with this parametrization needs wv != 0 or 1")
    return ProbeSelection(s, s, wv / norm, (1.0 - wv) / norm)


def pointer_packet(cfg: PointerConfig, shift: float = 0.0) -> ComplexGaussian:
    """Normalized real Gaussian pointer G(x - shift) with |G|^2 std = width."""
    w2 = cfg.width ** 2
    base = ComplexGaussian(
        a=-1.0 / (4.0 * w2),
        b=0.0,
        c=-0.25 * math.log(2.0 * math.pi * w2),
    )
    return translate(base, shift) if shift != 0.0 else base


def branch_amplitudes(sel: ProbeSelection) -> tuple[complex, complex]:
    return sel.alpha, sel.beta


def _overlap(cfg: PointerConfig) -> float:
    """<G_d|G_0> for two pointers displaced by the deflection."""
    return math.exp(-cfg.deflection ** 2 / (8.0 * cfg.width ** 2))


def postselection_probability(alpha: complex, beta: complex, cfg: PointerConfig) -> float:
    ov = _overlap(cfg)
    return (
        abs(alpha) ** 2
        + abs(beta) ** 2
        + 2.0 * (alpha * beta.conjugate()).real * ov
    )


def exact_pointer_state(
    sel_or_amplitudes, cfg: PointerConfig
) -> tuple[SuperposedState, float]:
    """Exact post-selected two-Gaussian pointer state and its probability."""
    alpha, beta = _as_amplitudes(sel_or_amplitudes)
    if abs(alpha + beta) <= _AMPLITUDE_FLOOR:
        raise PostSelectionImpossible(
            f"selection amplitude |alpha + beta| = {abs(alpha + beta):.3e} below floor"
        )
    prob = postselection_probability(alpha, beta, cfg)
    scale = 1.0 / math.sqrt(prob)
    shifted = pointer_packet(cfg, cfg.deflection)
    resting = pointer_packet(cfg, 0.0)
    state = SuperposedState(
        (Term(None, alpha * scale, shifted), Term(None, beta * scale, resting))
    )
    return state, prob


def exact_pointer_mean(sel_or_amplitudes, cfg: PointerConfig) -> float:
    """Closed-form mean position of the post-selected pointer."""
    alpha, beta = _as_amplitudes(sel_or_amplitudes)
    if abs(alpha + beta) <= _AMPLITUDE_FLOOR:
        raise PostSelectionImpossible("selection amplitude below floor")
    d = cfg.deflection
    ov = _overlap(cfg)
    z = postselection_probability(alpha, beta, cfg)
    return (abs(alpha) ** 2 * d + (alpha * beta.conjugate()).real * d * ov) / z


def _as_amplitudes(sel_or_amplitudes) -> tuple[complex, complex]:
    if isinstance(sel_or_amplitudes, ProbeSelection):
        return sel_or_amplitudes.alpha, sel_or_amplitudes.beta
    alpha, beta = sel_or_amplitudes
    return complex(alpha), complex(beta)


def first_order_pointer(weak_value: complex, cfg: PointerConfig) -> ComplexGaussian:
    """Pointer Gaussian shifted by d * Re(weak value), the weak-regime form."""
    if not cfg.is_weak:
        raise ValueError(
            f"width/deflection = {cfg.weak_ratio:.2f} is below the weak-regime "
            f"ratio {WEAK_RATIO}"
        )
    return pointer_packet(cfg, cfg.deflection * complex(weak_value).real)


def sample_ensemble(
    sel_or_amplitudes, cfg: PointerConfig, n: int, seed: int
) -> EnsembleResult:
    """Draw n pointer positions from the exact post-selected density.

    Sampling is rejection under the envelope 2(|alpha|^2 G_d^2 + |beta|^2 G_0^2)
    and is chunked with per-chunk seed streams, so results do not depend on
    how the chunks are distributed across workers.
    """
    if n < 1:
        raise ValueError("need at least one sample")
    if cfg.deflection == 0.0:
        raise ValueError("zero deflection: the pointer never moves and the "
                         "weak-value estimate is undefined")
    alpha, beta = _as_amplitudes(sel_or_amplitudes)
    if abs(alpha + beta) <= _AMPLITUDE_FLOOR:
        raise PostSelectionImpossible("selection amplitude below floor")
    prob = postselection_probability(alpha, beta, cfg)

    # |alpha G_d + beta G_0|^2 = wa N(d) + wb N(0) + c N(d/2) with all three
    # normal densities of std w: the product of the displaced Gaussians is
    # again a Gaussian, at the midpoint.
    w, d = cfg.width, cfg.deflection
    wa, wb = abs(alpha) ** 2, abs(beta) ** 2
    cross = 2.0 * (alpha * beta.conjugate()).real * _overlap(cfg)

    kept = []
    total = 0
    chunk_index = 0
    while total < n:
        rng = np.random.default_rng(np.random.SeedSequence((seed, chunk_index)))
        if cross >= 0.0:
            # The density is itself a positive mixture: draw it exactly.
            weights = np.array([wa, wb, cross]) / (wa + wb + cross)
            centers = np.array([d, 0.0, 0.5 * d])
            pick = rng.choice(3, size=_CHUNK, p=weights)
            accepted = centers[pick] + w * rng.standard_normal(_CHUNK)
        else:
            # Signed cross term: propose from the positive part and reject.
            weights = np.array([wa, wb]) / (wa + wb)
            centers = np.array([d, 0.0])
            pick = rng.choice(2, size=_CHUNK, p=weights)
            xs = centers[pick] + w * rng.standard_normal(_CHUNK)
            u = rng.random(_CHUNK)
            n_d = np.exp(-((xs - d) ** 2) / (2.0 * w * w))
            n_0 = np.exp(-(xs ** 2) / (2.0 * w * w))
            n_half = np.exp(-((xs - 0.5 * d) ** 2) / (2.0 * w * w))
            density = wa * n_d + wb * n_0 + cross * n_half
            envelope = wa * n_d + wb * n_0
            accepted = xs[u * envelope <= density]
        kept.append(accepted)
        total += accepted.size
        chunk_index += 1
        if chunk_index > 10000:
            raise RuntimeError("rejection sampling failed to accept enough points")
    xs = np.concatenate(kept)[:n]
    mean = float(xs.mean())
    std = float(xs.std(ddof=1)) if n > 1 else 0.0
    std_error = std / math.sqrt(n)
    estimate = mean / d
    half = 1.96 * std_error / d
    return EnsembleResult(
        n_samples=n,
        n_postselected=n,
        mean=mean,
        std_error=std_error,
        estimated_weak_value=estimate,
        ci95=(estimate - half, estimate + half),
        postselection_probability=prob,
    )


def momentum_pointer_shift(
    region: RegionProjector,
    pre: SuperposedState,
    post: SuperposedState,
    coupling: float,
    cfg: PointerConfig,
    consts: PhysicalConstants = DEFAULT_CONSTANTS,
) -> float:
    """Expected displacement of an impulsively coupled momentum pointer.

    The pointer reads coupling * Re(localized momentum weak value); the
    coupling must keep the shift well inside the pointer width for the
    weak reading to hold.
    """
    report: WeakValueReport = local_momentum(region, pre, post, consts)
    return coupling * report.value.real
