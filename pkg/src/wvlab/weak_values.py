"""Weak values of region-localized observables between two states.

The weak value of an operator A between a pre-selected state psi and a
post-selected state phi is

    A_w = <phi| A |psi> / <phi|psi>.

Observables here are sandwiches of a region projector Pi with a power of
the momentum operator:

    presence         Pi Pi           (the projector itself)
    momentum         Pi phat Pi      (momentum localized to the region)
    kinetic-energy   Pi phat^2 Pi / 2m

Projectors come in two modes.  ``packet`` mode is the idealization that
a projector isolates whole terms of a superposition (valid when the
packets occupy disjoint regions, or always for labeled states); it keeps
both sides of every computation in closed form.  ``interval`` mode is an
honest sharp spatial mask and is evaluated on the sampling grid, which
serves as the independent numerical oracle for the closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .errors import NearOrthogonalSelection, NonOrthogonalPackets
from .packets import DEFAULT_CONSTANTS, PhysicalConstants, inner_product
from .states import (
    TERM_F_MINUS,
    TERM_F_PLUS,
    TERM_G,
    SuperposedState,
    momentum_overlap,
    overlap,
)

__all__ = [
    "RegionProjector",
    "LocalObservable",
    "WeakValueReport",
    "weak_value",
    "local_momentum",
    "local_energy",
    "packet_projector_weak_values",
    "counterparticle_decomposition",
    "three_box_summary",
    "combine",
    "region_g",
    "region_h",
    "region_f",
    "full_line",
    "DENOMINATOR_FLOOR",
    "PACKET_OVERLAP_THRESHOLD",
]

DENOMINATOR_FLOOR = 1e-10
PACKET_OVERLAP_THRESHOLD = 1e-6

KINDS = ("presence", "momentum", "kinetic_energy")


@dataclass(frozen=True)
class RegionProjector:
    """Spatial projector, either interval masks or packet-isolating.

    ``interval`` mode lists disjoint ordered half-open spans [lo, hi).
    ``packet`` mode lists the term indices the projector keeps;
    ``kept_terms = None`` keeps everything (the identity on the line).
    """

    mode: str
    intervals: tuple[tuple[float, float], ...] = ()
    kept_terms: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        if self.mode not in ("interval", "packet"):
            raise ValueError(f"unknown projector mode {self.mode!r}")
        if self.mode == "interval":
            spans = tuple((float(lo), float(hi)) for lo, hi in self.intervals)
            prev_hi = -math.inf
            for lo, hi in spans:
                if not lo < hi:
                    raise ValueError(f"empty or inverted interval ({lo}, {hi})")
                if lo < prev_hi:
                    raise ValueError("intervals must be disjoint and ordered")
                prev_hi = hi
            object.__setattr__(self, "intervals", spans)
        elif self.kept_terms is not None:
            kept = tuple(int(i) for i in self.kept_terms)
            if len(set(kept)) != len(kept):
                raise ValueError("kept_terms must not repeat")
            object.__setattr__(self, "kept_terms", kept)

    @classmethod
    def interval(cls, *spans: tuple[float, float]) -> "RegionProjector":
        return cls(mode="interval", intervals=tuple(spans))

    @classmethod
    def packet_isolating(cls, *indices: int) -> "RegionProjector":
        return cls(mode="packet", kept_terms=tuple(indices))

    @classmethod
    def identity(cls) -> "RegionProjector":
        return cls(mode="packet", kept_terms=None)

    def apply(self, state: SuperposedState) -> Optional[SuperposedState]:
        """Packet-mode action; returns None for the zero state."""
        if self.mode != "packet":
            raise ValueError("apply() is defined for packet-isolating projectors")
        if self.kept_terms is None:
            return state
        kept = [i for i in self.kept_terms if i < len(state.terms)]
        if any(i >= len(state.terms) for i in self.kept_terms):
            raise ValueError("projector keeps a term index the state does not have")
        if not kept:
            return None
        return state.keep(kept)


def region_g() -> RegionProjector:
    """Projector isolating the resting packet of a (g, f_+, f_-) state."""
    return RegionProjector.packet_isolating(TERM_G)


def region_h() -> RegionProjector:
    """Projector isolating the moving pair of a (g, f_+, f_-) state."""
    return RegionProjector.packet_isolating(TERM_F_PLUS, TERM_F_MINUS)


def region_f(sign: int) -> RegionProjector:
    """Projector isolating a single moving packet (+1 or -1)."""
    if sign == +1:
        return RegionProjector.packet_isolating(TERM_F_PLUS)
    if sign == -1:
        return RegionProjector.packet_isolating(TERM_F_MINUS)
    raise ValueError(f"sign must be +1 or -1, got {sign}")


def full_line() -> RegionProjector:
    return RegionProjector.identity()


@dataclass(frozen=True)
class LocalObservable:
    region: RegionProjector
    kind: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")


@dataclass(frozen=True)
class WeakValueReport:
    value: complex
    numerator: complex
    denominator: complex
    method: str


def _checked_denominator(pre: SuperposedState, post: SuperposedState, floor: float) -> complex:
    den = overlap(post, pre)
    if abs(den) <= floor * pre.norm * post.norm:
        raise NearOrthogonalSelection(
            f"|<post|pre>| = {abs(den):.3e} is below the floor; "
            "the weak value is undefined/unstable for this selection"
        )
    return den


def _sandwich_numerator(
    obs: LocalObservable,
    pre: SuperposedState,
    post: SuperposedState,
    consts: PhysicalConstants,
) -> complex:
    pre_cut = obs.region.apply(pre)
    post_cut = obs.region.apply(post)
    if pre_cut is None or post_cut is None:
        return 0.0 + 0.0j
    if obs.kind == "presence":
        return overlap(post_cut, pre_cut)
    if obs.kind == "momentum":
        return momentum_overlap(post_cut, pre_cut, 1, consts)
    num = momentum_overlap(post_cut, pre_cut, 2, consts)
    return num / (2.0 * consts.mass)


def weak_value(
    obs: LocalObservable,
    pre: SuperposedState,
    post: SuperposedState,
    consts: PhysicalConstants = DEFAULT_CONSTANTS,
    method: str = "analytic",
    grid_spec=None,
    floor: float = DENOMINATOR_FLOOR,
) -> WeakValueReport:
    """Weak value of a region-localized observable between pre and post.

    ``method="analytic"`` uses the closed-form packet algebra and needs a
    packet-isolating projector; interval projectors are delegated to the
    grid.  ``method="grid"`` evaluates everything by sampled quadrature
    and spectral momentum operators.
    """
    if method == "analytic" and obs.region.mode == "interval":
        method = "grid"
    if method == "analytic":
        den = _checked_denominator(pre, post, floor)
        num = _sandwich_numerator(obs, pre, post, consts)
        return WeakValueReport(num / den, num, den, "analytic")
    if method == "grid":
        from . import grid as _grid

        spec = grid_spec if grid_spec is not None else _grid.DEFAULT_GRID
        return _grid.grid_weak_value(obs, pre, post, spec=spec, consts=consts, floor=floor)
    raise ValueError(f"unknown method {method!r}")


def local_momentum(
    region: RegionProjector,
    pre: SuperposedState,
    post: SuperposedState,
    consts: PhysicalConstants = DEFAULT_CONSTANTS,
    **kwargs,
) -> WeakValueReport:
    return weak_value(LocalObservable(region, "momentum"), pre, post, consts, **kwargs)


def local_energy(
    region: RegionProjector,
    pre: SuperposedState,
    post: SuperposedState,
    consts: PhysicalConstants = DEFAULT_CONSTANTS,
    symmetrized: bool = False,
    **kwargs,
) -> WeakValueReport:
    """Kinetic energy localized to the region.

    The default sandwich is Pi phat^2 Pi / 2m.  With ``symmetrized=True``
    the alternative (Pi phat^2 + phat^2 Pi) / 4m is reported instead; the
    two agree when the projector cleanly isolates its packets.
    """
    if not symmetrized:
        return weak_value(LocalObservable(region, "kinetic_energy"), pre, post, consts, **kwargs)
    if region.mode != "packet":
        raise ValueError("symmetrized energy is available on the analytic path only")
    floor = kwargs.pop("floor", DENOMINATOR_FLOOR)
    if kwargs:
        raise TypeError(f"unexpected arguments {sorted(kwargs)}")
    den = _checked_denominator(pre, post, floor)
    pre_cut = region.apply(pre)
    post_cut = region.apply(post)
    if pre_cut is None or post_cut is None:
        return WeakValueReport(0.0, 0.0, den, "analytic")
    half = momentum_overlap(post_cut, pre, 2, consts) + momentum_overlap(post, pre_cut, 2, consts)
    num = half / (4.0 * consts.mass)
    return WeakValueReport(num / den, num, den, "analytic")


def _require_three_terms(state: SuperposedState, name: str):
    if len(state.terms) != 3:
        raise ValueError(
            f"{name} must have the (g, f_+, f_-) three-term structure, "
            f"got {len(state.terms)} terms"
        )


def _gate_packet_isolation(pre: SuperposedState, post: SuperposedState, threshold: float):
    """Packet-isolating projectors on single moving packets are meaningful
    only when the pair is orthogonal (separated limit) or carries
    orthogonal labels."""
    for state in (pre, post):
        labeled = all(t.label is not None for t in state.terms) and len(
            set(state.labels)
        ) == len(state.terms)
        if labeled:
            continue
        pair = abs(
            inner_product(state.terms[TERM_F_PLUS].packet, state.terms[TERM_F_MINUS].packet)
        )
        if pair > threshold:
            raise NonOrthogonalPackets(
                f"moving-pair overlap {pair:.3e} exceeds {threshold:.1e}; "
                "label the state or move to the separated regime"
            )


@dataclass(frozen=True)
class PacketWeakValueTable:
    """Weak values of single-packet projector sandwiches.

    Rows are 'g', 'f+', 'f-'; columns presence / momentum / kinetic_energy.
    """

    rows: dict = field(default_factory=dict)

    def value(self, row: str, kind: str) -> complex:
        return self.rows[row][kind].value

    def report(self, row: str, kind: str) -> WeakValueReport:
        return self.rows[row][kind]


def packet_projector_weak_values(
    pre: SuperposedState,
    post: SuperposedState,
    consts: PhysicalConstants = DEFAULT_CONSTANTS,
    threshold: float = PACKET_OVERLAP_THRESHOLD,
) -> PacketWeakValueTable:
    """Presence/momentum/energy weak values of the three packet projectors."""
    _require_three_terms(pre, "pre")
    _require_three_terms(post, "post")
    _gate_packet_isolation(pre, post, threshold)
    regions = {"g": region_g(), "f+": region_f(+1), "f-": region_f(-1)}
    rows = {}
    for name, region in regions.items():
        rows[name] = {
            kind: weak_value(LocalObservable(region, kind), pre, post, consts)
            for kind in KINDS
        }
    return PacketWeakValueTable(rows)


@dataclass(frozen=True)
class CounterparticleReport:
    """The moving pair read as one positive and one negative carrier.

    The two members carry the single-packet momentum/energy weak values
    (the minus member's are negative); their sums reproduce the localized
    momentum and energy of the whole crossing region.
    """

    momentum_plus: complex
    momentum_minus: complex
    momentum_sum: complex
    momentum_region_h: complex
    energy_plus: complex
    energy_minus: complex
    energy_sum: complex
    energy_region_h: complex


def counterparticle_decomposition(
    pre: SuperposedState,
    post: SuperposedState,
    consts: PhysicalConstants = DEFAULT_CONSTANTS,
    threshold: float = PACKET_OVERLAP_THRESHOLD,
    tolerance: float = 1e-8,
) -> CounterparticleReport:
    table = packet_projector_weak_values(pre, post, consts, threshold)
    p_plus = table.value("f+", "momentum")
    p_minus = table.value("f-", "momentum")
    e_plus = table.value("f+", "kinetic_energy")
    e_minus = table.value("f-", "kinetic_energy")
    p_region = local_momentum(region_h(), pre, post, consts).value
    e_region = local_energy(region_h(), pre, post, consts).value
    p_scale = max(1.0, abs(p_region))
    e_scale = max(1.0, abs(e_region))
    if abs(p_plus + p_minus - p_region) > tolerance * p_scale:
        raise ValueError(
            f"pair momentum sum {p_plus + p_minus} does not match the "
            f"crossing-region value {p_region}"
        )
    if abs(e_plus + e_minus - e_region) > tolerance * e_scale:
        raise ValueError(
            f"pair energy sum {e_plus + e_minus} does not match the "
            f"crossing-region value {e_region}"
        )
    return CounterparticleReport(
        momentum_plus=p_plus,
        momentum_minus=p_minus,
        momentum_sum=p_plus + p_minus,
        momentum_region_h=p_region,
        energy_plus=e_plus,
        energy_minus=e_minus,
        energy_sum=e_plus + e_minus,
        energy_region_h=e_region,
    )


@dataclass(frozen=True)
class ThreeBoxReport:
    """Presence weak values over the three packet locations.

    One projector comes out negative while the triple still sums to one
    particle -- the three-box pattern."""

    g: complex
    f_plus: complex
    f_minus: complex
    total: complex


def three_box_summary(
    pre: SuperposedState,
    post: SuperposedState,
    threshold: float = PACKET_OVERLAP_THRESHOLD,
    tolerance: float = 1e-8,
) -> ThreeBoxReport:
    table = packet_projector_weak_values(pre, post, DEFAULT_CONSTANTS, threshold)
    g = table.value("g", "presence")
    fp = table.value("f+", "presence")
    fm = table.value("f-", "presence")
    total = g + fp + fm
    if abs(total - 1.0) > tolerance:
        raise ValueError(f"presence triple sums to {total}, expected 1")
    return ThreeBoxReport(g=g, f_plus=fp, f_minus=fm, total=total)


def combine(
    pieces: Sequence[tuple[complex, WeakValueReport]],
) -> WeakValueReport:
    """Weak value of a linear combination alpha*A + beta*B + ... of
    observables sharing the same selection (same denominator)."""
    if not pieces:
        raise ValueError("nothing to combine")
    den = pieces[0][1].denominator
    for _, rep in pieces[1:]:
        if abs(rep.denominator - den) > 1e-12 * max(1.0, abs(den)):
            raise ValueError("combined reports must share the selection denominator")
    num = sum(coeff * rep.numerator for coeff, rep in pieces)
    method = pieces[0][1].method
    return WeakValueReport(num / den, num, den, method)
