"""Event-driven tracing of Gaussian packets through moving optics.

The apparatus lives on a one-dimensional line; mirrors and beam
splitters are worldlines x(t) = x_ref + u (t - t_ref) that act on a
packet only while their activity window is open.  Packet routing uses
the classical center trajectory (dispersion is kept in the packet
parameters but ignored for event timing); at each crossing the element
applies an exact unitary:

    mirror          chi(x) -> eta exp(i 2 m u (x - x_e) / hbar) chi(2 x_e - x)
    beam splitter   chi -> t chi  (transmitted)  +  r M chi  (reflected)

where M is the mirror map at the crossing event.  The mirror map is its
own inverse and realizes the velocity rule v -> 2u - v, so a splitter
operator t + r M is unitary exactly when Re(conj(t) r) = 0; splitter
amplitudes are validated against that constraint.

Forward traces start from the source; backward traces start from a
detector mode and apply adjoint element actions under time-reversed
routing.  Composing the surviving branches at the focus time yields the
pre- and post-selected three-packet states, and the coincidence of
forward and backward supports is the weak-trace map.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import NoCrossing, TopologyMismatch, UnboundedBranch
from .packets import (
    DEFAULT_CONSTANTS,
    ComplexGaussian,
    PacketRecipe,
    PhysicalConstants,
    f_pair_overlap,
    free_evolve,
    inner_product,
    make_f,
    make_g,
    reflect,
    translate,
)
from .states import SuperposedState, compose_custom, compose_phi, compose_psi, overlap

__all__ = [
    "Element",
    "Scenario",
    "Branch",
    "HistoryEvent",
    "element_velocity_map",
    "forward_propagate",
    "backward_propagate",
    "tune_splitters",
    "selection_states",
    "SelectionStates",
    "weak_trace_map",
    "TraceMap",
    "detection_probability",
    "probability_total",
    "invert_branch",
    "splitter_fractions",
    "build_default_scenario",
    "default_recipe",
]

MAX_EVENTS_PER_BRANCH = 64
MAX_BRANCHES = 4096
_UNITARITY_TOL = 1e-9


@dataclass(frozen=True)
class Element:
    """A worldline participant of the apparatus.

    ``window`` limits when a mirror/splitter is active (None = always);
    physical elements have finite apertures, which on a spacetime diagram
    means they act only near their designed events.  For sources and
    detectors, (x_ref, t_ref) is the emission/projection event, ``velocity``
    the emitted/accepted mode velocity and ``mode_phase`` a constant phase
    attached to the mode.
    """

    name: str
    kind: str
    x_ref: float
    t_ref: float
    velocity: float
    reflect_amplitude: Optional[complex] = None
    transmit_amplitude: Optional[complex] = None
    window: Optional[tuple[float, float]] = None
    mode_phase: float = 0.0

    def __post_init__(self):
        if self.kind not in ("mirror", "beam_splitter", "source", "detector"):
            raise ValueError(f"unknown element kind {self.kind!r}")
        for v in (self.x_ref, self.t_ref, self.velocity):
            if not math.isfinite(v):
                raise ValueError(f"element {self.name}: worldline parameters must be finite")
        if self.kind == "beam_splitter":
            r = self.reflect_amplitude
            t = self.transmit_amplitude
            if r is None or t is None:
                raise ValueError(f"splitter {self.name} needs reflect and transmit amplitudes")
            r, t = complex(r), complex(t)
            if abs(abs(r) ** 2 + abs(t) ** 2 - 1.0) > _UNITARITY_TOL:
                raise ValueError(f"splitter {self.name}: |r|^2 + |t|^2 must be 1")
            if abs((t.conjugate() * r).real) > _UNITARITY_TOL:
                raise ValueError(
                    f"splitter {self.name}: Re(conj(t) r) must vanish for unitarity"
                )
            object.__setattr__(self, "reflect_amplitude", r)
            object.__setattr__(self, "transmit_amplitude", t)
        if self.kind == "mirror":
            r = 1.0 + 0.0j if self.reflect_amplitude is None else complex(self.reflect_amplitude)
            if abs(abs(r) - 1.0) > _UNITARITY_TOL:
                raise ValueError(f"mirror {self.name}: |reflect_amplitude| must be 1")
            object.__setattr__(self, "reflect_amplitude", r)
        if self.window is not None:
            lo, hi = self.window
            if not lo < hi:
                raise ValueError(f"element {self.name}: empty activity window")
            object.__setattr__(self, "window", (float(lo), float(hi)))

    def position_at(self, t: float) -> float:
        return self.x_ref + self.velocity * (t - self.t_ref)

    def active_at(self, t: float) -> bool:
        return self.window is None or (self.window[0] <= t <= self.window[1])


@dataclass(frozen=True)
class Scenario:
    elements: tuple[Element, ...]
    recipe: PacketRecipe
    consts: PhysicalConstants = DEFAULT_CONSTANTS
    t_start: float = 0.0
    t_end: float = 1.0
    target_time: Optional[float] = None
    postselect_detector: str = "D2"
    branch_amplitude_floor: float = 1e-12

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        if not self.t_end > self.t_start:
            raise ValueError("t_end must exceed t_start")
        names = [e.name for e in self.elements]
        if len(set(names)) != len(names):
            raise ValueError("element names must be unique")
        if len([e for e in self.elements if e.kind == "source"]) != 1:
            raise ValueError("a scenario needs exactly one source")
        if not any(e.kind == "detector" for e in self.elements):
            raise ValueError("a scenario needs at least one detector")

    def element(self, name: str) -> Element:
        for e in self.elements:
            if e.name == name:
                return e
        raise KeyError(f"no element named {name!r}")

    @property
    def source(self) -> Element:
        return next(e for e in self.elements if e.kind == "source")

    def detectors(self) -> tuple[Element, ...]:
        return tuple(e for e in self.elements if e.kind == "detector")

    def splitters(self) -> tuple[Element, ...]:
        return tuple(
            sorted(
                (e for e in self.elements if e.kind == "beam_splitter"),
                key=lambda e: (e.t_ref, e.x_ref),
            )
        )

    def with_element(self, updated: Element) -> "Scenario":
        elements = tuple(updated if e.name == updated.name else e for e in self.elements)
        return replace(self, elements=elements)


@dataclass(frozen=True)
class HistoryEvent:
    element: str
    x: float
    t: float
    action: str  # "reflect" or "transmit"


@dataclass(frozen=True)
class Branch:
    packet: ComplexGaussian
    amplitude: complex
    history: tuple[HistoryEvent, ...]
    at_time: float

    def velocity(self, consts: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
        return self.packet.mean_velocity(consts)

    @property
    def center(self) -> float:
        return self.packet.mean_position


def element_velocity_map(u: float, v_in: float) -> tuple[float, float]:
    """(reflected, transmitted) velocities for an element moving at u."""
    if v_in == u:
        raise NoCrossing(
            f"a packet at velocity {v_in} never crosses an element moving at {u}"
        )
    return 2.0 * u - v_in, v_in


def _mirror_map(
    packet: ComplexGaussian, x_event: float, u: float, consts: PhysicalConstants
) -> ComplexGaussian:
    kick = 2.0 * consts.mass * u / consts.hbar
    return reflect(packet, x_event, kick)


def _mode_packet(scenario: Scenario, element: Element, fresh_time: float) -> ComplexGaussian:
    """Mode attached to a source or detector.

    The mode is the ideal moving packet of the scenario recipe, dilated by
    free evolution from ``fresh_time`` (where it is at minimum width) to the
    element's event, and centred on the event.  Seeding sources/detectors
    this way makes the traced branch set reproduce the ideal three-packet
    states exactly at the focus time.
    """
    consts = scenario.consts
    p = make_f(scenario.recipe, +1)
    p = free_evolve(p, element.t_ref - fresh_time, consts)
    p = translate(p, element.x_ref - p.mean_position)
    if element.mode_phase:
        p = ComplexGaussian(p.a, p.b, p.c + 1j * element.mode_phase)
    return p


def _source_branch(scenario: Scenario) -> Branch:
    src = scenario.source
    fresh = scenario.target_time if scenario.target_time is not None else src.t_ref
    return Branch(
        packet=_mode_packet(scenario, src, fresh),
        amplitude=1.0 + 0.0j,
        history=(),
        at_time=src.t_ref,
    )


def _detector_branch(scenario: Scenario, detector: Element) -> Branch:
    fresh = scenario.target_time if scenario.target_time is not None else detector.t_ref
    return Branch(
        packet=_mode_packet(scenario, detector, fresh),
        amplitude=1.0 + 0.0j,
        history=(),
        at_time=detector.t_ref,
    )


def _next_crossing(
    scenario: Scenario, packet: ComplexGaussian, t_now: float, until: float, direction: int
):
    """Earliest (latest for backward) element crossing strictly inside the leg."""
    v = packet.mean_velocity(scenario.consts)
    x_now = packet.mean_position
    eps = 1e-9 * max(1.0, abs(t_now))
    best = None
    for e in scenario.elements:
        if e.kind not in ("mirror", "beam_splitter"):
            continue
        if v == e.velocity:
            continue
        dt = (e.position_at(t_now) - x_now) / (v - e.velocity)
        t_star = t_now + dt
        if direction > 0:
            if not (t_now + eps < t_star <= until):
                continue
        else:
            if not (until <= t_star < t_now - eps):
                continue
        if not e.active_at(t_star):
            continue
        key = direction * t_star
        if best is None or key < best[0]:
            best = (key, t_star, e)
    if best is None:
        return None
    return best[1], best[2]


def _trace(scenario: Scenario, seed: Branch, until: float, direction: int) -> list[Branch]:
    consts = scenario.consts
    floor = scenario.branch_amplitude_floor
    stack = [seed]
    done: list[Branch] = []
    while stack:
        if len(stack) + len(done) > MAX_BRANCHES:
            raise UnboundedBranch("branch count exceeded the tracing cap")
        br = stack.pop()
        if len(br.history) > MAX_EVENTS_PER_BRANCH:
            raise UnboundedBranch(
                f"a branch interacted more than {MAX_EVENTS_PER_BRANCH} times "
                "without leaving the apparatus"
            )
        hit = _next_crossing(scenario, br.packet, br.at_time, until, direction)
        if hit is None:
            packet = free_evolve(br.packet, until - br.at_time, consts)
            done.append(Branch(packet, br.amplitude, br.history, until))
            continue
        t_star, element = hit
        packet = free_evolve(br.packet, t_star - br.at_time, consts)
        x_event = element.position_at(t_star)
        u = element.velocity
        if element.kind == "mirror":
            eta = element.reflect_amplitude
            if direction < 0:
                eta = eta.conjugate()
            child = Branch(
                _mirror_map(packet, x_event, u, consts),
                br.amplitude * eta,
                br.history + (HistoryEvent(element.name, x_event, t_star, "reflect"),),
                t_star,
            )
            if abs(child.amplitude) >= floor:
                stack.append(child)
            continue
        r = element.reflect_amplitude
        t_amp = element.transmit_amplitude
        if direction < 0:
            r, t_amp = r.conjugate(), t_amp.conjugate()
        transmitted = Branch(
            packet,
            br.amplitude * t_amp,
            br.history + (HistoryEvent(element.name, x_event, t_star, "transmit"),),
            t_star,
        )
        reflected = Branch(
            _mirror_map(packet, x_event, u, consts),
            br.amplitude * r,
            br.history + (HistoryEvent(element.name, x_event, t_star, "reflect"),),
            t_star,
        )
        for child in (transmitted, reflected):
            if abs(child.amplitude) >= floor:
                stack.append(child)
    done.sort(key=lambda b: tuple((ev.element, ev.action) for ev in b.history))
    return done


def forward_propagate(scenario: Scenario, until: Optional[float] = None) -> list[Branch]:
    """Trace the source mode forward; branches are returned at ``until``."""
    until = scenario.t_end if until is None else until
    return _trace(scenario, _source_branch(scenario), until, direction=+1)


def backward_propagate(
    scenario: Scenario, detector: Optional[str] = None, until: Optional[float] = None
) -> list[Branch]:
    """Trace a detector mode backward through adjoint element actions."""
    name = detector if detector is not None else scenario.postselect_detector
    det = scenario.element(name)
    if det.kind != "detector":
        raise ValueError(f"{name!r} is not a detector")
    until = scenario.t_start if until is None else until
    return _trace(scenario, _detector_branch(scenario, det), until, direction=-1)


def probability_total(branches: Sequence[Branch]) -> float:
    """Sum of branch probabilities in the unit-norm-packet bookkeeping."""
    return float(sum(abs(b.amplitude) ** 2 for b in branches))


def invert_branch(scenario: Scenario, branch: Branch) -> Branch:
    """Undo a branch's recorded history, returning it to the source event."""
    consts = scenario.consts
    packet = branch.packet
    amp = branch.amplitude
    t = branch.at_time
    for ev in reversed(branch.history):
        packet = free_evolve(packet, ev.t - t, consts)
        element = scenario.element(ev.element)
        if ev.action == "reflect":
            packet = _mirror_map(packet, ev.x, element.velocity, consts)
            factor = element.reflect_amplitude
        else:
            factor = element.transmit_amplitude
        amp = amp / factor
        t = ev.t
    src = scenario.source
    packet = free_evolve(packet, src.t_ref - t, consts)
    return Branch(packet, amp, (), src.t_ref)


def branches_to_state(branches: Sequence[Branch]) -> SuperposedState:
    return compose_custom([(b.amplitude, b.packet) for b in branches])


@dataclass(frozen=True)
class SelectionStates:
    pre: SuperposedState
    post: SuperposedState
    pre_fidelity: float
    post_fidelity: float


def _fidelity(ideal: SuperposedState, composed: SuperposedState) -> float:
    return abs(overlap(ideal, composed)) ** 2 / (ideal.norm_squared * composed.norm_squared)


def selection_states(scenario: Scenario, target_time: Optional[float] = None) -> SelectionStates:
    """Compose the traced branch sets at the focus time into states.

    The forward composition is compared against the ideal pre-selected
    state and the backward composition against the ideal post-selected
    state; both fidelities are reported.
    """
    t_target = target_time if target_time is not None else scenario.target_time
    if t_target is None:
        raise ValueError("a target time is required to compose selection states")
    fwd = forward_propagate(scenario, until=t_target)
    bwd = backward_propagate(scenario, until=t_target)
    pre = branches_to_state(fwd)
    post = branches_to_state(bwd)
    ideal_pre = compose_psi(scenario.recipe)
    ideal_post = compose_phi(scenario.recipe)
    return SelectionStates(
        pre=pre,
        post=post,
        pre_fidelity=_fidelity(ideal_pre, pre),
        post_fidelity=_fidelity(ideal_post, post),
    )


def detection_probability(scenario: Scenario, detector: Optional[str] = None) -> float:
    """Probability that the forward state is found in the detector mode."""
    name = detector if detector is not None else scenario.postselect_detector
    det = scenario.element(name)
    mode = _detector_branch(scenario, det).packet
    branches = forward_propagate(scenario, until=det.t_ref)
    amplitude = sum(
        b.amplitude * inner_product(mode, b.packet) for b in branches
    )
    return abs(amplitude) ** 2


@dataclass(frozen=True)
class TraceMap:
    """Spacetime table of forward/backward densities and their product."""

    times: np.ndarray
    positions: np.ndarray
    forward: np.ndarray   # shape (nt, nx)
    backward: np.ndarray  # shape (nt, nx)

    @property
    def overlap(self) -> np.ndarray:
        return self.forward * self.backward

    def rows(self):
        for i, t in enumerate(self.times):
            for j, x in enumerate(self.positions):
                yield (
                    float(t),
                    float(x),
                    float(self.forward[i, j]),
                    float(self.backward[i, j]),
                    float(self.forward[i, j] * self.backward[i, j]),
                )


def _density(branches: Sequence[Branch], x: np.ndarray) -> np.ndarray:
    psi = np.zeros(x.shape, dtype=complex)
    for b in branches:
        psi += b.amplitude * b.packet(x)
    return np.abs(psi) ** 2


def weak_trace_map(
    scenario: Scenario,
    time_samples: int | Sequence[float] = 96,
    x_bins: int | Sequence[float] = 241,
    x_span: Optional[tuple[float, float]] = None,
) -> TraceMap:
    """Forward and backward densities on a spacetime lattice.

    Weak couplings can register only where both densities are nonzero, so
    the pointwise product column is the weak-trace indicator.
    """
    if isinstance(time_samples, int):
        times = np.linspace(scenario.t_start, scenario.t_end, time_samples)
    else:
        times = np.asarray(list(time_samples), dtype=float)
    if isinstance(x_bins, int):
        if x_span is None:
            xs = [e.x_ref for e in scenario.elements]
            width = 4.0 / scenario.recipe.dk_f
            x_span = (min(xs) - width, max(xs) + width)
        positions = np.linspace(x_span[0], x_span[1], x_bins)
    else:
        positions = np.asarray(list(x_bins), dtype=float)

    det = scenario.element(scenario.postselect_detector)
    forward = np.zeros((len(times), len(positions)))
    backward = np.zeros((len(times), len(positions)))
    for i, t in enumerate(times):
        fwd = forward_propagate(scenario, until=float(t))
        forward[i] = _density(fwd, positions)
        if t <= det.t_ref:
            bwd = backward_propagate(scenario, until=float(t))
            backward[i] = _density(bwd, positions)
    return TraceMap(times, positions, forward, backward)


# ----------------------------------------------------------------------
# The standard nested-interferometer scenario and its tuner.


def default_recipe() -> PacketRecipe:
    """Recipe of the shipped scenario.

    Negative wavenumbers send the beam toward negative x, which is what
    lets the resting packet be split off at +x0 before the moving pair
    crosses at the origin.
    """
    return PacketRecipe(k0=-5.0, k1=-1.0, dk_f=0.1, dk_g=0.1, x0=100.0)


def build_default_scenario(
    recipe: Optional[PacketRecipe] = None,
    consts: PhysicalConstants = DEFAULT_CONSTANTS,
    include_inner: bool = True,
    target_time: float = 50.0,
    inner_half_pre: float = 14.0,
    inner_half_post: float = 24.0,
    post_mirror_delay: float = 8.0,
    stop_delay: float = 3.0,
    launch_delay: float = 5.0,
    detect_delay: float = 6.0,
    tail: float = 5.0,
    window_half_width: float = 2.0,
) -> Scenario:
    """Nested pair of interferometers with moving elements.

    Outer: a splitter peels off the resting packet at x0, a mirror pair
    later stops the recombined beam and launches the resting packet, and a
    final splitter recombines them toward two detectors.  Inner: a
    splitter/mirror diamond that makes the two moving packets cross at the
    origin at ``target_time``.  All events are computed from the recipe
    velocities; element activity windows isolate the designed events.
    """
    recipe = default_recipe() if recipe is None else recipe
    if abs(recipe.dk_f - recipe.dk_g) > 1e-12:
        raise ValueError("scenario packets split from one beam: dk_f must equal dk_g")
    hbar, m = consts.hbar, consts.mass
    v_plus = hbar * (recipe.k0 + recipe.k1) / m
    v_minus = hbar * (recipe.k0 - recipe.k1) / m
    v_zero = hbar * recipe.k0 / m
    v_half = 0.5 * v_plus
    if v_plus * v_minus <= 0 or abs(v_plus) <= abs(v_minus):
        raise ValueError(
            "the default geometry needs co-moving packets with |v_+| > |v_-| "
            "(k0 and k1 of the same sign)"
        )
    if v_plus > 0:
        raise ValueError(
            "the shipped geometry runs the beam toward negative x so the resting "
            "packet can be split off at +x0 upstream of the crossing; use "
            "negative k0 and k1"
        )
    x0 = recipe.x0
    t_h = target_time

    # Inner diamond, pre-crossing: split at E2, one mirror per arm, arms
    # meet at the origin at the target time.
    s_pre = inner_half_pre / 2.0
    t2 = t_h - inner_half_pre
    x2 = -v_zero * inner_half_pre
    mt_event = (x2 + v_plus * s_pre, t2 + s_pre)
    mr_event = (x2 + v_minus * s_pre, t2 + s_pre)
    # Post-crossing: one mirror per arm again, arms meet at E3.
    s_post = post_mirror_delay
    t3 = t_h + inner_half_post
    x3 = v_plus * s_post + v_minus * (inner_half_post - s_post)
    m2a_event = (v_plus * s_post, t_h + s_post)
    m2b_event = (v_minus * (inner_half_post - s_post), t_h + inner_half_post - s_post)

    # Entry splitter at x0 and the feed from the source.
    t1 = t2 - (x2 - x0) / v_plus
    if not t1 > 0:
        raise ValueError("geometry leaves no room for the source; raise target_time")
    t_emit = 0.0
    x_emit = x0 - v_plus * t1

    # Stop the recombined beam, launch the resting packet, recombine.
    t_stop = t3 + stop_delay
    x_stop = x3 + v_plus * stop_delay
    t_launch = t_h + launch_delay
    t4 = t_launch + (x_stop - x0) / v_plus
    if not t4 > t_stop:
        raise ValueError("recombination precedes the beam stop; adjust delays")
    t_det = t4 + detect_delay
    x_d2 = x_stop + v_plus * detect_delay

    win = window_half_width

    def w(t):
        return (t - win, t + win)

    e = f_pair_overlap(recipe)
    frac1 = 1.0 / (3.0 + 2.0 * e)
    frac4 = 1.0 / (3.0 - 2.0 * e)

    elements = [
        Element("A", "source", x_emit, t_emit, v_plus),
        Element(
            "BS1", "beam_splitter", x0, t1, v_half,
            reflect_amplitude=1j * math.sqrt(frac1),
            transmit_amplitude=math.sqrt(1.0 - frac1),
            window=w(t1),
        ),
        Element("ML", "mirror", x0, t_launch, v_half, window=w(t_launch)),
        Element("MS", "mirror", x_stop, t_stop, v_half, window=w(t_stop)),
        Element(
            "BS4", "beam_splitter", x_stop, t4, v_half,
            reflect_amplitude=1j * math.sqrt(1.0 - frac4),
            transmit_amplitude=math.sqrt(frac4),
            window=w(t4),
        ),
        Element("D1", "detector", x_stop, t_det, 0.0),
        Element("D2", "detector", x_d2, t_det, v_plus),
    ]
    if include_inner:
        rt = math.sqrt(0.5)
        elements += [
            Element(
                "BS2", "beam_splitter", x2, t2, v_zero,
                reflect_amplitude=1j * rt, transmit_amplitude=rt, window=w(t2),
            ),
            Element("MT", "mirror", mt_event[0], mt_event[1], v_zero, window=w(mt_event[1])),
            Element("MR", "mirror", mr_event[0], mr_event[1], v_zero, window=w(mr_event[1])),
            Element("M2A", "mirror", m2a_event[0], m2a_event[1], v_zero, window=w(m2a_event[1])),
            Element("M2B", "mirror", m2b_event[0], m2b_event[1], v_zero, window=w(m2b_event[1])),
            Element(
                "BS3", "beam_splitter", x3, t3, v_zero,
                reflect_amplitude=1j * rt, transmit_amplitude=rt, window=w(t3),
            ),
        ]
    return Scenario(
        elements=tuple(elements),
        recipe=recipe,
        consts=consts,
        t_start=t_emit,
        t_end=t_det + tail,
        target_time=t_h,
        postselect_detector="D2",
    )


def splitter_fractions(scenario: Scenario) -> dict[str, float]:
    """Reflected/transmitted intensity fractions of the ordered splitters."""
    out = {}
    for e in scenario.splitters():
        out[e.name] = {
            "reflected": abs(e.reflect_amplitude) ** 2,
            "transmitted": abs(e.transmit_amplitude) ** 2,
        }
    return out


def _ideal_components(scenario: Scenario, post: bool):
    recipe = scenario.recipe
    state = compose_phi(recipe) if post else compose_psi(recipe)
    return state


def _classify_branch(branch: Branch, scenario: Scenario) -> int:
    """Map a branch at the focus time onto its ideal component index."""
    v = branch.velocity(scenario.consts)
    hbar, m = scenario.consts.hbar, scenario.consts.mass
    targets = (
        0.0,
        hbar * (scenario.recipe.k0 + scenario.recipe.k1) / m,
        hbar * (scenario.recipe.k0 - scenario.recipe.k1) / m,
    )
    return int(np.argmin([abs(v - t) for t in targets]))


def _component_coefficients(
    branches: Sequence[Branch], scenario: Scenario, post: bool
) -> dict[int, complex]:
    """Coefficient each branch contributes in front of its ideal packet."""
    ideal = _ideal_components(scenario, post)
    coeffs: dict[int, complex] = {}
    for br in branches:
        idx = _classify_branch(br, scenario)
        ref = ideal.terms[idx].packet
        if abs(br.packet.a - ref.a) > 1e-6 * abs(ref.a) or abs(br.packet.b - ref.b) > 1e-6 * (
            1.0 + abs(ref.b)
        ):
            raise TopologyMismatch(
                "a traced branch does not match any ideal component at the focus time"
            )
        z = br.amplitude * cmath.exp(br.packet.c - ref.c)
        coeffs[idx] = coeffs.get(idx, 0.0 + 0.0j) + z
    return coeffs


def _arm_mirror(branch: Branch, scenario: Scenario) -> Optional[str]:
    """Mirror adjacent to the focus time: the last one in trace order."""
    for ev in reversed(branch.history):
        if scenario.element(ev.element).kind == "mirror":
            return ev.element
    return None


def tune_splitters(scenario: Scenario, recipe: Optional[PacketRecipe] = None) -> Scenario:
    """Set splitter intensity fractions and align branch phases.

    The entry splitter reflects 1/(3 + 2 eps) of the beam into the resting
    packet and the final splitter transmits 1/(3 - 2 eps) back along the
    resting packet's line, eps = exp(-k1^2 / 2 dk_f^2); the two inner
    splitters are balanced.  Phase alignment then goes through knobs that
    cannot break unitarity: the source and detector mode phases for the
    overall components, and the unit-modulus mirror phases for the arms.
    """
    recipe = scenario.recipe if recipe is None else recipe
    if scenario.target_time is None:
        raise TopologyMismatch("tuning needs the scenario focus (target) time")
    splitters = scenario.splitters()
    if len(splitters) != 4:
        raise TopologyMismatch(f"expected 4 beam splitters, found {len(splitters)}")
    bs1, bs2, bs3, bs4 = splitters

    e = f_pair_overlap(recipe)
    frac1 = 1.0 / (3.0 + 2.0 * e)
    frac4 = 1.0 / (3.0 - 2.0 * e)
    rt = math.sqrt(0.5)
    s = scenario
    s = s.with_element(
        replace(
            s.element(bs1.name),
            reflect_amplitude=1j * math.sqrt(frac1),
            transmit_amplitude=math.sqrt(1.0 - frac1),
        )
    )
    s = s.with_element(
        replace(s.element(bs2.name), reflect_amplitude=1j * rt, transmit_amplitude=rt)
    )
    s = s.with_element(
        replace(s.element(bs3.name), reflect_amplitude=1j * rt, transmit_amplitude=rt)
    )
    s = s.with_element(
        replace(
            s.element(bs4.name),
            reflect_amplitude=1j * math.sqrt(1.0 - frac4),
            transmit_amplitude=math.sqrt(frac4),
        )
    )

    s = _align_phases(s, forward=True)
    s = _align_phases(s, forward=False)
    return s


def _align_phases(scenario: Scenario, forward: bool) -> Scenario:
    t_target = scenario.target_time
    if forward:
        branches = forward_propagate(scenario, until=t_target)
    else:
        branches = backward_propagate(scenario, until=t_target)
    ideal = _ideal_components(scenario, post=not forward)
    s = scenario

    by_component: dict[int, Branch] = {}
    for br in branches:
        idx = _classify_branch(br, s)
        if idx in by_component:
            raise TopologyMismatch("more than one branch per component at the focus time")
        by_component[idx] = br
    if set(by_component) != {0, 1, 2}:
        raise TopologyMismatch("the focus-time branch set is not (resting, f_+, f_-)")

    coeffs = _component_coefficients(branches, s, post=not forward)
    corrections = {
        idx: ideal.terms[idx].weight / coeffs[idx] for idx in (0, 1, 2)
    }

    # Align the resting component through the mode phase of the endpoint.
    endpoint = s.source if forward else s.element(s.postselect_detector)
    base = cmath.phase(corrections[0])
    s = s.with_element(replace(endpoint, mode_phase=endpoint.mode_phase + base))
    # Align each arm relative to it through the mirror nearest the focus,
    # which only that arm visits.  Backward traces see the conjugate mirror
    # phase, so the stored amplitude turns the other way.
    arm_mirrors = {}
    for idx in (1, 2):
        name = _arm_mirror(by_component[idx], s)
        if name is None:
            raise TopologyMismatch("an arm branch carries no tunable mirror")
        arm_mirrors[idx] = name
    if arm_mirrors[1] == arm_mirrors[2]:
        raise TopologyMismatch("the two arms share their focus-side mirror")
    for idx in (1, 2):
        delta = cmath.phase(corrections[idx]) - base
        if not forward:
            delta = -delta
        mirror = s.element(arm_mirrors[idx])
        s = s.with_element(
            replace(
                mirror,
                reflect_amplitude=mirror.reflect_amplitude * cmath.exp(1j * delta),
            )
        )
    return s
