"""Superpositions of Gaussian packets with optional internal labels.

A state is a weighted list of (label, weight, packet) terms.  Labels
model an orthonormal internal degree of freedom (two terms with
different labels have exactly zero overlap); ``None`` is itself a label,
so unlabeled states behave as plain spatial superpositions.

``compose_psi`` and ``compose_phi`` build the standard pre- and
post-selected three-packet states

    psi ~ g + f_+ + f_-        phi ~ g + f_+ - f_-

normalized exactly; in the separated regime the normalization divisors
reduce to sqrt(3 + 2 eps) and sqrt(3 - 2 eps) with
eps = exp(-k1^2 / (2 dk_f^2)).  The labeled variants attach the tags
(up, right, left), which makes the three terms exactly orthogonal and
the divisors exactly sqrt(3).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .packets import (
    DEFAULT_CONSTANTS,
    ComplexGaussian,
    PacketRecipe,
    PhysicalConstants,
    f_pair_overlap,
    inner_product,
    make_f,
    make_g,
    momentum_moment,
)

__all__ = [
    "Term",
    "SuperposedState",
    "overlap",
    "momentum_overlap",
    "compose_custom",
    "compose_psi",
    "compose_phi",
    "TERM_G",
    "TERM_F_PLUS",
    "TERM_F_MINUS",
]

# Term order used by compose_psi / compose_phi.
TERM_G = 0
TERM_F_PLUS = 1
TERM_F_MINUS = 2

_LABELS = ("up", "right", "left")


@dataclass(frozen=True)
class Term:
    label: Optional[str]
    weight: complex
    packet: ComplexGaussian

    def __post_init__(self):
        w = complex(self.weight)
        if not (math.isfinite(w.real) and math.isfinite(w.imag)):
            raise ValueError("term weight must be finite")
        object.__setattr__(self, "weight", w)


@dataclass(frozen=True)
class SuperposedState:
    terms: tuple[Term, ...]

    def __post_init__(self):
        if len(self.terms) == 0:
            raise ValueError("a superposed state needs at least one term")
        object.__setattr__(self, "terms", tuple(self.terms))

    @property
    def norm_squared(self) -> float:
        return overlap(self, self).real

    @property
    def norm(self) -> float:
        return math.sqrt(self.norm_squared)

    @property
    def labels(self) -> tuple[Optional[str], ...]:
        return tuple(t.label for t in self.terms)

    def keep(self, indices: Sequence[int]) -> "SuperposedState":
        """Sub-state with only the listed terms (weights preserved)."""
        for i in indices:
            if not 0 <= i < len(self.terms):
                raise ValueError(f"term index {i} out of range")
        if len(indices) == 0:
            raise ValueError("cannot keep an empty term set")
        return SuperposedState(tuple(self.terms[i] for i in indices))

    def scaled(self, factor: complex) -> "SuperposedState":
        return SuperposedState(
            tuple(Term(t.label, factor * t.weight, t.packet) for t in self.terms)
        )

    def normalized(self) -> "SuperposedState":
        return self.scaled(1.0 / self.norm)


def overlap(s1: SuperposedState, s2: SuperposedState) -> complex:
    """<s1|s2> as the exact double sum; cross-label terms vanish."""
    total = 0.0 + 0.0j
    for t1 in s1.terms:
        for t2 in s2.terms:
            if t1.label != t2.label:
                continue
            total += t1.weight.conjugate() * t2.weight * inner_product(t1.packet, t2.packet)
    return total


def momentum_overlap(
    s1: SuperposedState,
    s2: SuperposedState,
    n: int,
    consts: PhysicalConstants = DEFAULT_CONSTANTS,
) -> complex:
    """<s1| phat^n |s2> with the same label orthogonality as ``overlap``."""
    total = 0.0 + 0.0j
    for t1 in s1.terms:
        for t2 in s2.terms:
            if t1.label != t2.label:
                continue
            total += t1.weight.conjugate() * t2.weight * momentum_moment(
                t1.packet, t2.packet, n, consts
            )
    return total


def compose_custom(entries: Iterable) -> SuperposedState:
    """State from (weight, packet) or (label, weight, packet) entries, as given."""
    terms = []
    for entry in entries:
        if len(entry) == 2:
            weight, packet = entry
            label = None
        elif len(entry) == 3:
            label, weight, packet = entry
        else:
            raise ValueError("entries must be (weight, packet) or (label, weight, packet)")
        terms.append(Term(label, weight, packet))
    if not terms:
        raise ValueError("compose_custom needs at least one term")
    return SuperposedState(tuple(terms))


def _compose_selected(recipe: PacketRecipe, signs, labeled: bool) -> SuperposedState:
    packets = (make_g(recipe), make_f(recipe, +1), make_f(recipe, -1))
    labels = _LABELS if labeled else (None, None, None)
    raw = SuperposedState(
        tuple(Term(lbl, s, p) for lbl, s, p in zip(labels, signs, packets))
    )
    return raw.normalized()


def compose_psi(recipe: PacketRecipe, labeled: bool = False) -> SuperposedState:
    """Unit-norm pre-selected state with terms (g, f_+, f_-), equal signs."""
    return _compose_selected(recipe, (1.0, 1.0, 1.0), labeled)


def compose_phi(recipe: PacketRecipe, labeled: bool = False) -> SuperposedState:
    """Unit-norm post-selected state with terms (g, f_+, -f_-)."""
    return _compose_selected(recipe, (1.0, 1.0, -1.0), labeled)
