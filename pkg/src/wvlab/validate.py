"""Invariant suite run by the ``validate`` command.

Each check returns pass/fail plus a detail string.  Checks that only
hold in the separated regime (packet groups far apart compared to their
widths) are reported as ``out-of-regime`` rather than failed when the
configuration does not reach the gate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import grid as gr
from . import interferometer as ifm
from .packets import (
    PacketRecipe,
    f_pair_overlap,
    free_evolve,
    galilean_boost,
    inner_product,
    inverse_fourier_transform,
    fourier_transform,
    make_f,
    make_g,
    momentum_moment,
)
from .states import compose_phi, compose_psi, overlap
from .weak_values import LocalObservable, region_g, region_h, weak_value

SEPARATION_GATE = 20.0

__all__ = ["CheckResult", "run_all", "SEPARATION_GATE"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    status: str  # "pass" | "fail" | "out-of-regime"
    detail: str


def _result(name: str, ok: bool, detail: str) -> CheckResult:
    return CheckResult(name, "pass" if ok else "fail", detail)


def _random_recipes(base: PacketRecipe, count: int, seed: int):
    rng = np.random.default_rng(seed)
    recipes = [base]
    for _ in range(count - 1):
        dk = float(rng.uniform(0.08, 0.35))
        recipes.append(
            PacketRecipe(
                k0=float(rng.uniform(2.0, 7.0)) * (1 if rng.random() < 0.5 else -1),
                k1=float(rng.uniform(0.3, 1.8)),
                dk_f=dk,
                dk_g=dk,
                x0=float(rng.uniform(10.0, 14.0)) / dk,
            )
        )
    return recipes


def run_all(config) -> list[CheckResult]:
    recipe = config.recipe
    consts = config.consts
    spec = config.grid
    results: list[CheckResult] = []
    in_regime = recipe.separation_ratio >= SEPARATION_GATE

    # Packet algebra.
    worst = 0.0
    for r in _random_recipes(recipe, 8, config.seed + 1):
        for p in (make_f(r, +1), make_f(r, -1), make_g(r)):
            worst = max(worst, abs(p.norm - 1.0))
    results.append(_result("packet-unit-norm", worst < 1e-12, f"max |norm-1| = {worst:.2e}"))

    worst = 0.0
    for r in _random_recipes(recipe, 8, config.seed + 2):
        got = inner_product(make_f(r, +1), make_f(r, -1))
        worst = max(worst, abs(got - f_pair_overlap(r)))
    results.append(
        _result("pair-overlap-closed-form", worst < 1e-12, f"max deviation = {worst:.2e}")
    )

    p = make_f(recipe, +1)
    rt = inverse_fourier_transform(fourier_transform(p))
    dev = max(abs(rt.a - p.a), abs(rt.b - p.b), abs(rt.c - p.c))
    results.append(_result("fourier-roundtrip", dev < 1e-12, f"coefficient drift = {dev:.2e}"))

    ev = free_evolve(free_evolve(p, 7.5, consts), -7.5, consts)
    dev = max(abs(ev.a - p.a), abs(ev.b - p.b), abs(ev.c - p.c))
    results.append(_result("evolve-reversible", dev < 1e-12, f"coefficient drift = {dev:.2e}"))

    bb = galilean_boost(galilean_boost(p, 3.0, consts), -3.0, consts)
    dev = max(abs(bb.a - p.a), abs(bb.b - p.b), abs(bb.c - p.c))
    results.append(_result("boost-group-inverse", dev < 1e-12, f"coefficient drift = {dev:.2e}"))

    herm = abs(
        inner_product(make_f(recipe, +1), make_g(recipe))
        - inner_product(make_g(recipe), make_f(recipe, +1)).conjugate()
    )
    results.append(_result("inner-product-hermitian", herm < 1e-12, f"deviation = {herm:.2e}"))

    mom = momentum_moment(p, p, 1, consts)
    results.append(
        _result("momentum-expectation-real", abs(mom.imag) < 1e-12, f"imag = {mom.imag:.2e}")
    )

    # Compositor.
    psi = compose_psi(recipe)
    phi = compose_phi(recipe)
    dev = max(abs(psi.norm - 1.0), abs(phi.norm - 1.0))
    results.append(_result("composed-states-unit-norm", dev < 1e-12, f"max |norm-1| = {dev:.2e}"))
    lab = compose_psi(recipe, labeled=True)
    dev = abs(overlap(lab, compose_phi(recipe, labeled=True)) - 1.0 / 3.0)
    results.append(
        _result("labeled-selection-overlap", dev < 1e-12, f"|<phi|psi> - 1/3| = {dev:.2e}")
    )

    # Grid oracle.
    try:
        parts = gr.sample(psi, spec)
        dev = abs(gr.grid_norm(parts) - 1.0)
        results.append(_result("grid-sampling-norm", dev < 1e-8, f"|norm-1| = {dev:.2e}"))
        w = parts[None]
        evolved = gr.evolve_free(w, 3.0, consts)
        dev = abs(evolved.norm - w.norm)
        results.append(_result("grid-evolution-unitary", dev < 1e-12, f"norm drift = {dev:.2e}"))
        k, tilde = gr.momentum_representation(w)
        dk = k[1] - k[0]
        dev = abs(float(np.sum(np.abs(tilde) ** 2) * dk) - w.norm_squared)
        results.append(_result("parseval", dev < 1e-10, f"deviation = {dev:.2e}"))
    except Exception as exc:  # noqa: BLE001 - reported, not raised
        results.append(CheckResult("grid-oracle", "fail", f"{type(exc).__name__}: {exc}"))

    # Separation-dependent checks.
    if not in_regime:
        detail = (
            f"separation ratio {recipe.separation_ratio:.2f} below gate "
            f"{SEPARATION_GATE}; separated-regime checks skipped"
        )
        results.append(CheckResult("separation-theorem", "out-of-regime", detail))
        results.append(CheckResult("region-additivity", "out-of-regime", detail))
    else:
        pres_g = weak_value(LocalObservable(region_g(), "presence"), psi, phi, consts)
        pres_h = weak_value(LocalObservable(region_h(), "presence"), psi, phi, consts)
        mom_g = weak_value(LocalObservable(region_g(), "momentum"), psi, phi, consts)
        mom_h = weak_value(LocalObservable(region_h(), "momentum"), psi, phi, consts)
        target = 2.0 * consts.hbar * recipe.k1
        ok = (
            abs(pres_g.value - 1.0) < 1e-8
            and abs(pres_h.value) < 1e-8
            and abs(mom_h.value - target) < 1e-8 * max(1.0, abs(target))
            and abs(mom_g.value) < 1e-8
        )
        results.append(
            _result(
                "separation-theorem",
                ok,
                f"presence=({pres_g.value.real:.6f}, {pres_h.value.real:.6f}) "
                f"momentum=({mom_g.value.real:.2e}, {mom_h.value.real:.6f})",
            )
        )
        full = weak_value(
            LocalObservable(region_g().identity(), "momentum"), psi, phi, consts
        )
        dev = abs(mom_g.value + mom_h.value - full.value)
        results.append(_result("region-additivity", dev < 1e-8, f"correction = {dev:.2e}"))

    # Interferometer conservation on the shipped layout.
    try:
        scenario = config.scenario
        if scenario is None:
            scenario = ifm.build_default_scenario(
                ifm.default_recipe() if recipe.k0 > 0 else recipe, consts
            )
        scenario = ifm.tune_splitters(scenario)
        branches = ifm.forward_propagate(scenario)
        dev = abs(ifm.probability_total(branches) - 1.0)
        results.append(
            _result("branch-probability-conservation", dev < 1e-10, f"|sum-1| = {dev:.2e}")
        )
        sel = ifm.selection_states(scenario)
        ok = sel.pre_fidelity > 1 - 1e-6 and sel.post_fidelity > 1 - 1e-6
        results.append(
            _result(
                "selection-fidelity",
                ok,
                f"pre = {sel.pre_fidelity:.9f}, post = {sel.post_fidelity:.9f}",
            )
        )
        p_det = ifm.detection_probability(scenario)
        expected = abs(overlap(compose_phi(scenario.recipe), compose_psi(scenario.recipe))) ** 2
        dev = abs(p_det - expected)
        results.append(
            _result("detection-probability", dev < 1e-6, f"|P - |<phi|psi>|^2| = {dev:.2e}")
        )
    except Exception as exc:  # noqa: BLE001 - reported, not raised
        results.append(CheckResult("interferometer", "fail", f"{type(exc).__name__}: {exc}"))

    return results
