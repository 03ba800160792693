"""Command-line front end.

Five subcommands reproduce the package's results from a config file:
``weak-values`` (the localized presence/momentum/energy table, analytic
against grid), ``interferometer`` (tuned scenario, branch histories,
fidelities, detection probability), ``trace-map`` (spacetime overlap
map), ``pointer`` (weak-measurement ensembles) and ``validate`` (the
invariant suite).  Outputs are CSV for array-like data and JSON for
nested reports, written deterministically: the same config and seed
produce byte-identical files.

Exit codes: 0 success, 1 physics-regime error, 2 config/parse error.
"""

from __future__ import annotations

import dataclasses
import json
import sys
from pathlib import Path

import click

from . import grid as gr
from . import interferometer as ifm
from . import pointer as ptr
from . import validate as val
from .config import RunConfig, emit_config, parse_config
from .errors import ConfigError, RegimeError
from .packets import f_pair_overlap
from .states import compose_phi, compose_psi, overlap
from .weak_values import (
    LocalObservable,
    full_line,
    local_energy,
    packet_projector_weak_values,
    region_f,
    region_g,
    region_h,
    three_box_summary,
    weak_value,
)

_KIND_LABEL = {"presence": "presence", "momentum": "momentum",
               "kinetic_energy": "energy"}


def _load(config_path, seed, grid_n, labeled) -> RunConfig:
    cfg = parse_config(config_path)
    if seed is not None:
        cfg = dataclasses.replace(cfg, seed=seed)
    if grid_n is not None:
        cfg = dataclasses.replace(
            cfg, grid=dataclasses.replace(cfg.grid, n=grid_n)
        )
    if labeled:
        cfg = dataclasses.replace(cfg, labeled=True)
    return cfg


def _prepare_out(cfg: RunConfig, out_dir: str) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config_echo.ini").write_bytes(emit_config(cfg).encode())
    return out


def _write_json(path: Path, payload) -> None:
    path.write_bytes(
        (json.dumps(payload, sort_keys=True, indent=2) + "\n").encode()
    )


def _complex_pair(z: complex):
    return [z.real, z.imag]


def common_options(fn):
    fn = click.option("--config", "config_path", required=True,
                      type=click.Path(exists=True, dir_okay=False),
                      help="Run configuration file.")(fn)
    fn = click.option("--out", "out_dir", default="out", show_default=True,
                      help="Output directory.")(fn)
    fn = click.option("--seed", type=int, default=None,
                      help="Override the configured seed.")(fn)
    fn = click.option("--grid-n", type=int, default=None,
                      help="Override the grid sample count.")(fn)
    fn = click.option("--labeled", is_flag=True, default=False,
                      help="Use the internally labeled state variant.")(fn)
    return fn


class _RegimeFailure(click.ClickException):
    exit_code = 1


class _ParseFailure(click.ClickException):
    exit_code = 2


def _run(fn):
    try:
        fn()
    except ConfigError as exc:
        raise _ParseFailure(str(exc)) from exc
    except RegimeError as exc:
        raise _RegimeFailure(str(exc)) from exc


@click.group()
def main():
    """Weak values of pre- and post-selected Gaussian packets in 1D."""


@main.command("weak-values")
@common_options
@click.option("--dump-grids", is_flag=True, default=False,
              help="Also write the sampled selection states as CSV.")
def cmd_weak_values(config_path, out_dir, seed, grid_n, labeled, dump_grids):
    """Localized presence/momentum/energy table, analytic vs grid."""

    def work():
        cfg = _load(config_path, seed, grid_n, labeled)
        out = _prepare_out(cfg, out_dir)
        psi = compose_psi(cfg.recipe, labeled=cfg.labeled)
        phi = compose_phi(cfg.recipe, labeled=cfg.labeled)

        rows = []

        def add(observable, region_name, region, kind):
            analytic = weak_value(LocalObservable(region, kind), psi, phi, cfg.consts)
            numeric = weak_value(
                LocalObservable(region, kind), psi, phi, cfg.consts,
                method="grid", grid_spec=cfg.grid,
            )
            rows.append(
                (
                    observable,
                    region_name,
                    analytic.value.real,
                    numeric.value.real,
                    abs(analytic.value - numeric.value),
                )
            )

        for region_name, region in (("g", region_g()), ("h", region_h()),
                                    ("f+", region_f(+1)), ("f-", region_f(-1)),
                                    ("full", full_line())):
            for kind in ("presence", "momentum", "kinetic_energy"):
                add(_KIND_LABEL[kind], region_name, region, kind)
        sym = local_energy(region_h(), psi, phi, cfg.consts, symmetrized=True)
        rows.append(("energy-symmetrized", "h", sym.value.real, sym.value.real, 0.0))

        table = packet_projector_weak_values(psi, phi, cfg.consts)
        boxes = three_box_summary(psi, phi)
        lines = ["observable,region,analytic,grid,abs_diff\n"]
        for observable, region_name, analytic, numeric, diff in rows:
            lines.append(f"{observable},{region_name},{analytic!r},{numeric!r},{diff!r}\n")
        lines.append(f"three-box-total,all,{boxes.total.real!r},{boxes.total.real!r},0.0\n")
        (out / "weak_values.csv").write_bytes("".join(lines).encode())

        summary = {
            "pair_overlap": f_pair_overlap(cfg.recipe),
            "selection_overlap": _complex_pair(overlap(phi, psi)),
            "packet_table": {
                row: {kind: _complex_pair(table.value(row, kind))
                      for kind in ("presence", "momentum", "kinetic_energy")}
                for row in ("g", "f+", "f-")
            },
            "three_box": {
                "g": _complex_pair(boxes.g),
                "f+": _complex_pair(boxes.f_plus),
                "f-": _complex_pair(boxes.f_minus),
                "total": _complex_pair(boxes.total),
            },
        }
        _write_json(out / "weak_values_summary.json", summary)
        if dump_grids:
            for name, state in (("psi", psi), ("phi", phi)):
                parts = gr.sample(state, cfg.grid)
                for label, wave in sorted(parts.items(), key=lambda kv: str(kv[0])):
                    suffix = "" if label is None else f"_{label}"
                    gr.dump_csv(wave, out / f"grid_{name}{suffix}.csv")
        click.echo(f"wrote {out / 'weak_values.csv'}")

    _run(work)


def _scenario_from(cfg: RunConfig) -> ifm.Scenario:
    scenario = cfg.scenario
    if scenario is None:
        scenario = ifm.build_default_scenario(cfg.recipe, cfg.consts)
    return ifm.tune_splitters(scenario)


@main.command("interferometer")
@common_options
def cmd_interferometer(config_path, out_dir, seed, grid_n, labeled):
    """Trace the scenario, tune its splitters and report fidelities."""

    def work():
        cfg = _load(config_path, seed, grid_n, labeled)
        out = _prepare_out(cfg, out_dir)
        scenario = _scenario_from(cfg)
        sel = ifm.selection_states(scenario)
        forward = ifm.forward_propagate(scenario)
        backward = ifm.backward_propagate(scenario)
        expected = abs(
            overlap(compose_phi(scenario.recipe), compose_psi(scenario.recipe))
        ) ** 2

        def branch_payload(branches):
            return [
                {
                    "amplitude": _complex_pair(b.amplitude),
                    "center": b.center,
                    "velocity": b.velocity(scenario.consts),
                    "history": [
                        {"element": ev.element, "x": ev.x, "t": ev.t, "action": ev.action}
                        for ev in b.history
                    ],
                }
                for b in branches
            ]

        payload = {
            "splitter_fractions": ifm.splitter_fractions(scenario),
            "pre_fidelity": sel.pre_fidelity,
            "post_fidelity": sel.post_fidelity,
            "detection_probability": ifm.detection_probability(scenario),
            "expected_detection_probability": expected,
            "forward_probability_total": ifm.probability_total(forward),
            "forward_branches": branch_payload(forward),
            "backward_branches": branch_payload(backward),
        }
        _write_json(out / "interferometer.json", payload)
        click.echo(f"wrote {out / 'interferometer.json'}")

    _run(work)


@main.command("trace-map")
@common_options
def cmd_trace_map(config_path, out_dir, seed, grid_n, labeled):
    """Spacetime map of forward/backward densities and their overlap."""

    def work():
        cfg = _load(config_path, seed, grid_n, labeled)
        out = _prepare_out(cfg, out_dir)
        scenario = _scenario_from(cfg)
        span = None
        if cfg.trace.x_lo is not None and cfg.trace.x_hi is not None:
            span = (cfg.trace.x_lo, cfg.trace.x_hi)
        tmap = ifm.weak_trace_map(scenario, cfg.trace.nt, cfg.trace.nx, x_span=span)
        lines = ["t,x,fwd,bwd,overlap\n"]
        for t, x, fwd, bwd, product in tmap.rows():
            lines.append(f"{t!r},{x!r},{fwd!r},{bwd!r},{product!r}\n")
        (out / "trace_map.csv").write_bytes("".join(lines).encode())
        click.echo(f"wrote {out / 'trace_map.csv'}")

    _run(work)


@main.command("pointer")
@common_options
def cmd_pointer(config_path, out_dir, seed, grid_n, labeled):
    """Monte-Carlo weak measurements of presence in each region."""

    def work():
        cfg = _load(config_path, seed, grid_n, labeled)
        out = _prepare_out(cfg, out_dir)
        psi = compose_psi(cfg.recipe, labeled=cfg.labeled)
        phi = compose_phi(cfg.recipe, labeled=cfg.labeled)
        pcfg = ptr.PointerConfig(cfg.pointer.width, cfg.pointer.deflection)
        den = overlap(phi, psi)
        ensembles = {}
        for name, region in (("g", region_g()), ("h", region_h())):
            num = weak_value(
                LocalObservable(region, "presence"), psi, phi, cfg.consts
            ).numerator
            alpha = num
            beta = den - num
            result = ptr.sample_ensemble(
                (alpha, beta), pcfg, cfg.pointer.samples, cfg.seed
            )
            ensembles[name] = {
                "weak_value_exact": _complex_pair(alpha / (alpha + beta)),
                "estimate": result.estimated_weak_value,
                "ci95": list(result.ci95),
                "mean": result.mean,
                "std_error": result.std_error,
                "n_samples": result.n_samples,
                "n_postselected": result.n_postselected,
                "postselection_probability": result.postselection_probability,
            }
        payload = {
            "config": {
                "width": pcfg.width,
                "deflection": pcfg.deflection,
                "samples": cfg.pointer.samples,
                "seed": cfg.seed,
            },
            "ensembles": ensembles,
        }
        _write_json(out / "pointer.json", payload)
        click.echo(f"wrote {out / 'pointer.json'}")

    _run(work)


@main.command("validate")
@common_options
def cmd_validate(config_path, out_dir, seed, grid_n, labeled):
    """Run the invariant suite at the configured parameters."""

    def work():
        cfg = _load(config_path, seed, grid_n, labeled)
        out = _prepare_out(cfg, out_dir)
        results = val.run_all(cfg)
        lines = []
        for res in results:
            lines.append(f"{res.status.upper():14s} {res.name}: {res.detail}\n")
            click.echo(lines[-1].rstrip())
        (out / "validate.txt").write_bytes("".join(lines).encode())
        failures = [r for r in results if r.status == "fail"]
        if failures:
            raise _RegimeFailure(f"{len(failures)} invariant check(s) failed")

    _run(work)


if __name__ == "__main__":
    main()
