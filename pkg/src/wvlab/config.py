"""Run configuration: a sectioned key = value file.

Every physics parameter is explicit -- the recipe section has no
defaults.  Constants, grid, pointer and trace settings fall back to the
documented defaults.  A scenario may be given inline through
``[scenario]`` plus ``[element.NAME]`` sections; commands that need one
and do not find it build the shipped nested-interferometer layout from
the recipe.

The emitted echo of a parsed configuration re-parses to an equal
``RunConfig``, which is what makes runs reproducible from their output
directories alone.
"""

from __future__ import annotations

import configparser
import io
import math
from dataclasses import dataclass, field
from typing import Optional

from .errors import ConfigError
from .grid import GridSpec
from .interferometer import Element, Scenario
from .packets import PacketRecipe, PhysicalConstants

__all__ = [
    "PointerSettings",
    "TraceSettings",
    "RunConfig",
    "parse_config",
    "parse_config_text",
    "emit_config",
    "example_config",
]


@dataclass(frozen=True)
class PointerSettings:
    width: float = 100.0
    deflection: float = 1.0
    samples: int = 100000

    def __post_init__(self):
        if self.width <= 0 or self.deflection < 0:
            raise ConfigError("pointer width must be positive and deflection non-negative")
        if self.samples < 1:
            raise ConfigError("pointer samples must be at least 1")


@dataclass(frozen=True)
class TraceSettings:
    nt: int = 96
    nx: int = 241
    x_lo: Optional[float] = None
    x_hi: Optional[float] = None

    def __post_init__(self):
        if self.nt < 2 or self.nx < 2:
            raise ConfigError("trace map needs at least 2 samples per axis")


@dataclass(frozen=True)
class RunConfig:
    recipe: PacketRecipe
    consts: PhysicalConstants = PhysicalConstants()
    grid: GridSpec = GridSpec(-400.0, 500.0, 2 ** 15)
    seed: int = 0
    labeled: bool = False
    pointer: PointerSettings = PointerSettings()
    trace: TraceSettings = TraceSettings()
    scenario: Optional[Scenario] = None


def _get(parser, section, option, conv, default=None, required=False):
    if not parser.has_option(section, option):
        if required:
            raise ConfigError(f"[{section}] is missing the required option {option!r}")
        return default
    raw = parser.get(section, option)
    try:
        return conv(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[{section}] {option} = {raw!r}: {exc}") from exc


def _bool(raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"expected a boolean, got {raw!r}")


def _pair(raw: str) -> tuple[float, float]:
    parts = raw.split()
    if len(parts) != 2:
        raise ValueError("expected two numbers")
    return float(parts[0]), float(parts[1])


def _parse_element(parser, section: str) -> Element:
    name = section.split(".", 1)[1]
    kind = _get(parser, section, "kind", str, required=True)
    x = _get(parser, section, "x", float, required=True)
    t = _get(parser, section, "t", float, required=True)
    velocity = _get(parser, section, "velocity", float, required=True)
    window = _get(parser, section, "window", _pair)
    mode_phase = _get(parser, section, "mode_phase", float, 0.0)
    kwargs = dict(window=window, mode_phase=mode_phase)
    if kind == "beam_splitter":
        r_re = _get(parser, section, "reflect_re", float, required=True)
        r_im = _get(parser, section, "reflect_im", float, required=True)
        t_re = _get(parser, section, "transmit_re", float, required=True)
        t_im = _get(parser, section, "transmit_im", float, required=True)
        kwargs["reflect_amplitude"] = complex(r_re, r_im)
        kwargs["transmit_amplitude"] = complex(t_re, t_im)
    elif kind == "mirror":
        r_re = _get(parser, section, "reflect_re", float, 1.0)
        r_im = _get(parser, section, "reflect_im", float, 0.0)
        kwargs["reflect_amplitude"] = complex(r_re, r_im)
    try:
        return Element(name, kind, x, t, velocity, **kwargs)
    except ValueError as exc:
        raise ConfigError(f"[{section}]: {exc}") from exc


def parse_config_text(text: str) -> RunConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config parse error: {exc}") from exc

    if not parser.has_section("recipe"):
        raise ConfigError("a [recipe] section is required")
    try:
        recipe = PacketRecipe(
            k0=_get(parser, "recipe", "k0", float, required=True),
            k1=_get(parser, "recipe", "k1", float, required=True),
            dk_f=_get(parser, "recipe", "dk_f", float, required=True),
            dk_g=_get(parser, "recipe", "dk_g", float, required=True),
            x0=_get(parser, "recipe", "x0", float, required=True),
        )
        consts = PhysicalConstants(
            hbar=_get(parser, "constants", "hbar", float, 1.0)
            if parser.has_section("constants") else 1.0,
            mass=_get(parser, "constants", "mass", float, 1.0)
            if parser.has_section("constants") else 1.0,
        )
        grid_defaults = RunConfig.__dataclass_fields__["grid"].default
        if parser.has_section("grid"):
            grid = GridSpec(
                x_min=_get(parser, "grid", "x_min", float, grid_defaults.x_min),
                x_max=_get(parser, "grid", "x_max", float, grid_defaults.x_max),
                n=_get(parser, "grid", "n", int, grid_defaults.n),
            )
        else:
            grid = grid_defaults
        seed = _get(parser, "run", "seed", int, 0) if parser.has_section("run") else 0
        labeled = (
            _get(parser, "run", "labeled", _bool, False)
            if parser.has_section("run") else False
        )
        pointer = PointerSettings(
            width=_get(parser, "pointer", "width", float, 100.0)
            if parser.has_section("pointer") else 100.0,
            deflection=_get(parser, "pointer", "deflection", float, 1.0)
            if parser.has_section("pointer") else 1.0,
            samples=_get(parser, "pointer", "samples", int, 100000)
            if parser.has_section("pointer") else 100000,
        )
        trace = TraceSettings(
            nt=_get(parser, "trace", "nt", int, 96) if parser.has_section("trace") else 96,
            nx=_get(parser, "trace", "nx", int, 241) if parser.has_section("trace") else 241,
            x_lo=_get(parser, "trace", "x_lo", float) if parser.has_section("trace") else None,
            x_hi=_get(parser, "trace", "x_hi", float) if parser.has_section("trace") else None,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    scenario = None
    element_sections = sorted(s for s in parser.sections() if s.startswith("element."))
    if parser.has_section("scenario") or element_sections:
        if not element_sections:
            raise ConfigError("a [scenario] section needs [element.*] sections")
        elements = tuple(_parse_element(parser, s) for s in element_sections)
        try:
            scenario = Scenario(
                elements=elements,
                recipe=recipe,
                consts=consts,
                t_start=_get(parser, "scenario", "t_start", float, 0.0),
                t_end=_get(parser, "scenario", "t_end", float, required=True),
                target_time=_get(parser, "scenario", "target_time", float),
                postselect_detector=_get(parser, "scenario", "postselect", str, "D2"),
                branch_amplitude_floor=_get(
                    parser, "scenario", "branch_floor", float, 1e-12
                ),
            )
        except ValueError as exc:
            raise ConfigError(f"[scenario]: {exc}") from exc
    return RunConfig(
        recipe=recipe,
        consts=consts,
        grid=grid,
        seed=seed,
        labeled=labeled,
        pointer=pointer,
        trace=trace,
        scenario=scenario,
    )


def parse_config(path) -> RunConfig:
    try:
        with open(path, "r") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config_text(text)


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_config(config: RunConfig) -> str:
    """Serialize a RunConfig so that parsing the output reproduces it."""
    out = io.StringIO()

    def section(name, pairs):
        out.write(f"[{name}]\n")
        for key, value in pairs:
            out.write(f"{key} = {_fmt(value)}\n")
        out.write("\n")

    r = config.recipe
    section("recipe", [("k0", r.k0), ("k1", r.k1), ("dk_f", r.dk_f),
                       ("dk_g", r.dk_g), ("x0", r.x0)])
    section("constants", [("hbar", config.consts.hbar), ("mass", config.consts.mass)])
    g = config.grid
    section("grid", [("x_min", g.x_min), ("x_max", g.x_max), ("n", g.n)])
    section("run", [("seed", config.seed), ("labeled", config.labeled)])
    p = config.pointer
    section("pointer", [("width", p.width), ("deflection", p.deflection),
                        ("samples", p.samples)])
    t = config.trace
    pairs = [("nt", t.nt), ("nx", t.nx)]
    if t.x_lo is not None:
        pairs.append(("x_lo", t.x_lo))
    if t.x_hi is not None:
        pairs.append(("x_hi", t.x_hi))
    section("trace", pairs)

    s = config.scenario
    if s is not None:
        pairs = [("t_start", s.t_start), ("t_end", s.t_end)]
        if s.target_time is not None:
            pairs.append(("target_time", s.target_time))
        pairs += [("postselect", s.postselect_detector),
                  ("branch_floor", s.branch_amplitude_floor)]
        section("scenario", pairs)
        for e in s.elements:
            pairs = [("kind", e.kind), ("x", e.x_ref), ("t", e.t_ref),
                     ("velocity", e.velocity)]
            if e.kind == "beam_splitter":
                pairs += [
                    ("reflect_re", e.reflect_amplitude.real),
                    ("reflect_im", e.reflect_amplitude.imag),
                    ("transmit_re", e.transmit_amplitude.real),
                    ("transmit_im", e.transmit_amplitude.imag),
                ]
            elif e.kind == "mirror":
                pairs += [
                    ("reflect_re", e.reflect_amplitude.real),
                    ("reflect_im", e.reflect_amplitude.imag),
                ]
            if e.window is not None:
                pairs.append(("window", f"{e.window[0]!r} {e.window[1]!r}"))
            if e.mode_phase:
                pairs.append(("mode_phase", e.mode_phase))
            section(f"element.{e.name}", pairs)
    return out.getvalue()


def example_config() -> str:
    """A complete config exercising every command with the shipped scenario."""
    return (
        "[recipe]\n"
        "k0 = -5.0\n"
        "k1 = -1.0\n"
        "dk_f = 0.1\n"
        "dk_g = 0.1\n"
        "x0 = 100.0\n"
        "\n"
        "[constants]\n"
        "hbar = 1.0\n"
        "mass = 1.0\n"
        "\n"
        "[grid]\n"
        "x_min = -400.0\n"
        "x_max = 500.0\n"
        "n = 32768\n"
        "\n"
        "[run]\n"
        "seed = 0\n"
        "labeled = false\n"
        "\n"
        "[pointer]\n"
        "width = 100.0\n"
        "deflection = 1.0\n"
        "samples = 100000\n"
        "\n"
        "[trace]\n"
        "nt = 96\n"
        "nx = 241\n"
    )
