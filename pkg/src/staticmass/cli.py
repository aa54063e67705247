"""Command-line front end: ``staticmass verify|sweep|list-checks``.

Exit codes: 0 all checks pass, 1 a check failed, 2 bad configuration,
3 output could not be written.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import os
import sys
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from . import checks as chk
from . import quasilocal_energy as qe
from . import stability_analysis as sa
from .errors import CheckFailure, ConfigError, StaticMassError
from .graph_manifold import (
    SlopeProfile,
    build_constant_graph,
    build_custom_graph,
    build_kottler_schwarzschild_graph,
)
from .reference_geometry import ReferenceSpace
from .reporting import write_csv, write_json, write_loglog_svg

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3
SCHEMA_VERSION = 1
SEED_ENV = "STATICMASS_SEED"
FAMILY_KINDS = ("kottler_schwarzschild", "constant", "table")
FORMATS = ("json", "csv", "svg")
SWEEP_COLUMNS = ("i", "mu", "mass", "h_o", "height_gap", "vol_gap", "vol_gap_fixed",
                 "mass_A_plus", "mass_A_minus", "mass_B_plus", "mass_B_minus", "flat_bound",
                 "flat_estimate")

_TOP_KEYS = {"v", "space", "family", "constants", "checks", "output"}
_SPACE_KEYS = {"epsilon", "n", "crossSectionVolume"}
_FAMILY_KEYS = {"kind", "mu", "mus", "rOuter", "rInner", "height", "profile"}
_CONSTANT_KEYS = {"xi", "measure", "penroseVariant"}
_OUTPUT_KEYS = {"directory", "formats"}


@dataclass(frozen=True)
class ExperimentConfig:
    epsilon: int
    n: int
    cross_section_volume: Optional[float]
    kind: str
    r_outer: float
    mu: Optional[float] = None
    mus: Optional[tuple] = None
    r_inner: Optional[float] = None
    height: float = 0.0
    profile: Optional[Path] = None
    xi: float = 1.0
    measure: str = "product"
    variant: str = "linear"
    checks: tuple = ()
    directory: Path = Path("out")
    formats: tuple = ("json", "csv")
    raw: dict = field(default_factory=dict, compare=False, repr=False)

    def space(self):
        return ReferenceSpace.create(self.epsilon, self.n, self.cross_section_volume)


def _section(data, key, allowed, required=True):
    sec = data.get(key)
    if sec is None:
        if required:
            raise ConfigError(f"missing section {key!r}")
        return {}
    if not isinstance(sec, dict):
        raise ConfigError(f"section {key!r} must be an object")
    unknown = set(sec) - allowed
    if unknown:
        raise ConfigError(f"unknown field(s) in {key!r}: {', '.join(sorted(unknown))}")
    return sec


def _number(sec, key, default=None, required=False):
    if key not in sec:
        if required:
            raise ConfigError(f"missing field {key!r}")
        return default
    val = sec[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(f"field {key!r} must be a number")
    return float(val)


def _mu_sequence(value):
    if isinstance(value, list):
        if not value:
            raise ConfigError("family.mus is empty")
        return tuple(float(x) for x in value)
    if isinstance(value, dict):
        extra = set(value) - {"base", "start", "stop"}
        if extra:
            raise ConfigError(f"unknown field(s) in family.mus: {', '.join(sorted(extra))}")
        try:
            base, start, stop = float(value["base"]), int(value["start"]), int(value["stop"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError("family.mus needs numeric base, start, stop") from exc
        if stop < start:
            raise ConfigError("family.mus needs start <= stop")
        return tuple(base ** (-i) for i in range(start, stop + 1))
    raise ConfigError("family.mus must be a list or {base, start, stop}")


def parse_config(data, base_dir=Path(".")):
    """Validate a decoded configuration object into an :class:`ExperimentConfig`."""
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a JSON object")
    unknown = set(data) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown top-level field(s): {', '.join(sorted(unknown))}")
    if data.get("v") != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema version {data.get('v')!r} (expected 1)")
    space = _section(data, "space", _SPACE_KEYS)
    eps, n = space.get("epsilon"), space.get("n")
    if eps not in (-1, 0, 1) or isinstance(eps, bool):
        raise ConfigError(f"space.epsilon must be -1, 0 or 1 (got {eps!r})")
    if not isinstance(n, int) or isinstance(n, bool) or n < 3:
        raise ConfigError(f"space.n must be an integer >= 3 (got {n!r})")
    fam = _section(data, "family", _FAMILY_KEYS)
    kind = fam.get("kind", "kottler_schwarzschild")
    if kind not in FAMILY_KINDS:
        raise ConfigError(f"family.kind must be one of {FAMILY_KINDS}")
    consts = _section(data, "constants", _CONSTANT_KEYS, required=False)
    out = _section(data, "output", _OUTPUT_KEYS, required=False)
    names = data.get("checks", [])
    if not isinstance(names, list) or not all(isinstance(x, str) for x in names):
        raise ConfigError("checks must be a list of names")
    formats = out.get("formats", ["json", "csv"])
    if not isinstance(formats, list) or not set(formats) <= set(FORMATS):
        raise ConfigError(f"output.formats must be a subset of {FORMATS}")
    measure = consts.get("measure", "product")
    if measure not in sa.MEASURES:
        raise ConfigError(f"constants.measure must be one of {sa.MEASURES}")
    variant = consts.get("penroseVariant", "linear")
    if variant not in qe.PENROSE_VARIANTS:
        raise ConfigError(f"constants.penroseVariant must be one of {qe.PENROSE_VARIANTS}")
    xi = _number(consts, "xi", 1.0)
    if not xi >= 1:
        raise ConfigError("constants.xi must be >= 1")
    profile = fam.get("profile")
    if kind == "table":
        if not isinstance(profile, str):
            raise ConfigError("family.profile (path) is required for kind 'table'")
        profile = (base_dir / profile).resolve()
    cfg = ExperimentConfig(
        epsilon=eps,
        n=n,
        cross_section_volume=_number(space, "crossSectionVolume"),
        kind=kind,
        r_outer=_number(fam, "rOuter", required=kind != "table") or 0.0,
        mu=_number(fam, "mu"),
        mus=_mu_sequence(fam["mus"]) if "mus" in fam else None,
        r_inner=_number(fam, "rInner"),
        height=_number(fam, "height", 0.0),
        profile=profile if kind == "table" else None,
        xi=xi,
        measure=measure,
        variant=variant,
        checks=tuple(chk.resolve(x) for x in names),
        directory=(base_dir / out.get("directory", "out")),
        formats=tuple(formats),
        raw=data,
    )
    if kind == "constant" and cfg.r_inner is None:
        raise ConfigError("family.rInner is required for kind 'constant'")
    return cfg


def load_config(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return parse_config(data, path.parent)


def seed_from_env():
    raw = os.environ.get(SEED_ENV, "0")
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"{SEED_ENV} must be an integer (got {raw!r})") from exc


def build_graph(cfg, space):
    if cfg.kind == "constant":
        return build_constant_graph(space, cfg.r_inner, cfg.r_outer, cfg.height)
    if cfg.kind == "table":
        return build_custom_graph(space, SlopeProfile.load_table(cfg.profile), cfg.height)
    if cfg.mu is None:
        return None
    return build_kottler_schwarzschild_graph(space, cfg.mu, cfg.r_outer)


def _sweep_rows(sweep):
    rows = []
    last = len(sweep.rows) - 1
    for k, row in enumerate(sweep.rows):
        rows.append([getattr(row, c) for c in SWEEP_COLUMNS]
                    + [sweep.gamma_fit if k == last else None])
    return rows


def run(cfg, mode="verify", tolerance=None, seed=0):
    """Execute the configured checks; returns ``(summary, artifacts)`` without touching disk."""
    started = time.perf_counter()
    names = list(cfg.checks)
    if mode == "sweep":
        if cfg.mus is None:
            raise ConfigError("sweep needs family.mus")
        if not names:
            names = ["theorem13_convergence"]
    try:
        space = cfg.space()
        graph = build_graph(cfg, space)
        sweep = None
        if cfg.mus is not None and (mode == "sweep" or "theorem13_convergence" in names):
            sweep = sa.convergence_experiment(space, cfg.r_outer, cfg.mus, xi=cfg.xi,
                                              measure=cfg.measure, variant=cfg.variant)
    except StaticMassError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"inadmissible configuration: {exc}") from exc

    ctx = chk.CheckContext(space, graph, np.random.default_rng(seed), xi=cfg.xi,
                           measure=cfg.measure, variant=cfg.variant, tolerance=tolerance,
                           sweep=sweep)
    results = [chk.run_check(name, ctx) for name in names]

    artifacts = {}
    if graph is not None and "json" in cfg.formats:
        artifacts["energy.json"] = {"config": _echo(cfg), **qe.energy_report(graph, cfg.variant).to_dict()}
        if not graph.is_constant:
            reports = {m: sa.stability_report(graph, cfg.xi, m, cfg.variant).to_dict()
                       for m in sa.MEASURES}
            artifacts["stability.json"] = {"config": _echo(cfg), "measure": cfg.measure,
                                           "reports": reports}
    if sweep is not None:
        if "csv" in cfg.formats:
            artifacts["sweep.csv"] = (list(SWEEP_COLUMNS) + ["gamma_fit"], _sweep_rows(sweep))
        if "svg" in cfg.formats:
            artifacts["sweep.svg"] = sweep

    summary = {
        "tool": "staticmass",
        "version": __version__,
        "mode": mode,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        "wall_clock_seconds": time.perf_counter() - started,
        "seed": seed,
        "passed": all(r.passed for r in results),
        "checks": [r.to_dict() for r in results],
        "config": cfg.raw,
    }
    if sweep is not None:
        summary["gamma_fit"] = sweep.gamma_fit
    return summary, artifacts


def _echo(cfg):
    return {
        "epsilon": cfg.epsilon, "n": cfg.n, "kind": cfg.kind, "mu": cfg.mu,
        "rOuter": cfg.r_outer, "xi": cfg.xi, "measure": cfg.measure,
        "penroseVariant": cfg.variant,
    }


def write_artifacts(directory, summary, artifacts):
    """Write every artifact; ``summary.json`` is the only file carrying a timestamp."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for name in sorted(artifacts):
        payload = artifacts[name]
        path = directory / name
        if name.endswith(".json"):
            write_json(path, payload)
        elif name.endswith(".csv"):
            write_csv(path, *payload)
        elif name.endswith(".svg"):
            ok = write_loglog_svg(path, payload.column("mass"), payload.column("flat_bound"),
                                  payload.gamma_fit, payload.fit_window)
            summary.setdefault("notes", []).append(
                "sweep.svg written" if ok else "matplotlib unavailable: sweep.svg skipped")
    write_json(directory / "summary.json", summary)


def _print_results(summary, stream):
    for r in summary["checks"]:
        resid = "" if r["residual"] is None else f"  residual={r['residual']:.3e}"
        print(f"{r['status'].upper():4}  {r['name']}{resid}  {r['detail']}", file=stream)


def _parser():
    p = argparse.ArgumentParser(prog="staticmass",
                                description="Static quasi-local mass verification suite.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in (("verify", "run the configured checks on one graph"),
                        ("sweep", "run the mu -> 0 convergence experiment")):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("config", help="experiment configuration (JSON)")
        sp.add_argument("--output-dir", help="override output.directory")
        sp.add_argument("--measure", choices=sa.MEASURES, help="mass measure for vertical extent")
        sp.add_argument("--xi", type=float, help="threshold parameter xi >= 1")
        sp.add_argument("--tolerance", type=float, help="override every check tolerance")
    sub.add_parser("list-checks", help="list available checks")
    return p


def main(argv=None):
    args = _parser().parse_args(argv)
    if args.command == "list-checks":
        for name, desc in chk.list_checks():
            print(f"{name:26} {desc}")
        return EXIT_OK
    try:
        cfg = load_config(args.config)
        overrides = {}
        if args.output_dir:
            overrides["directory"] = Path(args.output_dir)
        if args.measure:
            overrides["measure"] = args.measure
        if args.xi is not None:
            if not args.xi >= 1:
                raise ConfigError("--xi must be >= 1")
            overrides["xi"] = args.xi
        cfg = replace(cfg, **overrides)
        summary, artifacts = run(cfg, args.command, args.tolerance, seed_from_env())
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        write_artifacts(cfg.directory, summary, artifacts)
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    _print_results(summary, sys.stdout)
    if not summary["passed"]:
        failed = [r["name"] for r in summary["checks"] if r["status"] == chk.FAIL]
        print(f"{CheckFailure.__name__}: {', '.join(failed)}", file=sys.stderr)
        return EXIT_CHECK
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
