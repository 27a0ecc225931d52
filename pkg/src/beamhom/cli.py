"""Command-line front end: solves, sweeps, error maps, rate fits, verification.

Every run validates its configuration up front, writes the requested
artifacts plus a manifest echoing the configuration, and is deterministic:
the same config produces byte-identical CSV/JSON output.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .experiments import (
    PAIR_CONTINUUM,
    PAIR_KM,
    PAPER_DIFF_N,
    PAPER_ERRMAP_N,
    PAPER_RHO,
    LOAD_FAMILIES,
    SweepConfig,
    convergence_study,
    err_maps,
    max_diff_sweep,
    theory_suite,
)
from .fields import CompatibilityError
from .fourier import freq_grids
from .solvers import LoadSpec, solve_field
from .symbols import DISCRETE, KINDS, RECTANGULAR, TRIANGULAR, LatticeSpec
from .svgplot import heatmap_panels, loglog_chart

SCHEMA_VERSION = 1

COMMANDS = ("solve", "diff-sweep", "err-maps", "convergence", "verify")
FORMATS = ("csv", "json", "svg")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str = "verify"
    lattice: str = TRIANGULAR
    n_list: list = field(default_factory=list)
    rho_star_list: list = field(default_factory=lambda: [1.0])
    model: str = DISCRETE
    pair: str = PAIR_CONTINUUM
    cutoff: int = 10
    load_modes: list = field(default_factory=list)  # rows (ip, jp, fx, fy, tau)
    load_family: str = "single-mode-force"
    formats: list = field(default_factory=lambda: ["csv"])
    out: str = "."
    seed: int = 0
    err_index: str = ""  # restrict err-map SVG panels to one index
    preset: str = ""

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"command: expected one of {COMMANDS}, got {self.command!r}")
        if self.lattice not in (TRIANGULAR, RECTANGULAR):
            raise ConfigError(f"lattice: expected triangular or rectangular, got {self.lattice!r}")
        if self.model not in KINDS:
            raise ConfigError(f"model: expected one of {KINDS}, got {self.model!r}")
        if self.pair not in (PAIR_CONTINUUM, PAIR_KM):
            raise ConfigError(f"pair: unknown model pair {self.pair!r}")
        if self.cutoff < 1:
            raise ConfigError(f"cutoff: must be >= 1, got {self.cutoff}")
        if any(f not in FORMATS for f in self.formats):
            raise ConfigError(f"format: expected subset of {FORMATS}, got {self.formats}")
        if any(n < 2 for n in self.n_list):
            raise ConfigError(f"n: grid sizes must be >= 2, got {self.n_list}")
        if any(r <= 0 for r in self.rho_star_list):
            raise ConfigError(f"rho-star: values must be positive, got {self.rho_star_list}")
        if self.command in ("solve",) and not self.n_list:
            raise ConfigError("n: a grid size is required for solve")


PRESETS = {
    "paper-fig2": dict(command="diff-sweep", pair=PAIR_CONTINUUM,
                       n_list=list(PAPER_DIFF_N), rho_star_list=list(PAPER_RHO), cutoff=10),
    "paper-fig3": dict(command="diff-sweep", pair=PAIR_KM,
                       n_list=list(PAPER_DIFF_N), rho_star_list=list(PAPER_RHO), cutoff=10),
    "paper-fig4": dict(command="err-maps", n_list=list(PAPER_ERRMAP_N),
                       rho_star_list=list(PAPER_RHO), err_index="err0"),
    "paper-fig5": dict(command="err-maps", n_list=list(PAPER_ERRMAP_N),
                       rho_star_list=list(PAPER_RHO), err_index="err1"),
    "paper-fig6": dict(command="err-maps", n_list=list(PAPER_ERRMAP_N),
                       rho_star_list=list(PAPER_RHO), err_index="err2"),
}


def _parse_list(text: str, cast):
    return [cast(tok) for tok in text.replace(",", " ").split()]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="beamhom",
        description="Fourier-mode homogenization workbench for periodic beam lattices",
    )
    p.add_argument("command", nargs="?", choices=COMMANDS, help="what to run")
    p.add_argument("--preset", choices=sorted(PRESETS), help="named experiment preset")
    p.add_argument("--config", help="JSON config file; flags override its fields")
    p.add_argument("--lattice", choices=(TRIANGULAR, RECTANGULAR))
    p.add_argument("--n", help="grid size or comma-separated list, e.g. 4,8,16")
    p.add_argument("--rho-star", dest="rho_star", help="stiffness ratio or list")
    p.add_argument("--model", choices=KINDS)
    p.add_argument("--pair", choices=(PAIR_CONTINUUM, PAIR_KM))
    p.add_argument("--cutoff", type=int, help="low-frequency cutoff M")
    p.add_argument("--load", action="append", default=None, metavar="IP,JP,FX,FY,TAU",
                   help="inline load mode (repeatable)")
    p.add_argument("--load-family", choices=LOAD_FAMILIES)
    p.add_argument("--format", dest="formats", help="comma-separated subset of csv,json,svg")
    p.add_argument("--out", help="output directory")
    p.add_argument("--seed", type=int)
    return p


def config_from_args(args) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"config: cannot read {args.config}: {exc}") from exc
        for key, val in data.items():
            if not hasattr(cfg, key):
                raise ConfigError(f"config: unknown field {key!r}")
            setattr(cfg, key, val)
    if args.preset:
        cfg.preset = args.preset
        for key, val in PRESETS[args.preset].items():
            setattr(cfg, key, val)
    if args.command:
        cfg.command = args.command
    if args.lattice:
        cfg.lattice = args.lattice
    if args.n:
        cfg.n_list = _parse_list(args.n, int)
    if args.rho_star:
        cfg.rho_star_list = _parse_list(args.rho_star, float)
    if args.model:
        cfg.model = args.model
    if args.pair:
        cfg.pair = args.pair
    if args.cutoff is not None:
        cfg.cutoff = args.cutoff
    if args.load is not None:
        try:
            cfg.load_modes = [[float(x) for x in _parse_list(tok, float)] for tok in args.load]
        except ValueError as exc:
            raise ConfigError(f"load: {exc}") from exc
        if any(len(row) != 5 for row in cfg.load_modes):
            raise ConfigError("load: each entry needs 5 numbers ip,jp,fx,fy,tau")
    if args.load_family:
        cfg.load_family = args.load_family
    if args.formats:
        cfg.formats = _parse_list(args.formats, str)
    if args.out:
        cfg.out = args.out
    if args.seed is not None:
        cfg.seed = args.seed
    cfg.validate()
    return cfg


def _write_manifest(outdir: Path, cfg: RunConfig, artifacts: list[str]) -> None:
    manifest = {
        "package_version": __version__,
        "schema_version": SCHEMA_VERSION,
        "config": asdict(cfg),
        "artifacts": sorted(artifacts),
    }
    (outdir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    )


def _spec(cfg: RunConfig, rho: float) -> LatticeSpec:
    if cfg.lattice == TRIANGULAR:
        return LatticeSpec.triangular(rho)
    return LatticeSpec.rectangular(rho)


def _run_solve(cfg: RunConfig, outdir: Path) -> list[str]:
    n = cfg.n_list[0]
    rho = cfg.rho_star_list[0]
    loads = LoadSpec.from_modes(n, cfg.load_modes) if cfg.load_modes else LoadSpec.zero(n)
    sol = solve_field(_spec(cfg, rho), n, loads, cfg.model)
    grid = sol.spatial()
    artifacts = []
    if "csv" in cfg.formats:
        lines = ["i,j,ux,uy,theta"]
        for i in range(n):
            for j in range(n):
                lines.append(
                    f"{i},{j},{grid.u[i, j, 0]:.17g},{grid.u[i, j, 1]:.17g},"
                    f"{grid.theta[i, j]:.17g}"
                )
        (outdir / "solution.csv").write_text("\n".join(lines) + "\n")
        artifacts.append("solution.csv")
    if "json" in cfg.formats:
        payload = {
            "n": n, "rho_star": rho, "model": cfg.model, "lattice": cfg.lattice,
            "max_rel_residual": sol.max_rel_residual,
            "u": grid.u.tolist(), "theta": grid.theta.tolist(),
        }
        (outdir / "solution.json").write_text(json.dumps(payload, sort_keys=True) + "\n")
        artifacts.append("solution.json")
    return artifacts


def _run_diff_sweep(cfg: RunConfig, outdir: Path) -> list[str]:
    sweep_cfg = SweepConfig(
        n_list=tuple(cfg.n_list or PAPER_DIFF_N),
        rho_star_list=tuple(cfg.rho_star_list or PAPER_RHO),
        low_freq_cutoff=cfg.cutoff,
        model_pair=cfg.pair,
        family=cfg.lattice,
    )
    report = max_diff_sweep(sweep_cfg)
    artifacts = []
    if "csv" in cfg.formats:
        report.to_csv(outdir / "diff_sweep.csv")
        artifacts.append("diff_sweep.csv")
    if "json" in cfg.formats:
        payload = [asdict(r) for r in report.rows]
        (outdir / "diff_sweep.json").write_text(json.dumps(payload, sort_keys=True) + "\n")
        artifacts.append("diff_sweep.json")
    if "svg" in cfg.formats:
        series = {}
        for rho in sweep_cfg.rho_star_list:
            for low in (False, True):
                eps, vals = report.series(rho, low_freq=low)
                tag = "lowfreq" if low else "full"
                series[f"rho*={rho:g} {tag}"] = (eps, vals)
        loglog_chart(series, outdir / "diff_sweep.svg", xlabel="eps", ylabel="max diff")
        artifacts.append("diff_sweep.svg")
    return artifacts


def _centered(arr: np.ndarray) -> np.ndarray:
    return np.fft.fftshift(arr)


def _run_err_maps(cfg: RunConfig, outdir: Path) -> list[str]:
    report = err_maps(cfg.n_list or None, cfg.rho_star_list or None, family=cfg.lattice)
    artifacts = []
    if "csv" in cfg.formats:
        report.to_csv(outdir / "err_maps.csv")
        artifacts.append("err_maps.csv")
    if "json" in cfg.formats:
        payload = {
            f"n={st.n},rho={st.rho_star:g}": {
                name: list(report.summaries[(st.n, st.rho_star)][name])
                for name in ("err0", "err1", "err2")
            }
            for st in report.settings
        }
        (outdir / "err_maps_summary.json").write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n"
        )
        artifacts.append("err_maps_summary.json")
    if "svg" in cfg.formats:
        n_list = sorted({st.n for st in report.settings})
        rho_list = sorted({st.rho_star for st in report.settings})
        indexes = [cfg.err_index] if cfg.err_index else ["err0", "err1", "err2"]
        for name in indexes:
            panels, titles = [], []
            for n in n_list:
                row, trow = [], []
                for rho in rho_list:
                    row.append(_centered(report.maps[(n, rho)][name]))
                    lo, hi = report.summaries[(n, rho)][name]
                    trow.append(f"({lo:.3g},{hi:.3g})")
                panels.append(row)
                titles.append(trow)
            heatmap_panels(
                panels,
                [f"eps=1/{n}" for n in n_list],
                [f"rho*={r:g}" for r in rho_list],
                titles,
                outdir / f"{name}.svg",
            )
            artifacts.append(f"{name}.svg")
    return artifacts


def _run_convergence(cfg: RunConfig, outdir: Path) -> list[str]:
    report = convergence_study(
        cfg.load_family,
        n_list=tuple(cfg.n_list or (8, 16, 32, 64, 128)),
        rho_star=cfg.rho_star_list[0],
        family=cfg.lattice,
    )
    artifacts = []
    if "csv" in cfg.formats:
        report.to_csv(outdir / "convergence.csv")
        artifacts.append("convergence.csv")
    if "json" in cfg.formats:
        payload = {
            "load_family": report.load_family,
            "rho_star": report.rho_star,
            "eps": list(report.eps),
            "errors": {k: list(v) for k, v in report.errors.items()},
            "slopes": {k: list(v) for k, v in report.slopes.items()},
            "exact": report.exact,
        }
        (outdir / "convergence.json").write_text(json.dumps(payload, sort_keys=True) + "\n")
        artifacts.append("convergence.json")
    if "svg" in cfg.formats and not report.exact:
        series = {k: (np.array(report.eps), np.array(v))
                  for k, v in report.errors.items() if min(v) > 0}
        loglog_chart(series, outdir / "convergence.svg", xlabel="eps", ylabel="error")
        artifacts.append("convergence.svg")
    for name, (slope, resid) in sorted(report.slopes.items()):
        print(f"{name}: slope={slope:.4f} resid={resid:.4f}")
    return artifacts


def _run_verify(cfg: RunConfig, outdir: Path) -> list[str]:
    report = theory_suite(seed=cfg.seed, strict=False)
    for line in report.lines():
        print(line)
    artifacts = []
    if "json" in cfg.formats or True:  # always persist the verification record
        payload = [
            {"name": c.name, "passed": c.passed, "measured": c.measured}
            for c in report.checks
        ]
        (outdir / "verify.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        artifacts.append("verify.json")
    if not report.all_passed:
        raise RuntimeError("theory checks failed; see verify.json")
    return artifacts


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    outdir = Path(cfg.out)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"config error: out: {exc}", file=sys.stderr)
        return 2
    runners = {
        "solve": _run_solve,
        "diff-sweep": _run_diff_sweep,
        "err-maps": _run_err_maps,
        "convergence": _run_convergence,
        "verify": _run_verify,
    }
    try:
        artifacts = runners[cfg.command](cfg, outdir)
    except CompatibilityError as exc:
        print(f"load error: {exc}", file=sys.stderr)
        return 1
    except (RuntimeError, ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _write_manifest(outdir, cfg, artifacts)
    print(f"wrote {', '.join(sorted(artifacts + ['manifest.json']))} to {outdir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
