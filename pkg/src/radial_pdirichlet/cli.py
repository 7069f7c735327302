"""Command-line front end.

Usage:
    radial-pdirichlet solve --r 2 --R 2 --p 1.5 --out run/
    radial-pdirichlet energy --r 2 --R 2 --p 1 --nt 256 --ntheta 256
    radial-pdirichlet threshold --r 2
    radial-pdirichlet sweep --out run/ --format csv
    radial-pdirichlet verify --r 2 --R 2 --p 1.5 --seed 42 --out run/
    radial-pdirichlet plot --r 2 --R 2 --p 1 --out run/

Exit status: 0 on success, 1 on invalid input, numerical failure or a failed
invariant, 2 when no minimizer exists (p = 1 beyond the threshold).
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
import warnings
from dataclasses import dataclass
from pathlib import Path

from . import verify as vf
from .energy import energy_report
from .errors import AnnulusError, NonexistenceError
from .geometry import PolarGridMap, polar_grid, sample_radial
from .minimizer import DEFAULT_NODES, build_minimizer, p1_modulus_bound, p1_threshold
from .plot import write_profile_svg
from .serialize import dumps

EXIT_OK, EXIT_FAIL, EXIT_NONEXISTENT = 0, 1, 2
COMMANDS = ("solve", "energy", "verify", "threshold", "sweep", "plot")
FORMATS = ("csv", "json")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    r: float | None = None
    R: float | None = None
    p: float | None = None
    nodes: int = DEFAULT_NODES
    nt: int | None = None
    ntheta: int | None = None
    seed: int = 0
    out_dir: Path = Path(".")
    format: str = "csv"
    trials: int = 200
    jobs: int = 1
    inject: str | None = None
    grid_map: Path | None = None

    def validate(self) -> None:
        """Collect every problem and raise them together."""
        errs = []
        needs_point = self.command in ("solve", "energy", "plot")
        if self.command == "verify" and any(v is not None for v in (self.r, self.R, self.p)):
            needs_point = True
        if needs_point or self.command == "threshold":
            if self.r is None:
                errs.append("--r is required")
            elif not (math.isfinite(self.r) and self.r > 1):
                errs.append(f"--r must be a finite number > 1, got {self.r!r}")
        if needs_point:
            if self.R is None:
                errs.append("--R is required")
            elif not (math.isfinite(self.R) and self.R > 1):
                errs.append(f"--R must be a finite number > 1, got {self.R!r}")
            if self.p is None:
                errs.append("--p is required")
            elif not 1 <= self.p <= 2:
                errs.append(f"--p must lie in [1, 2], got {self.p!r}")
        if self.nodes < 3:
            errs.append(f"--nodes must be at least 3, got {self.nodes}")
        for name in ("nt", "ntheta"):
            v = getattr(self, name)
            if v is not None and v < 16:
                errs.append(f"--{name} must be at least 16, got {v}")
        if self.trials < 0:
            errs.append(f"--trials must be nonnegative, got {self.trials}")
        if self.jobs < 1:
            errs.append(f"--jobs must be positive, got {self.jobs}")
        if not 0 <= self.seed < 2**64:
            errs.append(f"--seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.format not in FORMATS:
            errs.append(f"--format must be one of {FORMATS}, got {self.format!r}")
        if self.inject not in (None, "g-offset"):
            errs.append(f"--inject supports only 'g-offset', got {self.inject!r}")
        if errs:
            raise UsageError("; ".join(errs))

    @property
    def resolution(self) -> tuple[int, int]:
        return (self.nt or 512, self.ntheta or 512)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--r", type=float, help="outer radius of the domain annulus A(1, r)")
    common.add_argument("--R", type=float, help="outer radius of the target annulus A(1, R)")
    common.add_argument("--p", type=float, help="exponent in [1, 2]")
    common.add_argument("--nodes", type=int, default=DEFAULT_NODES, help="profile table size")
    common.add_argument("--nt", type=int, help="radial grid size")
    common.add_argument("--ntheta", type=int, help="angular grid size")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", type=Path, default=Path("."), help="output directory")
    common.add_argument("--format", default="csv", help="csv or json")
    common.add_argument("--trials", type=int, default=200, help="perturbations per point (verify)")
    common.add_argument("--jobs", type=int, default=1, help="worker processes (verify, sweep)")
    common.add_argument("--inject", help="negative control for verify: g-offset")
    common.add_argument("--map", type=Path, dest="grid_map", help="grid map CSV to evaluate (energy)")

    parser = _Parser(prog="radial-pdirichlet", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def parse_config(argv: list[str] | None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    cfg = RunConfig(
        command=ns.command,
        r=ns.r,
        R=ns.R,
        p=ns.p,
        nodes=ns.nodes,
        nt=ns.nt,
        ntheta=ns.ntheta,
        seed=ns.seed,
        out_dir=ns.out,
        format=ns.format,
        trials=ns.trials,
        jobs=ns.jobs,
        inject=ns.inject,
        grid_map=ns.grid_map,
    )
    cfg.validate()
    return cfg


def _write(cfg: RunConfig, name: str, text: str) -> Path:
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    path = cfg.out_dir / name
    path.write_text(text)
    return path


def _solve(cfg: RunConfig):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return build_minimizer(cfg.r, cfg.R, cfg.p, cfg.nodes)


def cmd_solve(cfg: RunConfig) -> int:
    m = _solve(cfg)
    if cfg.format == "csv":
        cfg.out_dir.mkdir(parents=True, exist_ok=True)
        m.to_csv(cfg.out_dir / "profile.csv")
    else:
        cols = {"t": m.t_table, "H": m.H_table, "dH": m.dH_table, "g": m.g_table, "P": m.P_table}
        _write(cfg, "profile.json", dumps(cols))
    rep = energy_report(m).to_dict()
    rep.update({"r": m.r, "R": m.R, "p": m.p, "regime": m.regime, "param": m.b_or_tau, "c": m.c,
                "flags": list(m.flags)})
    _write(cfg, "report.json", dumps(rep))
    print(f"energy {m.energy:.17g}  lower bound gap {rep['gap']:.3g}  -> {cfg.out_dir}")
    return EXIT_OK


def cmd_energy(cfg: RunConfig) -> int:
    m = _solve(cfg)
    grid = None
    if cfg.grid_map is not None:
        grid = PolarGridMap.from_csv(cfg.grid_map)
    elif cfg.nt or cfg.ntheta:
        nt, nth = cfg.resolution
        t, _ = polar_grid(1.0, m.r, nt, nth)
        grid = sample_radial(m.H_exact, t, nth)
    text = energy_report(m, grid).to_json()
    sys.stdout.write(text)
    if cfg.out_dir != Path("."):
        _write(cfg, "report.json", text)
    return EXIT_OK


def cmd_threshold(cfg: RunConfig) -> int:
    out = {"r": cfg.r, "R0": p1_threshold(cfg.r), "log_R0": p1_modulus_bound(cfg.r)}
    if cfg.format == "json":
        sys.stdout.write(dumps(out))
    else:
        print(f"R0 {out['R0']:.17g}")
        print(f"log_R0 {out['log_R0']:.17g}")
    return EXIT_OK


def _sweep_row(point):
    r, R, p, nodes = point
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        m = build_minimizer(r, R, p, nodes)
    rep = energy_report(m)
    return {"r": r, "R": R, "p": p, "regime": m.regime, "param": m.b_or_tau, "c": m.c,
            "energy": rep.energy, "lower_bound": rep.lower_bound, "gap": rep.gap,
            "p_const_dev": rep.p_const_dev, "el_residual": rep.el_residual}


def cmd_sweep(cfg: RunConfig) -> int:
    points = [(r, R, p, cfg.nodes) for r, R, p in vf.sweep_points()]
    if cfg.jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(cfg.jobs) as ex:
            rows = list(ex.map(_sweep_row, points))
    else:
        rows = [_sweep_row(pt) for pt in points]
    if cfg.format == "json":
        path = _write(cfg, "sweep.json", dumps(rows))
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(list(rows[0]))
        for row in rows:
            w.writerow([f"{v:.17g}" if isinstance(v, float) else v for v in row.values()])
        path = _write(cfg, "sweep.csv", buf.getvalue())
    print(f"{len(rows)} points -> {path}")
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    kwargs = dict(n_trials=cfg.trials, resolution=cfg.resolution, seed=cfg.seed, nodes=cfg.nodes,
                  inject=cfg.inject)
    points = [(cfg.r, cfg.R, cfg.p)] if cfg.r is not None else None
    reports = vf.verify_sweep(points, jobs=cfg.jobs, **kwargs)
    _write(cfg, "verify.json", dumps([rep.to_dict() for rep in reports]))
    trials = [dict(r=rep.r, R=rep.R, p=rep.p, **t.to_dict()) for rep in reports for t in rep.trials]
    _write(cfg, "trials.json", dumps(trials))
    failed = [(rep, name) for rep in reports for name in rep.failed()]
    for rep in reports:
        print(f"{'PASS' if rep.passed else 'FAIL'} r={rep.r:g} R={rep.R:g} p={rep.p:g}")
    if failed:
        rep, name = failed[0]
        print(f"invariant failed: {name} at r={rep.r:g} R={rep.R:g} p={rep.p:g}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_plot(cfg: RunConfig) -> int:
    m = _solve(cfg)
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    path = cfg.out_dir / "profile.svg"
    dev = write_profile_svg(m, path)
    print(f"max |H - t| = {dev:.6g} -> {path}")
    return EXIT_OK


HANDLERS = {
    "solve": cmd_solve,
    "energy": cmd_energy,
    "verify": cmd_verify,
    "threshold": cmd_threshold,
    "sweep": cmd_sweep,
    "plot": cmd_plot,
}


def main(argv: list[str] | None = None) -> int:
    try:
        cfg = parse_config(argv)
        return HANDLERS[cfg.command](cfg)
    except NonexistenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(f"R0 {exc.threshold:.17g}")
        return EXIT_NONEXISTENT
    except (UsageError, AnnulusError, ValueError, ArithmeticError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
