"""Command line front end.

Exit codes: 0 ok, 1 verification failure, 2 bad configuration, 3 numeric
inconsistency, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

from . import __version__, catalog
from ._kernels import backend
from .domains import LqBall, parse_q
from .engine import ArithConfig, BohrParams, arith_bohr_estimate, radius_solve
from .family import TestBattery, default_K, halfplane_extremal, random_battery, structured_members
from .suites import ENGINE_MAX_N, run_suite

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3, 4

TABLE_COLUMNS = ("quantity", "source", "p", "q", "n", "K", "seed", "tail_policy", "bound_kind", "value")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    p: float = 1.0
    q: float = math.inf
    n: int = 1
    K: int | None = None
    tol: float | None = None
    seed: int = 0
    battery: str = "default"
    format: str = "json"
    out: str | None = None
    suite: str = "all"
    grid: dict = field(default_factory=dict)

    def validate(self) -> "RunConfig":
        try:
            self.p = float(self.p)
            self.q = parse_q(self.q)
            self.n = int(self.n)
            self.seed = int(self.seed)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
        if not (1.0 <= self.p < math.inf):
            raise ConfigError(f"p must lie in [1, inf), got {self.p}")
        if self.n < 1:
            raise ConfigError("n must be >= 1")
        if self.K is not None and int(self.K) < 1:
            raise ConfigError("K must be >= 1")
        if self.tol is not None and not float(self.tol) > 0:
            raise ConfigError("tol must be positive")
        if self.format not in ("json", "csv"):
            raise ConfigError("format must be json or csv")
        return self

    @property
    def K_eff(self) -> int:
        return default_K(self.n) if self.K is None else int(self.K)

    @property
    def q_label(self) -> str:
        return "inf" if math.isinf(self.q) else f"{self.q:g}"


def build_battery(cfg: RunConfig, ball: LqBall) -> TestBattery:
    """``default`` | ``structured`` | ``axis`` | ``size:N``."""
    spec = cfg.battery
    K = cfg.K_eff
    if spec == "default":
        return random_battery(ball, K=K, seed=cfg.seed)
    if spec == "structured":
        return TestBattery(tuple(structured_members(ball, K)), ball, K)
    if spec == "axis":
        return random_battery(ball, size=ball.n, K=K, seed=cfg.seed)
    if spec.startswith("size:"):
        try:
            size = int(spec.split(":", 1)[1])
        except ValueError as exc:
            raise ConfigError(f"bad battery spec {spec!r}") from exc
        return random_battery(ball, size=size, K=K, seed=cfg.seed)
    raise ConfigError(f"unknown battery spec {spec!r}")


# ---------------------------------------------------------------- commands


def cmd_radius1d(cfg: RunConfig) -> tuple[dict, int]:
    K = cfg.K_eff if cfg.K is not None else default_K(1)
    tol = 1e-9 if cfg.tol is None else float(cfg.tol)
    ball = LqBall(1)
    bat = TestBattery((halfplane_extremal(1.0, K),), ball, K)
    ri = radius_solve(bat, BohrParams(cfg.p), ball, tol)
    closed = catalog.h1p_closed_form(cfg.p)
    gap = abs(ri.mid - closed)
    ok = gap <= tol and ri.contains(closed, tol)
    rec = {
        "command": "radius1d",
        "quantity": "H^1_p(D)",
        "p": cfg.p,
        "n": 1,
        "K": K,
        "seed": cfg.seed,
        "interval": [ri.lo, ri.hi],
        "estimate": ri.mid,
        "closed_form": closed,
        "gap": gap,
        "tol": tol,
        "bound_kind": ri.bound_kind,
        "flags": list(ri.flags),
        "verdict": "ok" if ok else "tolerance not met",
    }
    return rec, EXIT_OK if ok else EXIT_NUMERIC


def cmd_radius(cfg: RunConfig) -> tuple[dict, int]:
    if cfg.n == 1:
        return cmd_radius1d(cfg)
    ball = LqBall(cfg.n, cfg.q)
    bat = build_battery(cfg, ball)
    tol = 1e-6 if cfg.tol is None else float(cfg.tol)
    ri = radius_solve(bat, BohrParams(cfg.p), ball, tol)
    problems = ri.inconsistencies(tol)
    warnings = [
        f"battery radius {ri.lo:.12g} above catalog upper {r.value:.12g}"
        for r in ri.catalog
        if r.kind == "upper" and ri.lo > r.value + tol
    ]
    rec = {
        "command": "radius",
        **ri.to_record(),
        "seed": cfg.seed,
        "battery": cfg.battery,
        "battery_manifest": bat.manifest(),
        "inconsistencies": problems,
        "warnings": warnings,
        "verdict": "ok" if not problems else "inconsistent",
    }
    return rec, EXIT_OK if not problems else EXIT_NUMERIC


def cmd_arith(cfg: RunConfig) -> tuple[dict, int]:
    ball = LqBall(cfg.n, cfg.q)
    bat = build_battery(cfg, ball)
    params = BohrParams(cfg.p)
    tol = 1e-5 if cfg.tol is None else float(cfg.tol)
    est = arith_bohr_estimate(bat, params, ArithConfig(seed=cfg.seed))
    rad = radius_solve(bat, params, ball)
    via_radius = catalog.arith_from_radius(rad.mid, cfg.n, cfg.q)
    lo, hi = catalog.arith_bounds(cfg.p, cfg.q, cfg.n)
    problems = []
    if "unconstrained" in est.flags:
        problems.append("estimate unconstrained by the battery")
    if est.value < lo.value - tol:
        problems.append(f"estimate {est.value:.12g} below catalog lower {lo.value:.12g}")
    if est.value < via_radius - tol:
        problems.append(f"estimate {est.value:.12g} below radius/n^(1/q) {via_radius:.12g}")
    warnings = []
    if est.value > hi.value + tol:
        warnings.append(f"estimate {est.value:.12g} above catalog upper {hi.value:.12g}")
    rec = {
        "command": "arith",
        **est.to_record(),
        "q": cfg.q_label,
        "n": cfg.n,
        "seed": cfg.seed,
        "battery": cfg.battery,
        "battery_manifest": bat.manifest(),
        "radius_interval": [rad.lo, rad.hi],
        "radius_over_n_1q": via_radius,
        "catalog": [lo.to_json(), hi.to_json()],
        "inconsistencies": problems,
        "warnings": warnings,
        "verdict": "ok" if not problems else "inconsistent",
    }
    return rec, EXIT_OK if not problems else EXIT_NUMERIC


def cmd_verify(cfg: RunConfig) -> tuple[list[dict], int]:
    if cfg.suite not in ("homogeneous", "scaling", "monotone", "sandwich", "all"):
        raise ConfigError(f"unknown suite {cfg.suite!r}")
    rows = run_suite(cfg.suite, cfg.seed)
    failed = sum(not r["passed"] for r in rows)
    return rows, EXIT_OK if failed == 0 else EXIT_VERIFY


def _as_list(val: Any, conv) -> list:
    if val is None:
        return []
    if isinstance(val, str):
        return [conv(x) for x in val.split(",") if x.strip()]
    if isinstance(val, (list, tuple)):
        return [conv(x) for x in val]
    return [conv(val)]


def _table_row(quantity, source, p, q, n, K, seed, policy, kind, value) -> dict:
    return {
        "quantity": quantity,
        "source": source,
        "p": p,
        "q": "inf" if math.isinf(q) else q,
        "n": n,
        "K": K,
        "seed": seed,
        "tail_policy": policy,
        "bound_kind": kind,
        "value": value,
    }


def table_cell(p: float, q: float, n: int, seed: int, K: int | None, engine: bool) -> list[dict]:
    """Rows for one grid cell. Closed-form rows carry K = ``n/a``."""
    rows = []
    if n >= 2:
        for label, pair in catalog.kn_bounds(n, q).items():
            for rec in pair:
                if rec is not None:
                    rows.append(_table_row("K^n", label, p, q, n, "n/a", seed, "n/a", rec.kind, rec.value))
    for rec in catalog.radius_bounds(p, q, n):
        rows.append(_table_row("H^n_p", rec.source, p, q, n, "n/a", seed, "n/a", rec.kind, rec.value))
    for rec in catalog.arith_bounds(p, q, n):
        rows.append(_table_row("A_p", rec.source, p, q, n, "n/a", seed, "n/a", rec.kind, rec.value))
    if engine:
        KK = default_K(n) if K is None else K
        ball = LqBall(n, q)
        bat = random_battery(ball, K=KK, seed=seed)
        params = BohrParams(p)
        ri = radius_solve(bat, params, ball)
        est = arith_bohr_estimate(bat, params, ArithConfig(seed=seed))
        meta = (KK, seed, params.tail_policy)
        rows.append(_table_row("H^n_p", "battery bracket lo", p, q, n, *meta, ri.bound_kind, ri.lo))
        rows.append(_table_row("H^n_p", "battery bracket hi", p, q, n, *meta, ri.bound_kind, ri.hi))
        rows.append(_table_row("A_p", "battery optimum", p, q, n, *meta, est.bound_kind, est.value))
    return rows


def table_rows(grid: dict, seed: int, K: int | None = None, engine: bool = True, jobs: int = 1) -> list[dict]:
    """Long-format rows, one number per row, in grid order (p, q, n).

    Cells may run in worker processes; assembly is always index-ordered, so
    the output does not depend on ``jobs``.
    """
    ns = _as_list(grid.get("n"), int)
    qs = _as_list(grid.get("q"), parse_q)
    ps = _as_list(grid.get("p"), float)
    engine_max_n = int(grid.get("engine_max_n", ENGINE_MAX_N))
    cells = [(p, q, n, seed, K, engine and n <= engine_max_n) for p in ps for q in qs for n in ns]
    if jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(table_cell, *zip(*cells)))
    else:
        chunks = [table_cell(*c) for c in cells]
    return [row for chunk in chunks for row in chunk]


def cmd_table(cfg: RunConfig) -> tuple[list[dict], int]:
    grid = dict(cfg.grid)
    grid.setdefault("n", [])
    grid.setdefault("q", [])
    grid.setdefault("p", [])
    jobs = int(grid.get("jobs", 1))
    return table_rows(grid, cfg.seed, cfg.K, bool(grid.get("engine", True)), jobs), EXIT_OK


# ---------------------------------------------------------------- I/O


def _fmt(v: Any) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def render_csv(rows: Sequence[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r.get(c, "")) for c in columns])
    return buf.getvalue()


def _json_default(o: Any):
    if hasattr(o, "tolist"):
        return o.tolist()
    raise TypeError(f"not serializable: {type(o)}")


def render(payload: Any, fmt: str, columns: Sequence[str] | None = None) -> str:
    if fmt == "csv":
        rows = payload if isinstance(payload, list) else [_flatten(payload)]
        cols = columns or (list(rows[0].keys()) if rows else [])
        return render_csv(rows, cols)
    return json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + "\n"


def _flatten(rec: dict) -> dict:
    return {k: (json.dumps(v, sort_keys=True, default=_json_default) if isinstance(v, (list, dict)) else v) for k, v in rec.items()}


def emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    with path.open("w", encoding="utf-8", newline="") as fh:
        fh.write(text)


# ---------------------------------------------------------------- parser


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bohrlab", description="p-Bohr radii on l_q balls: estimates, bounds, checks.")
    parser.add_argument("--version", action="version", version=f"bohrlab {__version__} ({backend()})")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--p", default=None, help="Bohr exponent p >= 1")
        sp.add_argument("--q", default=None, help="ball exponent in [1, inf]; spell infinity 'inf'")
        sp.add_argument("--n", default=None, help="dimension")
        sp.add_argument("--K", default=None, type=int, help="truncation degree (default 30 in 1-D, 12 otherwise)")
        sp.add_argument("--tol", default=None, type=float)
        sp.add_argument("--seed", default=None, type=int)
        sp.add_argument("--battery", default=None, help="default | structured | axis | size:N")
        sp.add_argument("--format", default=None, choices=("json", "csv"))
        sp.add_argument("--out", default=None, help="output path (stdout when omitted)")
        sp.add_argument("--config", default=None, help="JSON file; command-line flags take precedence")

    common(sub.add_parser("radius1d", help="disc radius by bisection against the closed form"))
    common(sub.add_parser("radius", help="battery radius bracket for the l_q ball"))
    common(sub.add_parser("arith", help="arithmetic radius estimate with relations and bounds"))
    sp = sub.add_parser("verify", help="run invariant suites")
    common(sp)
    sp.add_argument("suite", nargs="?", default=None, choices=("homogeneous", "scaling", "monotone", "sandwich", "all"))
    sp = sub.add_parser("table", help="comparison table of catalog bounds and battery estimates")
    common(sp)
    sp.add_argument("--no-engine", action="store_true", help="catalog columns only")
    return parser


_FIELDS = ("p", "q", "n", "K", "tol", "seed", "battery", "format", "out", "suite")


def make_config(args: argparse.Namespace) -> RunConfig:
    base: dict[str, Any] = {}
    if args.config:
        try:
            base = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(base, dict):
            raise ConfigError("config must be a JSON object")
    merged = {k: v for k, v in base.items() if k in _FIELDS or k == "grid"}
    for k in _FIELDS:
        v = getattr(args, k, None)
        if v is not None:
            merged[k] = v
    grid = dict(merged.pop("grid", {}) or {})
    if args.command == "table":
        # axes may be comma lists; they feed the grid
        for k in ("n", "q", "p"):
            if k in merged:
                grid[k] = merged.pop(k)
        if getattr(args, "no_engine", False):
            grid["engine"] = False
        for k, conv in (("n", int), ("q", parse_q), ("p", float)):
            if k in grid:
                try:
                    _as_list(grid[k], conv)
                except (TypeError, ValueError) as exc:
                    raise ConfigError(f"bad grid axis {k}: {exc}") from exc
    cfg = RunConfig(command=args.command, grid=grid, **merged)
    return cfg.validate()


COMMANDS = {
    "radius1d": cmd_radius1d,
    "radius": cmd_radius,
    "arith": cmd_arith,
    "verify": cmd_verify,
    "table": cmd_table,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = make_config(args)
        payload, code = COMMANDS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"bohrlab: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"bohrlab: invalid input: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    columns = TABLE_COLUMNS if cfg.command == "table" else None
    if cfg.command == "verify" and cfg.format == "json":
        payload = {"suite": cfg.suite, "seed": cfg.seed, "rows": payload, "failed": sum(not r["passed"] for r in payload)}
    try:
        emit(render(payload, cfg.format, columns), cfg.out)
    except OSError as exc:
        print(f"bohrlab: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
