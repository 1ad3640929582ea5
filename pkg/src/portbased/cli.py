"""Command line front end.

Exit codes: 0 success, 1 invariant failure, 2 configuration error,
3 dimension guard exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from .algebra import GuardExceeded, check_guard
from .partitions import enumerate_partitions, format_partition

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_GUARD = 0, 1, 2, 3
TABLE_COLUMNS = ("protocol", "resource", "n", "d", "F", "p_succ", "F/p", "objective")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    n: Optional[int] = None
    d: Optional[int] = None
    n_range: tuple[int, ...] = ()
    d_range: tuple[int, ...] = ()
    protocol: str = "dpbt"
    resource: str = "epr"
    f_file: Optional[str] = None
    encoding: str = "standard"
    output: Optional[str] = None
    format: Optional[str] = None
    seed: int = 2024
    trials: int = 5
    dilated: bool = False
    fault: Optional[str] = None
    tolerances: dict[str, float] = field(default_factory=dict)
    suites: tuple[str, ...] = ()
    input: str = "random"
    plot: Optional[str] = None


def parse_range(text) -> tuple[int, ...]:
    """'2..6', '2,3,5' or '4'."""
    if isinstance(text, (list, tuple)):
        return tuple(int(x) for x in text)
    text = str(text).strip()
    try:
        if ".." in text:
            lo, hi = text.split("..")
            vals = tuple(range(int(lo), int(hi) + 1))
        else:
            vals = tuple(int(x) for x in text.split(",") if x)
    except ValueError:
        raise ConfigError(f"cannot read range {text!r}") from None
    if not vals:
        raise ConfigError(f"empty range {text!r}")
    return vals


def parse_tolerances(items: Sequence[str]) -> dict[str, float]:
    out = {}
    for item in items or ():
        name, _, val = item.partition("=")
        try:
            tol = float(val)
        except ValueError:
            raise ConfigError(f"bad tolerance {item!r}, expected name=value") from None
        if not tol >= np.finfo(float).eps:
            raise ConfigError(f"tolerance for {name} below machine epsilon")
        out[name] = tol
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="portbased", description="Port-based teleportation toolkit",
                                     allow_abbrev=False)
    parser.add_argument("--config", help="JSON file of option defaults; flags win")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, nd=True, ranges=False):
        if nd:
            p.add_argument("--n", type=int)
            p.add_argument("--d", type=int)
        if ranges:
            p.add_argument("--n-range", dest="n_range")
            p.add_argument("--d-range", dest="d_range")
        p.add_argument("-o", "--output")

    p = sub.add_parser("verify", allow_abbrev=False, help="run the invariant suites")
    common(p, nd=False)
    p.add_argument("--max-n", type=int, dest="n")
    p.add_argument("--max-d", type=int, dest="d")
    p.add_argument("--suite", action="append", dest="suites")
    p.add_argument("--tolerance", action="append", dest="tolerances", metavar="NAME=VALUE")
    p.add_argument("--inject-fault", dest="fault")
    p.add_argument("--seed", type=int)

    p = sub.add_parser("table", allow_abbrev=False, help="fidelity and success probability table")
    common(p, nd=False, ranges=True)
    p.add_argument("--protocol", action="append", dest="protocols")
    p.add_argument("--resource", action="append", dest="resources")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--plot")

    p = sub.add_parser("simulate", allow_abbrev=False, help="simulate the measurement circuit against the POVM")
    common(p)
    p.add_argument("--encoding", choices=("standard", "yamanouchi"))
    p.add_argument("--protocol", choices=("dpbt", "ppbt", "generic"))
    p.add_argument("--input", choices=("random", "epr"))
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)

    p = sub.add_parser("diagram", allow_abbrev=False, help="export the Bratteli diagram")
    common(p)
    p.add_argument("--dilated", action="store_true", default=None)
    p.add_argument("--format", choices=("dot", "json"))

    p = sub.add_parser("resource", allow_abbrev=False, help="resource state report")
    common(p)
    p.add_argument("--resource", choices=("epr", "optimized", "custom-f"))
    p.add_argument("--protocol", choices=("dpbt", "ppbt"))
    p.add_argument("--f-file", dest="f_file")

    p = sub.add_parser("gatecount", allow_abbrev=False, help="gate counts and scaling fits")
    common(p, nd=False, ranges=True)
    p.add_argument("--encoding", choices=("standard", "yamanouchi"))
    p.add_argument("--format", choices=("csv", "json"))
    return parser


def load_config(argv: Sequence[str]) -> RunConfig:
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    file_opts = {}
    if known.config:
        try:
            with open(known.config, encoding="utf-8") as fh:
                file_opts = json.load(fh)
        except (OSError, json.JSONDecodeError) as err:
            raise ConfigError(f"cannot read config {known.config}: {err}") from None
        if not isinstance(file_opts, dict):
            raise ConfigError("config file must hold a JSON object")
    args = vars(parser.parse_args(argv))
    merged = {k: v for k, v in file_opts.items() if k != "command"}
    merged.update({k: v for k, v in args.items() if v is not None})
    return _to_config(merged)


def _to_config(opts: dict) -> RunConfig:
    cmd = opts.pop("command")
    opts.pop("config", None)
    cfg = RunConfig(cmd)
    if "n_range" in opts:
        cfg.n_range = parse_range(opts.pop("n_range"))
    if "d_range" in opts:
        cfg.d_range = parse_range(opts.pop("d_range"))
    if "tolerances" in opts:
        tol = opts.pop("tolerances")
        cfg.tolerances = dict(tol) if isinstance(tol, dict) else parse_tolerances(tol)
    protocols = opts.pop("protocols", None)
    resources = opts.pop("resources", None)
    if "suites" in opts:
        cfg.suites = tuple(opts.pop("suites"))
    for key, val in opts.items():
        if not hasattr(cfg, key):
            raise ConfigError(f"unknown option {key}")
        setattr(cfg, key, val)
    cfg.protocols = tuple(protocols or ("dpbt", "ppbt"))
    cfg.resources = tuple(resources or ("epr", "optimized"))
    for name in ("n", "d"):
        val = getattr(cfg, name)
        if val is not None and (not isinstance(val, int) or val < 1):
            raise ConfigError(f"--{name} must be a positive integer")
    if cfg.d is not None and cfg.d < 2 and cfg.command != "verify":
        raise ConfigError("d must be at least 2")
    return cfg


def _fmt(x) -> object:
    if x is None:
        return ""
    if isinstance(x, float):
        return "nan" if math.isnan(x) else f"{x:.12g}"
    return x


def _emit(text: str, path: Optional[str]) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dumps(data) -> str:
    return json.dumps(_round(data), indent=1, sort_keys=True) + "\n"


def _round(obj):
    if isinstance(obj, float):
        return float(f"{obj:.12g}") if math.isfinite(obj) else str(obj)
    if isinstance(obj, dict):
        return {str(k): _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _round(obj.tolist())
    if isinstance(obj, np.generic):
        return _round(obj.item())
    return obj


def _require(cfg: RunConfig, *names) -> None:
    for name in names:
        if getattr(cfg, name) is None:
            raise ConfigError(f"{cfg.command} needs --{name}")


# commands

def cmd_verify(cfg: RunConfig) -> int:
    from .verify import FAULTS, SUITES, VerifyConfig, run_suites

    vc = VerifyConfig(max_n=cfg.n or 3, max_d=cfg.d or 2, seed=cfg.seed, fault=cfg.fault)
    if cfg.fault is not None and cfg.fault not in FAULTS:
        raise ConfigError(f"unknown fault {cfg.fault}; known: {', '.join(FAULTS)}")
    unknown = [s for s in cfg.suites if s not in SUITES]
    if unknown:
        raise ConfigError(f"unknown suite(s) {unknown}")
    check_guard(vc.max_d ** (vc.max_n + 1))
    checks = run_suites(vc, cfg.suites or None)
    for c in checks:
        if c.name in cfg.tolerances:
            c.threshold = cfg.tolerances[c.name]
            c.__post_init__()
    failed = [c for c in checks if not c.passed]
    report = {
        "config": {"max_n": vc.max_n, "max_d": vc.max_d, "seed": vc.seed, "fault": vc.fault},
        "checks": [c.to_dict() for c in checks],
        "failed": [f"{c.suite}.{c.name}" for c in failed],
        "passed": not failed,
    }
    _emit(_dumps(report), cfg.output)
    for c in failed:
        print(f"FAIL {c.suite}.{c.name} {c.params} residual={c.residual:.3g} threshold={c.threshold:.3g}",
              file=sys.stderr)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_table(cfg: RunConfig) -> int:
    from .protocols import PROTOCOLS, RESOURCES, table_row

    ns, ds = cfg.n_range or tuple(range(2, 7)), cfg.d_range or (2,)
    for p in cfg.protocols:
        if p not in PROTOCOLS:
            raise ConfigError(f"unknown protocol {p}")
    for r in cfg.resources:
        if r not in RESOURCES:
            raise ConfigError(f"unknown resource {r}")
    rows, skipped = [], []
    for protocol in cfg.protocols:
        for resource in cfg.resources:
            for d in ds:
                for n in ns:
                    try:
                        rows.append(table_row(protocol, resource, n, d))
                    except GuardExceeded as err:
                        skipped.append((protocol, resource, n, d))
                        print(f"warning: skipped {protocol}/{resource} n={n} d={d}: {err}", file=sys.stderr)
    if cfg.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(TABLE_COLUMNS)
        for row in rows:
            w.writerow([_fmt(row[c]) for c in TABLE_COLUMNS])
        _emit(buf.getvalue(), cfg.output)
    else:
        _emit(_dumps({"columns": list(TABLE_COLUMNS), "rows": [[row[c] for c in TABLE_COLUMNS] for row in rows],
                      "skipped": [list(s) for s in skipped]}), cfg.output)
    if cfg.plot:
        _plot(rows, cfg.plot)
    return EXIT_GUARD if skipped else EXIT_OK


def _plot(rows, path: str) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 4))
    keys = sorted({(r["protocol"], r["resource"], r["d"]) for r in rows})
    for protocol, resource, d in keys:
        sub = [r for r in rows if (r["protocol"], r["resource"], r["d"]) == (protocol, resource, d)]
        qty = "F" if protocol == "dpbt" else "p_succ"
        ax.loglog([r["n"] for r in sub], [1 - r[qty] for r in sub], "o-",
                  label=f"{protocol}/{resource} d={d}: 1-{qty}")
    ax.set_xlabel("n")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, metadata={"Software": None} if path.endswith(".png") else None)
    plt.close(fig)


def cmd_simulate(cfg: RunConfig) -> int:
    from .circuits import synth_measurement
    from .measurements import g_epr_ppbt
    from .verify import circuit_povm_check, random_g

    _require(cfg, "n", "d")
    check_guard(cfg.d ** (cfg.n + 1))
    g = None
    if cfg.protocol == "ppbt":
        g = g_epr_ppbt(cfg.n, cfg.d)
    elif cfg.protocol == "generic":
        g = random_g(cfg.n, cfg.d, np.random.default_rng(cfg.seed))
    if cfg.input == "epr":
        res = _simulate_epr_input(cfg, g)
    else:
        res = circuit_povm_check(cfg.n, cfg.d, cfg.encoding, g, cfg.trials, cfg.seed)
        res["distributions"] = [list(p) for p in res["distributions"]]
    circ = synth_measurement(cfg.n, cfg.d, cfg.encoding, g)
    out = {"n": cfg.n, "d": cfg.d, "encoding": cfg.encoding, "protocol": cfg.protocol, "input": cfg.input,
           "seed": cfg.seed, "trials": cfg.trials, "registers": {k: r.dim for k, r in circ.registers.items()}}
    out.update(res)
    out["passed"] = out["tv"] <= 1e-7
    _emit(_dumps(out), cfg.output)
    return EXIT_OK if out["passed"] else EXIT_FAIL


def _simulate_epr_input(cfg: RunConfig, g) -> dict:
    """Random qudit input on the last system, ports maximally mixed (their EPR halves traced out)."""
    from .algebra import solve_intertwiner
    from .circuits import Simulator, synth_measurement
    from .measurements import generic_povm, pgm_gt

    n, d = cfg.n, cfg.d
    circ = synth_measurement(n, d, cfg.encoding, g)
    sim = Simulator(circ)
    tw = solve_intertwiner(n, d)
    povm = generic_povm(g, n, d) if g is not None else pgm_gt(n, d)
    effects = [tw.to_dense(e) for e in povm.outcomes]
    rng = np.random.default_rng(cfg.seed)
    tv, dists = 0.0, []
    for _ in range(cfg.trials):
        phi = rng.normal(size=d) + 1j * rng.normal(size=d)
        phi /= np.linalg.norm(phi)
        rho = np.kron(np.eye(d**n) / d**n, np.outer(phi, phi.conj()))
        probs = np.zeros(n + 1)
        for a in range(d**n):
            psi = np.kron(np.eye(d**n)[a], phi)
            probs += sim.run(psi, ["X"]).probabilities["anc"] / d**n
        exact = np.array([np.real(np.trace(e @ rho)) for e in effects])
        tv = max(tv, 0.5 * float(np.abs(probs - exact).sum()))
        dists.append(list(probs))
    return {"tv": tv, "distributions": dists}


def cmd_diagram(cfg: RunConfig) -> int:
    from .bratteli import build_diagram, export_dot, to_json

    _require(cfg, "n", "d")
    diagram = build_diagram(cfg.n, cfg.d, dilated=bool(cfg.dilated))
    _emit(export_dot(diagram) if cfg.format == "dot" else to_json(diagram) + "\n", cfg.output)
    return EXIT_OK


def _read_f(path: str, n: int, d: int) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as err:
        raise ConfigError(f"cannot read f file {path}: {err}") from None
    known = {format_partition(mu): mu for mu in enumerate_partitions(n, d)}
    out = {}
    for key, val in raw.items():
        if key not in known:
            raise ConfigError(f"f file names {key!r}, not a partition of {n} with at most {d} rows")
        out[known[key]] = float(val)
    if any(v < 0 for v in out.values()) or abs(sum(out.values()) - 1) > 1e-12:
        raise ConfigError("f must be nonnegative and sum to 1")
    return out


def cmd_resource(cfg: RunConfig) -> int:
    from .protocols import dpbt_f, epr_f, isotypic_weights, optimized_resource, ppbt_f
    from .verify import resource_prep_residual

    _require(cfg, "n", "d")
    n, d = cfg.n, cfg.d
    if cfg.resource == "epr":
        f = {mu: float(v) for mu, v in epr_f(n, d).items()}
    elif cfg.resource == "optimized":
        f = dpbt_f(n, d)[0] if cfg.protocol == "dpbt" else ppbt_f(n, d)
    else:
        _require(cfg, "f_file")
        f = _read_f(cfg.f_file, n, d)
    out = {"n": n, "d": d, "resource": cfg.resource, "protocol": cfg.protocol,
           "f": {format_partition(mu): v for mu, v in f.items()},
           "prep_circuit_residual": resource_prep_residual(n, d, f)}
    check_guard(d ** (2 * n))
    state = optimized_resource(n, d, f, cfg.resource)
    weights = isotypic_weights(state)
    out["isotypic_overlaps"] = {format_partition(mu): v for mu, v in weights.items()}
    out["overlap_residual"] = max(abs(weights.get(mu, 0.0) - v) for mu, v in f.items())
    out["passed"] = out["prep_circuit_residual"] <= 1e-10 and out["overlap_residual"] <= 1e-10
    _emit(_dumps(out), cfg.output)
    return EXIT_OK if out["passed"] else EXIT_FAIL


def cmd_gatecount(cfg: RunConfig) -> int:
    from .circuits import gate_count_report, report_csv

    ns, ds = cfg.n_range or tuple(range(3, 9)), cfg.d_range or (2,)
    if min(ns) < 2 or min(ds) < 2:
        raise ConfigError("gate counts need n >= 2 and d >= 2")
    rows, fits = gate_count_report(ns, ds, cfg.encoding)
    if cfg.format == "csv":
        text = report_csv(rows)
        text += "".join(f"# fit d={f.d} total_exponent={f.total_exponent:.6f} depth_exponent={f.depth_exponent:.6f}\n"
                        for f in fits)
    else:
        text = _dumps({"rows": [asdict(r) for r in rows], "fits": [asdict(f) for f in fits]})
    _emit(text, cfg.output)
    return EXIT_OK


DEFAULT_FORMAT = {"table": "csv", "diagram": "dot", "gatecount": "csv"}
COMMANDS = {"verify": cmd_verify, "table": cmd_table, "simulate": cmd_simulate, "diagram": cmd_diagram,
            "resource": cmd_resource, "gatecount": cmd_gatecount}


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        cfg = load_config(argv)
        cfg.format = cfg.format or DEFAULT_FORMAT.get(cfg.command, "json")
        return COMMANDS[cfg.command](cfg)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except GuardExceeded as err:
        print(f"guard exceeded: {err}", file=sys.stderr)
        return EXIT_GUARD
    except ValueError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG

