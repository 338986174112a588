"""Command-line entry point: ``oscint <subcommand> [flags]``.

Data goes to stdout (or --output), diagnostics to stderr.  Exit codes:
0 success, 1 computation failure, 2 usage error.  Every output carries a
metadata header with the package version, a hash of the resolved
configuration and the seed.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .decomposition import DEFAULT_GAMMA, IntegerInterval, bad_sets, default_window, good_components
from .errors import FewnomialError, OscintError
from .experiments import (
    CSV_COLUMNS,
    logd_scan,
    parissis_growth,
    records_to_csv,
    resolve_threads,
    structure_suite,
    uniformity_sweep,
)
from .fewnomial import Fewnomial, make_fewnomial, scale_frame
from .quadrature import GridSpec, decay_fit, default_grid, multiplier_sup, pv_multiplier

COMMANDS = ("decompose", "multiplier", "sup", "decay", "sweep", "parissis", "logd", "check")

DEFAULTS = {
    "input": None,
    "gamma": DEFAULT_GAMMA,
    "tol": 1e-6,
    "xi": "0",
    "grid_k": None,
    "seed": 0,
    "draws": None,
    "format": "json",
    "output": None,
    "drop_linear": False,
    "threads": None,
    "window": None,
    "component": 0,
    "l_range": "4,16",
    "d": 2,
    "exponent_sets": "2,3;2,8;2,20;2,50",
    "decades": 12.0,
    "n_values": "3,6,12,24",
    "d_values": "1,2,3,4",
    "max_exp": 16,
    "instances": 1000,
    "gammas": "1,2,4",
    "no_timing": False,
}
DEFAULT_DRAWS = {"sweep": 50, "parissis": 100, "logd": 100}
# settings that do not change results are left out of the config hash
_UNHASHED = {"output", "threads", "format", "config"}


class UsageError(Exception):
    pass


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="oscint", description="Oscillatory singular integrals with fewnomial phases.")
    p.add_argument("--version", action="version", version=f"oscint {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    S = argparse.SUPPRESS
    common.add_argument("--config", default=S, help="JSON file with flag values; explicit flags win")
    common.add_argument("--input", default=S, help="fewnomial as inline JSON or a path to a JSON file")
    common.add_argument("--gamma", type=int, default=S)
    common.add_argument("--tol", type=float, default=S)
    common.add_argument("--xi", default=S, help="frequency or comma-separated list")
    common.add_argument("--grid-k", dest="grid_k", type=int, default=S, help="grid xi = +-2^(k/4), |k| <= K")
    common.add_argument("--seed", type=int, default=S)
    common.add_argument("--draws", type=int, default=S)
    common.add_argument("--format", choices=("json", "csv"), default=S)
    common.add_argument("--output", default=S)
    common.add_argument("--drop-linear", dest="drop_linear", action="store_true", default=S)
    common.add_argument("--threads", type=int, default=S)
    common.add_argument("--no-timing", dest="no_timing", action="store_true", default=S,
                        help="leave wall_time empty for byte-identical reruns")
    helps = {
        "decompose": "bad scales and good components",
        "multiplier": "m(xi) at the given frequencies",
        "sup": "sup of |m| over a frequency grid",
        "decay": "decay fit of the per-scale pieces on one good component",
        "sweep": "uniformity in the degree for fixed d",
        "parissis": "growth for full polynomials",
        "logd": "exploratory scan of the dependence on d",
        "check": "structural property battery",
    }
    subs = {name: sub.add_parser(name, parents=[common], help=h) for name, h in helps.items()}
    subs["decompose"].add_argument("--window", default=S, help="lo,hi in scale index l")
    subs["decay"].add_argument("--component", type=int, default=S, help="index into the good components")
    subs["decay"].add_argument("--l-range", dest="l_range", default=S, help="lo,hi")
    subs["sweep"].add_argument("--d", type=int, default=S)
    subs["sweep"].add_argument("--exponent-sets", dest="exponent_sets", default=S, help="e.g. 2,3;2,8")
    for name in ("sweep", "parissis", "logd"):
        subs[name].add_argument("--decades", type=float, default=S)
    subs["parissis"].add_argument("--n-values", dest="n_values", default=S)
    subs["logd"].add_argument("--d-values", dest="d_values", default=S)
    subs["logd"].add_argument("--max-exp", dest="max_exp", type=int, default=S)
    subs["check"].add_argument("--instances", type=int, default=S)
    subs["check"].add_argument("--gammas", default=S)
    return p


def _resolve(ns: argparse.Namespace) -> dict:
    given = vars(ns)
    cfg = dict(DEFAULTS)
    if "config" in given:
        try:
            with open(given["config"]) as fh:
                from_file = json.load(fh)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config: {exc}")
        unknown = set(from_file) - set(DEFAULTS)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(from_file)
    cfg.update({k: v for k, v in given.items() if k != "config"})
    if cfg["draws"] is None:
        cfg["draws"] = DEFAULT_DRAWS.get(cfg["command"], 50)
    return cfg


def config_hash(cfg: dict) -> str:
    keep = {k: v for k, v in sorted(cfg.items()) if k not in _UNHASHED}
    return hashlib.sha256(json.dumps(keep, sort_keys=True).encode()).hexdigest()[:16]


def _ints(text, what: str):
    try:
        return [int(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"--{what}: expected comma-separated integers, got {text!r}")


def _floats(text, what: str):
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"--{what}: expected comma-separated numbers, got {text!r}")


def drop_linear(obj: dict) -> dict:
    """Remove an exponent-1 monomial from Fewnomial JSON, warning on stderr."""
    coeffs, exps = list(obj["coeffs"]), list(obj["exponents"])
    if 1 not in exps:
        return {"coeffs": coeffs, "exponents": exps}
    i = exps.index(1)
    print(f"warning: dropped linear term {coeffs[i]}*t; absorb it into xi", file=sys.stderr)
    del coeffs[i], exps[i]
    if not exps:
        print("warning: nothing left after dropping the linear term; using Q = 0", file=sys.stderr)
    return {"coeffs": coeffs, "exponents": exps}


def load_fewnomial(text: Optional[str], drop: bool = False) -> Fewnomial:
    if text is None:
        raise UsageError("--input is required")
    src = text
    if not text.lstrip().startswith("{"):
        try:
            with open(text) as fh:
                src = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read input: {exc}")
    try:
        obj = json.loads(src)
        if drop:
            obj = drop_linear(obj)
        return make_fewnomial(obj["coeffs"], obj["exponents"])
    except (ValueError, KeyError, TypeError) as exc:
        if isinstance(exc, FewnomialError):
            raise UsageError(str(exc))
        raise UsageError(f"bad fewnomial JSON: {exc}")


def _clean(x):
    """JSON-safe floats: nan/inf become null."""
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    return x


def _grid(cfg: dict, Q: Fewnomial) -> GridSpec:
    k = cfg["grid_k"]
    return default_grid(Q) if k is None else GridSpec(-int(k), int(k), 4)


def _cmd_decompose(cfg):
    Q = load_fewnomial(cfg["input"], cfg["drop_linear"])
    frame = scale_frame(Q)
    g = cfg["gamma"]
    if cfg["window"] is not None:
        lo, hi = _ints(cfg["window"], "window")
        window = IntegerInterval(lo, hi)
    else:
        window = default_window(frame, g)
    out = {"gamma": g, "window": window.to_json(), **bad_sets(frame, g).to_json()}
    out["components"] = [c.to_json() for c in good_components(frame, g, window)]
    out["fewnomial"] = Q.to_json()
    return out, True


def _cmd_multiplier(cfg):
    Q = load_fewnomial(cfg["input"], cfg["drop_linear"])
    recs, ok = [], 0
    for x in _floats(cfg["xi"], "xi"):
        try:
            recs.append(pv_multiplier(Q, x, cfg["tol"]).to_json())
            ok += 1
        except OscintError as exc:
            v = getattr(exc, "value", None)
            recs.append({
                "xi": x, "re": v.real if v is not None else None, "im": v.imag if v is not None else None,
                "abs": abs(v) if v is not None else None, "err": getattr(exc, "abs_err", None),
                "certified": False, "error": str(exc),
            })
    return {"fewnomial": Q.to_json(), "records": recs}, ok > 0


def _cmd_sup(cfg):
    Q = load_fewnomial(cfg["input"], cfg["drop_linear"])
    res = multiplier_sup(Q, _grid(cfg, Q), cfg["tol"])
    out = {"fewnomial": Q.to_json(), **res.to_json(), "records": [s.to_json() for s in res.samples]}
    return out, res.certified_fraction > 0


def _cmd_decay(cfg):
    Q = load_fewnomial(cfg["input"], cfg["drop_linear"])
    comps = good_components(scale_frame(Q), cfg["gamma"])
    i = cfg["component"]
    if not 0 <= i < len(comps):
        raise UsageError(f"--component {i}: only {len(comps)} good components")
    lo, hi = _ints(cfg["l_range"], "l-range")
    fit = decay_fit(Q, comps[i], None, IntegerInterval(lo, hi), max(cfg["tol"], 1e-5))
    out = {
        "fewnomial": Q.to_json(),
        "component": comps[i].to_json(),
        "C_hat": fit.C_hat,
        "delta_hat": fit.delta_hat,
        "residual": fit.residual,
        "l_range": fit.l_range.to_json(),
        "second_derivative_ratio": fit.second_derivative_ratio,
        "levels": [{"l": l, "s": s} for l, s in fit.levels],
    }
    return out, True


def _sweep_output(records, summary):
    return {"summary": summary.to_json(), "records": records}, True


def _cmd_sweep(cfg):
    sets = [_ints(s, "exponent-sets") for s in str(cfg["exponent_sets"]).split(";") if s.strip()]
    grid = None if cfg["grid_k"] is None else GridSpec(-cfg["grid_k"], cfg["grid_k"], 4)
    records, summary = uniformity_sweep(
        cfg["d"], sets, cfg["draws"], cfg["decades"], grid, cfg["tol"], cfg["seed"], cfg["threads"])
    return _sweep_output(records, summary)


def _cmd_parissis(cfg):
    grid = None if cfg["grid_k"] is None else GridSpec(-cfg["grid_k"], cfg["grid_k"], 4)
    records, summary = parissis_growth(
        _ints(cfg["n_values"], "n-values"), cfg["draws"], grid, cfg["tol"], cfg["seed"],
        cfg["decades"], cfg["threads"])
    return _sweep_output(records, summary)


def _cmd_logd(cfg):
    grid = None if cfg["grid_k"] is None else GridSpec(-cfg["grid_k"], cfg["grid_k"], 4)
    summary = logd_scan(
        _ints(cfg["d_values"], "d-values"), cfg["max_exp"], cfg["draws"], grid, cfg["tol"],
        cfg["seed"], cfg["decades"], cfg["threads"])
    return _sweep_output(list(summary.records), summary)


def _cmd_check(cfg):
    rep = structure_suite(cfg["instances"], cfg["seed"], _ints(cfg["gammas"], "gammas"))
    return rep.to_json(), rep.total_failures == 0


HANDLERS = {
    "decompose": _cmd_decompose,
    "multiplier": _cmd_multiplier,
    "sup": _cmd_sup,
    "decay": _cmd_decay,
    "sweep": _cmd_sweep,
    "parissis": _cmd_parissis,
    "logd": _cmd_logd,
    "check": _cmd_check,
}


def _render(cfg: dict, payload: dict, meta: dict) -> str:
    if cfg["format"] == "csv":
        lines = [f"# {k}={json.dumps(v) if isinstance(v, dict) else v}" for k, v in meta.items()]
        if "records" in payload and payload["records"] and hasattr(payload["records"][0], "row"):
            return "\n".join(lines) + "\n" + records_to_csv(payload["records"], not cfg["no_timing"])
        rows = payload.get("records")
        if not rows:
            raise UsageError(f"{cfg['command']} has no tabular output; use --format json")
        cols = list(rows[0])
        body = [",".join(cols)] + [",".join("" if r.get(c) is None else str(r.get(c)) for c in cols) for r in rows]
        return "\n".join(lines + body) + "\n"
    if "records" in payload and payload["records"] and hasattr(payload["records"][0], "row"):
        payload = dict(payload)
        payload["records"] = [
            dict(zip(CSV_COLUMNS, [r.seed, r.d, r.n, list(r.exponents), r.coeff_decades, r.sup,
                                   r.argmax_xi, r.certified_fraction,
                                   None if cfg["no_timing"] else round(r.wall_time, 3)]))
            for r in payload["records"]
        ]
    return json.dumps(_clean({"meta": meta, **payload}), indent=1, sort_keys=False) + "\n"


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = _parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _resolve(ns)
        cfg["threads"] = resolve_threads(cfg["threads"])
        meta = {
            "version": __version__,
            "config_hash": config_hash(cfg),
            "seed": cfg["seed"],
            "config": {k: v for k, v in sorted(cfg.items()) if k not in _UNHASHED},
        }
        payload, ok = HANDLERS[cfg["command"]](cfg)
        text = _render(cfg, payload, meta)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"oscint: error: {exc}", file=sys.stderr)
        return 2
    except (OscintError, ArithmeticError, ValueError) as exc:
        print(f"oscint: computation failed: {exc}", file=sys.stderr)
        return 1
    if cfg["output"]:
        with open(cfg["output"], "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if ok else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
