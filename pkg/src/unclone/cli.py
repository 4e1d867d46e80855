"""Command-line front end.

Subcommands:

* ``game``   - evaluate one security game, JSON report to stdout/file.
* ``curve``  - bound curves with measured witness values, CSV; when the
  CSV goes to a file, a figure is rendered alongside it.
* ``moe``    - seesaw search for monogamy-game strategies, JSON.
* ``verify`` - run the acceptance suite; nonzero exit on failure.

A JSON config file may supply any long-option value (keys use underscores,
e.g. ``{"scheme": "ce", "lam": 2}``); unknown keys are errors.  Explicit
flags override the config.  Every run embeds its seed and a hash of the
effective config in the output.  Identical config + seed reruns produce
byte-identical files.  Exit codes: 2 for invalid configs, 3 when an exact
computation exceeds capacity.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path
from typing import Optional

from .acceptance import run_all
from .attacks import (
    UnsupportedAttackError,
    breidbart_attack,
    copy_attack,
    guess_attack,
    seesaw_optimize_moe,
    split_measure_attack,
)
from .games import (
    MessageDistribution,
    curve_csv_lines,
    curve_with_witness,
    eval_cloning_game,
    min_entropy_experiment,
    moe_game_bound,
)
from .oracle import oracle_new
from .quantum import BitString, CapacityError
from .schemes import conjugate_encryption, f_conjugate_encryption, otp_classical

SEED_ENV_VAR = "UNCLONE_SEED"

_GAME_KEYS = {
    "scheme", "lam", "n", "prf", "attack", "guess_message", "dist", "mode",
    "trials", "oracle_count", "seed", "out",
}
_CURVE_KEYS = {"min", "max", "out", "plot", "no_plot", "seed"}
_MOE_KEYS = {"lam", "dim_b", "dim_c", "iters", "tol", "seeds", "seed", "out"}
_VERIFY_KEYS = {"fast"}


class ConfigError(Exception):
    pass


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError as err:
        raise ConfigError(f"{SEED_ENV_VAR} must be an integer, got {raw!r}") from err


def _load_config(path: Optional[str], allowed: set[str]) -> dict:
    if path is None:
        return {}
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as err:
        raise ConfigError(f"cannot read config {path}: {err}") from err
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return data


def _merge(args: argparse.Namespace, config: dict, keys: set[str]) -> dict:
    """Config supplies defaults; explicitly passed flags win."""
    merged = {}
    for key in keys:
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            merged[key] = flag_value
        elif key in config:
            merged[key] = config[key]
        else:
            merged[key] = None
    return merged


_DESTINATION_KEYS = {"out", "plot", "no_plot"}


def _config_hash(effective: dict) -> str:
    # Hash the experiment, not where its results are written.
    semantic = {k: v for k, v in effective.items() if k not in _DESTINATION_KEYS}
    canonical = json.dumps(semantic, sort_keys=True)
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]


def _emit(text: str, out: Optional[str]) -> None:
    if out is None:
        print(text)
    else:
        Path(out).write_text(text + "\n")


def _build_scheme(cfg: dict):
    name = cfg["scheme"]
    lam = int(cfg["lam"])
    if name == "ce":
        return conjugate_encryption(lam)
    if name == "otp":
        return otp_classical(lam)
    if name == "fce":
        n = lam if cfg["n"] is None else int(cfg["n"])
        prf = cfg["prf"] or "qprf"
        if prf == "qprf":
            return f_conjugate_encryption(lam, n)
        if prf == "oracle":
            # Concrete oracle instances are sampled per run from the seed.
            return f_conjugate_encryption(
                lam, n, prf=oracle_new(int(cfg["seed"]), lam, n)
            )
        raise ConfigError(f"prf must be 'qprf' or 'oracle', got {prf!r}")
    raise ConfigError(f"unknown scheme {name!r}")


def _build_attack(cfg: dict, scheme):
    name = cfg["attack"]
    if name == "copy":
        return copy_attack()
    if name == "guess":
        if cfg["guess_message"]:
            return guess_attack(BitString(cfg["guess_message"]))
        return guess_attack(BitString.zeros(scheme.message_bits))
    if name == "breidbart":
        return breidbart_attack()
    if name == "split-measure":
        return split_measure_attack()
    raise ConfigError(f"unknown attack {name!r}")


def _build_distribution(cfg: dict, scheme) -> Optional[MessageDistribution]:
    spec = cfg["dist"]
    if spec is None or spec == "uniform":
        return None
    if spec.startswith("point:"):
        return MessageDistribution.point_mass(BitString(spec.split(":", 1)[1]))
    if spec.startswith("min-entropy:"):
        h = float(spec.split(":", 1)[1])
        return MessageDistribution.min_entropy_family(scheme.message_bits, h)
    raise ConfigError(f"unknown distribution spec {spec!r}")


def _cmd_game(args: argparse.Namespace) -> int:
    config = _load_config(args.config, _GAME_KEYS)
    cfg = _merge(args, config, _GAME_KEYS)
    if cfg["scheme"] is None or cfg["lam"] is None or cfg["attack"] is None:
        raise ConfigError("game needs --scheme, --lambda and --attack")
    cfg["seed"] = _default_seed() if cfg["seed"] is None else int(cfg["seed"])
    cfg["mode"] = cfg["mode"] or "exact"
    scheme = _build_scheme(cfg)
    attack = _build_attack(cfg, scheme)
    dist = _build_distribution(cfg, scheme)
    oracle_count = 64 if cfg["oracle_count"] is None else int(cfg["oracle_count"])
    trials = None if cfg["trials"] is None else int(cfg["trials"])

    if cfg["dist"] is not None and str(cfg["dist"]).startswith("min-entropy:"):
        h = float(str(cfg["dist"]).split(":", 1)[1])
        report = min_entropy_experiment(
            scheme, attack, h, mode=cfg["mode"], trials=trials,
            seed=cfg["seed"], oracle_count=oracle_count,
        )
    else:
        report = eval_cloning_game(
            scheme, attack, dist, mode=cfg["mode"], trials=trials,
            seed=cfg["seed"], oracle_count=oracle_count,
        )
    payload = report.to_dict()
    payload["config_hash"] = _config_hash(cfg)
    _emit(json.dumps(payload), cfg["out"])
    return 0


def _cmd_curve(args: argparse.Namespace) -> int:
    config = _load_config(args.config, _CURVE_KEYS)
    cfg = _merge(args, config, _CURVE_KEYS)
    if cfg["min"] is None or cfg["max"] is None:
        raise ConfigError("curve needs --min and --max")
    cfg["seed"] = _default_seed() if cfg["seed"] is None else int(cfg["seed"])
    rows = curve_with_witness(int(cfg["min"]), int(cfg["max"]))
    csv_text = "\n".join(curve_csv_lines(rows))
    out = cfg["out"]
    _emit(csv_text, out)
    meta = {
        "seed": cfg["seed"],
        "config_hash": _config_hash(cfg),
        "rows": len(rows),
        "witness": rows[0].measured_attack,
    }
    if out is None:
        print(json.dumps(meta), file=sys.stderr)
        return 0
    out_path = Path(out)
    out_path.with_suffix(".meta.json").write_text(json.dumps(meta) + "\n")
    if not cfg["no_plot"]:
        from .plotting import render_curve_figure

        plot_path = cfg["plot"] or str(out_path.with_suffix(".png"))
        render_curve_figure(rows, plot_path)
    return 0


def _cmd_moe(args: argparse.Namespace) -> int:
    config = _load_config(args.config, _MOE_KEYS)
    cfg = _merge(args, config, _MOE_KEYS)
    if cfg["lam"] is None:
        raise ConfigError("moe needs --lambda")
    cfg["seed"] = _default_seed() if cfg["seed"] is None else int(cfg["seed"])
    lam = int(cfg["lam"])
    seeds = 10 if cfg["seeds"] is None else int(cfg["seeds"])
    iters = 200 if cfg["iters"] is None else int(cfg["iters"])
    tol = 1e-10 if cfg["tol"] is None else float(cfg["tol"])
    dim_b = None if cfg["dim_b"] is None else int(cfg["dim_b"])
    dim_c = None if cfg["dim_c"] is None else int(cfg["dim_c"])
    runs = []
    for offset in range(seeds):
        result = seesaw_optimize_moe(
            lam, dim_b=dim_b, dim_c=dim_c, iters=iters, tol=tol,
            seed=cfg["seed"] + offset,
        )
        runs.append(
            {
                "seed": cfg["seed"] + offset,
                "value": result.value,
                "iterations": result.iterations,
                "converged": result.converged,
            }
        )
    best = max(r["value"] for r in runs)
    payload = {
        "game": "monogamy",
        "lam": lam,
        "dim_b": dim_b if dim_b is not None else 1 << lam,
        "dim_c": dim_c if dim_c is not None else 1 << lam,
        "best_value": best,
        "bound": moe_game_bound(lam),
        "bound_satisfied": best <= moe_game_bound(lam) + 1e-9,
        "runs": runs,
        "seed": cfg["seed"],
        "config_hash": _config_hash(cfg),
    }
    _emit(json.dumps(payload), cfg["out"])
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    results = run_all(fast=bool(args.fast))
    return 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="unclone",
        description="Evaluate uncloneable-encryption security games.",
    )
    parser.add_argument("--config", help="JSON config file; flags override it")
    sub = parser.add_subparsers(dest="command", required=True)

    game = sub.add_parser("game", help="evaluate one cloning game")
    game.add_argument("--scheme", choices=["ce", "fce", "otp"])
    game.add_argument("--lambda", dest="lam", type=int)
    game.add_argument("--n", type=int, help="message bits (fce only)")
    game.add_argument("--prf", choices=["qprf", "oracle"])
    game.add_argument(
        "--attack", choices=["copy", "guess", "breidbart", "split-measure"]
    )
    game.add_argument("--guess-message", dest="guess_message")
    game.add_argument(
        "--dist", help="uniform | point:<bits> | min-entropy:<h>"
    )
    game.add_argument("--mode", choices=["exact", "monte_carlo"])
    game.add_argument("--trials", type=int)
    game.add_argument("--oracle-count", dest="oracle_count", type=int)
    game.add_argument("--seed", type=int)
    game.add_argument("--out")
    game.set_defaults(func=_cmd_game)

    curve = sub.add_parser("curve", help="bound curves with measured witnesses")
    curve.add_argument("--min", type=int)
    curve.add_argument("--max", type=int)
    curve.add_argument("--out", help="CSV path; figure lands next to it")
    curve.add_argument("--plot", help="explicit figure path")
    curve.add_argument("--no-plot", dest="no_plot", action="store_true", default=None)
    curve.add_argument("--seed", type=int)
    curve.set_defaults(func=_cmd_curve)

    moe = sub.add_parser("moe", help="seesaw search for monogamy strategies")
    moe.add_argument("--lambda", dest="lam", type=int)
    moe.add_argument("--dim-b", dest="dim_b", type=int)
    moe.add_argument("--dim-c", dest="dim_c", type=int)
    moe.add_argument("--iters", type=int)
    moe.add_argument("--tol", type=float)
    moe.add_argument("--seeds", type=int, help="number of random restarts")
    moe.add_argument("--seed", type=int)
    moe.add_argument("--out")
    moe.set_defaults(func=_cmd_moe)

    verify = sub.add_parser("verify", help="run the acceptance suite")
    verify.add_argument("--fast", action="store_true")
    verify.set_defaults(func=_cmd_verify)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (ValueError, UnsupportedAttackError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except CapacityError as err:
        print(f"capacity error: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
