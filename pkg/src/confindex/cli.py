"""Command-line entry point: ``confindex {simulate,ci,rp-sweep,monotonicity}``.

Settings are resolved as built-in defaults, then a JSON ``--config`` file,
then command-line flags. The resolved document is validated before any
computation and written to ``resolved-config.json``. ``--jobs`` and ``--out``
cannot change results and are left out of it.

Exit codes: 0 success, 1 error, 2 confounding index undefined.
"""

from __future__ import annotations

import argparse
import copy
import json
import sys
from pathlib import Path

import jsonschema

from . import report
from .classifier import ClassifierConfig
from .dataset import BinSpec, DataError, bin_continuous, load_csv, partition_cells, write_csv
from .engine import confounding_index, default_balance_n, default_cell_size
from .monotonicity import Direction, default_delta, delta_pairs, is_delta_monotone
from .permutation import rp_base_config, rp_sweep
from .sampler import BiasSchedule
from .simgen import PRESETS, SimConfig, generate, resolve_preset

EXIT_OK, EXIT_ERROR, EXIT_UNDEFINED = 0, 1, 2

_num = {"type": "number"}
_pos_int = {"type": "integer", "minimum": 1}
_opt_pos_int = {"type": ["integer", "null"], "minimum": 1}

RUN_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "seed": {"type": "integer", "minimum": 0},
        "out": {"type": "string"},
        "data": {
            "type": ["object", "null"],
            "additionalProperties": False,
            "required": ["path", "label"],
            "properties": {
                "path": {"type": "string"},
                "label": {"type": "string"},
                "confounder": {"type": ["string", "null"]},
                "covariates": {"type": "array", "items": {"type": "string"}},
                "ignore": {"type": "array", "items": {"type": "string"}},
                "label_map": {
                    "type": ["object", "null"],
                    "additionalProperties": {"enum": [-1, 1]},
                },
                "bin": {
                    "type": ["object", "null"],
                    "additionalProperties": False,
                    "required": ["variable", "width", "start", "distance"],
                    "properties": {"variable": {"type": "string"}, "width": _num,
                                   "start": _num, "distance": _num},
                },
            },
        },
        "simulation": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "preset": {"type": "string"},
                "n_features": _pos_int,
                "n_per_cell": _pos_int,
                "cell_sizes": {
                    "type": ["array", "null"],
                    "items": {"type": "integer", "minimum": 0}, "minItems": 4, "maxItems": 4,
                },
                "noise_lo": _num,
                "noise_hi": _num,
                "k_plus": _num,
                "k_minus": _num,
                "k_alpha": _num,
                "k_beta": _num,
            },
        },
        "classifier": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "l2_lambda": {"type": "number", "minimum": 0},
                "learn_rate": {"type": "number", "exclusiveMinimum": 0},
                "max_iters": _pos_int,
                "grad_tol": {"type": "number", "exclusiveMinimum": 0},
                "standardize": {"type": "boolean"},
            },
        },
        "schedule": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "cell_size": _opt_pos_int,
                "step": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                "repeats": _pos_int,
            },
        },
        "heldout_fraction": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "balance_n": _opt_pos_int,
        "delta": {"type": ["number", "null"], "exclusiveMinimum": 0},
        "permutation": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "P_values": {"type": "array", "items": {"type": "number", "minimum": 0,
                                                        "maximum": 1}, "minItems": 1},
                "n_perms": _pos_int,
                "test_fraction": {"type": "number", "exclusiveMinimum": 0,
                                  "exclusiveMaximum": 1},
                "n_per_class": _pos_int,
                "k_y": _num,
                "k_c": _num,
            },
        },
    },
}

DEFAULTS = {
    "seed": 0,
    "data": None,
    "simulation": {
        "preset": "disjoint", "n_features": 100, "n_per_cell": 200, "cell_sizes": None,
        "noise_lo": -10.0, "noise_hi": 10.0,
        "k_plus": 0.0, "k_minus": 0.0, "k_alpha": 0.0, "k_beta": 0.0,
    },
    "classifier": ClassifierConfig().to_dict(),
    "schedule": {"cell_size": None, "step": 0.2, "repeats": 10},
    "heldout_fraction": 0.2,
    "balance_n": None,
    "delta": None,
    "permutation": {
        "P_values": [0.5, 0.7, 0.9, 0.95], "n_perms": 100, "test_fraction": 0.3,
        "n_per_class": 200, "k_y": 2.0, "k_c": 5.0,
    },
}

# settings each command reads; only these are echoed
_SECTIONS = {
    "simulate": ("seed", "simulation"),
    "ci": ("seed", "data", "simulation", "classifier", "schedule", "heldout_fraction",
           "balance_n", "delta"),
    "rp-sweep": ("seed", "classifier", "permutation"),
}


class CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # usage errors exit 1; exit code 2 is reserved for an undefined index
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _k_vector(text: str) -> list[float]:
    v = _float_list(text)
    if len(v) != 4:
        raise argparse.ArgumentTypeError("--k needs four values: k_plus,k_minus,k_alpha,k_beta")
    return v


def _flag_overrides(args) -> dict:
    o: dict = {}
    sim: dict = {}
    if getattr(args, "preset", None) is not None:
        sim["preset"] = args.preset
    if getattr(args, "n", None) is not None:
        sim["n_per_cell"] = args.n
    if getattr(args, "features", None) is not None:
        sim["n_features"] = args.features
    if getattr(args, "ky", None) is not None:
        sim["k_plus"] = sim["k_minus"] = args.ky
    if getattr(args, "kc", None) is not None:
        sim["k_alpha"] = sim["k_beta"] = args.kc
    if getattr(args, "k", None) is not None:
        sim.update(zip(("k_plus", "k_minus", "k_alpha", "k_beta"), args.k))
    if sim and args.command != "rp-sweep":
        o["simulation"] = sim
    if args.seed is not None:
        o["seed"] = args.seed
    sched = {k: v for k, v in (("step", getattr(args, "step", None)),
                               ("repeats", getattr(args, "repeats", None)),
                               ("cell_size", getattr(args, "cell_size", None))) if v is not None}
    if sched:
        o["schedule"] = sched
    for key in ("heldout_fraction", "balance_n", "delta"):
        if getattr(args, key, None) is not None:
            o[key] = getattr(args, key)
    if getattr(args, "data", None) is not None:
        data = {"path": args.data, "label": args.label, "confounder": args.confounder,
                "covariates": list(args.covariate or [])}
        if args.bin is not None:
            var, width, start, dist = args.bin
            data["bin"] = {"variable": var, "width": float(width), "start": float(start),
                           "distance": float(dist)}
            if var not in data["covariates"]:
                data["covariates"].append(var)
        o["data"] = data
    if args.command == "rp-sweep":
        perm = {k: v for k, v in (("P_values", args.P), ("n_perms", args.perms),
                                  ("test_fraction", args.test_fraction),
                                  ("n_per_class", args.n_per_class),
                                  ("k_y", args.ky), ("k_c", args.kc)) if v is not None}
        if perm:
            o["permutation"] = perm
    return o


def resolve_config(args) -> dict:
    """Defaults, then the ``--config`` file, then flags; validated."""
    cfg = copy.deepcopy(DEFAULTS)
    if args.config is not None:
        try:
            file_cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise CliError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(file_cfg, dict):
            raise CliError("config file must hold a JSON object")
        cfg = _merge(cfg, file_cfg)
    cfg = _merge(cfg, _flag_overrides(args))
    try:
        jsonschema.validate(cfg, RUN_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise CliError(f"invalid config at {where}: {exc.message}") from None
    resolve_preset(cfg["simulation"]["preset"])  # fail on a bad name before any work
    return cfg


def _echo(cfg: dict, command: str) -> dict:
    return {"command": command, **{k: cfg[k] for k in _SECTIONS[command]}}


def sim_config(cfg: dict) -> SimConfig:
    s = dict(cfg["simulation"])
    preset = s.pop("preset")
    return SimConfig(index_sets=resolve_preset(preset), seed=cfg["seed"], **s)


def _out_dir(cfg: dict, args) -> Path:
    out = args.out or cfg.get("out")
    if not out:
        raise CliError("an output directory is required (--out)")
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def cmd_simulate(cfg: dict, args) -> int:
    out = _out_dir(cfg, args)
    sim = sim_config(cfg)
    data = generate(sim)
    write_csv(data, out / "dataset.csv")
    report.write_json(sim.to_dict(), out / "simconfig.json")
    report.write_json(_echo(cfg, "simulate"), out / "resolved-config.json")
    print(f"wrote {data.n_samples} samples to {out / 'dataset.csv'}")
    return EXIT_OK


def _load_dataset(cfg: dict):
    d = cfg["data"]
    if d is None:
        return generate(sim_config(cfg))
    bin_spec = d.get("bin")
    if d.get("confounder") is None and bin_spec is None:
        raise CliError("data needs a confounder column or a bin specification")
    data = load_csv(d["path"], d["label"], d.get("confounder"),
                    covariates=d.get("covariates", []), ignore=d.get("ignore", []),
                    label_map=d.get("label_map"))
    if bin_spec is not None:
        spec = BinSpec(bin_spec["width"], bin_spec["start"], bin_spec["distance"])
        data = bin_continuous(data, bin_spec["variable"], spec)
    return data


def cmd_ci(cfg: dict, args) -> int:
    out = _out_dir(cfg, args)
    data = _load_dataset(cfg)
    seed = cfg["seed"]
    partition = partition_cells(data, cfg["heldout_fraction"], seed)
    sched_cfg = cfg["schedule"]
    N = sched_cfg["cell_size"] or default_cell_size(partition)
    if N < 1:
        raise DataError("training pools are too small for any cell size")
    schedule = BiasSchedule.from_step(N, sched_cfg["step"], sched_cfg["repeats"], seed)
    balance_n = cfg["balance_n"] or default_balance_n(partition)

    resolved = _merge(cfg, {"schedule": {"cell_size": N}, "balance_n": balance_n})
    echo = _echo(resolved, "ci")
    report.write_json(echo, out / "resolved-config.json")

    result = confounding_index(
        partition, ClassifierConfig(**cfg["classifier"]), schedule, balance_n=balance_n,
        delta=cfg["delta"], n_jobs=args.jobs, config=echo,
    )
    report.write_json(result, out / "report.json")
    report.write_curves(result.phi, out / "curves_phi.csv")
    report.write_curves(result.phi_star, out / "curves_phi_star.csv")
    if not result.defined:
        print(result.message, file=sys.stderr)
        print(f"scenario UNDEFINED; phi={result.phi.phi:.4f} phi*={result.phi_star.phi:.4f}")
        return EXIT_UNDEFINED
    print(f"CI = {result.ci:.4f} +/- {result.ci_stderr:.4f} ({result.scenario.value})")
    return EXIT_OK


def cmd_rp_sweep(cfg: dict, args) -> int:
    out = _out_dir(cfg, args)
    p = cfg["permutation"]
    base = rp_base_config(p["k_y"], p["k_c"], seed=cfg["seed"])
    rows = rp_sweep(p["P_values"], base, p["n_per_class"], ClassifierConfig(**cfg["classifier"]),
                    p["n_perms"], p["test_fraction"], cfg["seed"], args.jobs)
    echo = _echo(cfg, "rp-sweep")
    report.write_json(echo, out / "resolved-config.json")
    report.write_rp_sweep(rows, out / "rp_sweep.csv")
    report.write_json({"config": echo, "sweep": [{"P": P, **r.to_dict()} for P, r in rows]},
                      out / "report.json")
    for P, r in rows:
        print(f"P={P:g}  rp_mean_auc={r.rp_mean_auc:.4f}  p={r.p_value:.3g}")
    return EXIT_OK


def monotonicity_verdict(curves: dict, delta: float | None = None) -> dict:
    """delta-pairs and per-direction verdicts for every ``mean_auc*`` column."""
    b = curves["b"]
    out = {}
    for col in sorted(c for c in curves if c.startswith("mean_auc")):
        series = curves[col]
        name = col[len("mean_auc"):].lstrip("_") or "curve"
        se_col = "stderr" + col[len("mean_auc"):]
        if delta is not None:
            d = float(delta)
        elif se_col in curves:
            d = default_delta(curves[se_col])
        else:
            raise CliError(f"column {col} has no matching {se_col}; pass --delta")
        pairs = delta_pairs(series, d)
        out[name] = {
            "delta": d,
            "pairs": [{"i": p.i, "j": p.j, "b_i": float(b[p.i]), "b_j": float(b[p.j]),
                       "direction": p.direction.value} for p in pairs],
            Direction.INCREASING.value: is_delta_monotone(series, d, Direction.INCREASING),
            Direction.DECREASING.value: is_delta_monotone(series, d, Direction.DECREASING),
        }
    return out


def cmd_monotonicity(cfg: dict, args) -> int:
    try:
        curves = report.read_curves(args.curves)
    except OSError as exc:
        raise CliError(f"cannot read {args.curves}: {exc}") from exc
    verdict = {"curves": str(args.curves), "series": monotonicity_verdict(curves, args.delta)}
    text = report.dumps(verdict)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        report.write_json({"command": "monotonicity", "curves": str(args.curves),
                           "delta": args.delta}, out / "resolved-config.json")
        (out / "report.json").write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--seed", type=int, help="root seed for all randomness")
    common.add_argument("--jobs", type=int, default=1, help="parallel workers (default 1)")
    common.add_argument("--out", help="output directory")

    sim = argparse.ArgumentParser(add_help=False)
    sim.add_argument("--preset", help=f"index-set preset or 4-symbol pattern ({', '.join(PRESETS)})")
    sim.add_argument("--ky", type=float, help="k_plus = k_minus")
    sim.add_argument("--kc", type=float, help="k_alpha = k_beta")
    sim.add_argument("--k", type=_k_vector, metavar="K+,K-,KA,KB",
                     help="all four constants; overrides --ky/--kc")
    sim.add_argument("--n", type=int, help="samples per cell")
    sim.add_argument("--features", type=int, help="number of features")

    p = _Parser(prog="confindex", description="Confounding Index toolkit")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("simulate", parents=[common, sim], help="write a synthetic dataset")

    ci = sub.add_parser("ci", parents=[common, sim], help="compute Phi, Phi* and the index")
    ci.add_argument("--data", help="CSV dataset (otherwise simulated)")
    ci.add_argument("--label", default="label")
    ci.add_argument("--confounder", default=None)
    ci.add_argument("--covariate", action="append", help="numeric non-feature column")
    ci.add_argument("--bin", nargs=4, metavar=("VAR", "WIDTH", "START", "DISTANCE"),
                    help="use two bins of a continuous covariate as the confounder")
    ci.add_argument("--step", type=float, help="bias step as a fraction (default 0.2)")
    ci.add_argument("--repeats", type=int, help="repeats per bias (default 10)")
    ci.add_argument("--cell-size", type=int, help="per-cell training size N")
    ci.add_argument("--heldout-fraction", type=float)
    ci.add_argument("--balance-n", type=int, help="per-cell validation size")
    ci.add_argument("--delta", type=float, help="monotonicity scale for both curves")

    rp = sub.add_parser("rp-sweep", parents=[common], help="restricted-permutation bias sweep")
    rp.add_argument("--P", type=_float_list, help="comma-separated bias fractions")
    rp.add_argument("--perms", type=int, help="permutations per P")
    rp.add_argument("--test-fraction", type=float)
    rp.add_argument("--n-per-class", type=int)
    rp.add_argument("--ky", type=float, help="label signal strength")
    rp.add_argument("--kc", type=float, help="confounder shift (same for both values)")

    mono = sub.add_parser("monotonicity", parents=[common], help="delta-monotonicity of a curve CSV")
    mono.add_argument("curves", help="curve CSV with a b column and mean_auc columns")
    mono.add_argument("--delta", type=float)
    return p


_COMMANDS = {"simulate": cmd_simulate, "ci": cmd_ci, "rp-sweep": cmd_rp_sweep,
             "monotonicity": cmd_monotonicity}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.jobs is not None and args.jobs == 0:
            raise CliError("--jobs must be non-zero")
        cfg = resolve_config(args) if args.command != "monotonicity" else {}
        return _COMMANDS[args.command](cfg, args)
    except (CliError, DataError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
