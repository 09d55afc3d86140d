"""Command-line interface.

Subcommands: skr, optimize, sweep, compare, select-code, fit-fer,
measure-fer, peg, reoptimize.  Results are printed as JSON on stdout and
written as CSV/JSON artifacts; progress goes to stderr.  Exit codes:
0 success, 1 usage error, 2 domain/computation error, 3 I/O error.
Every data file is written atomically and contains no timestamps, so
repeated runs with the same config and seed are byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import os
import sys
from pathlib import Path

import numpy as np

from .config import CONFIG_ENV_VAR, DEFAULT_SEED, RunConfig
from .core import skr_finite
from .errors import ConfigError, CvqkdError
from .fer import FerMeasurementSet, FerModel, fit_fer, reanchor_to_snr
from .optimize import (
    compare_methods,
    optimize_va,
    reoptimize_live,
    select_code,
    sweep,
)
from .recon import (
    measure_fer,
    parse_degree_polynomials,
    peg_construct,
    read_alist,
    write_alist,
)
from . import presets

__all__ = ["main"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DOMAIN = 2
EXIT_IO = 3

SWEEP_CSV_COLUMNS = ("axis", "va_opt", "skr_opt", "beta", "fer", "snr")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); we reserve 2
        raise _UsageError(message)


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _json_default(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return dataclasses.asdict(obj)
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)!r}")


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, default=_json_default, allow_nan=True)


def _print_json(doc) -> None:
    sys.stdout.write(_dump(doc) + "\n")


def _breakdown_doc(bd) -> dict:
    doc = dataclasses.asdict(bd)
    doc["bounds"] = dataclasses.asdict(bd.bounds)
    return doc


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _grid(text: str) -> list[float]:
    try:
        values = [float(x) for x in text.replace(";", ",").split(",") if x.strip()]
    except ValueError:
        raise _UsageError(f"bad grid {text!r}: expected comma-separated numbers")
    if not values:
        raise _UsageError("grid must be non-empty")
    return values


_OVERRIDE_KEYS = (
    "distance_km",
    "attenuation_db_per_km",
    "transmittance",
    "excess_noise_snu",
    "detector_efficiency",
    "electronic_noise_snu",
    "protocol",
    "block_size",
    "key_fraction",
    "asymptotic",
    "eps_pe",
    "eps_bar",
    "eps_pa",
    "confidence_coeff",
    "code_rate",
    "fer_model",
    "output_dir",
    "seed",
)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help=f"config file (default ${CONFIG_ENV_VAR})")
    for key in _OVERRIDE_KEYS:
        p.add_argument("--" + key.replace("_", "-"), dest=key, default=None)


def _load_config(args) -> RunConfig:
    overrides = {k: getattr(args, k) for k in _OVERRIDE_KEYS if getattr(args, k, None) is not None}
    return RunConfig.load(args.config, overrides)


def _resolve_fer(config: RunConfig, args):
    """FER source for rate commands: constant --fer wins over model file."""
    fer_arg = getattr(args, "fer", None)
    if fer_arg is not None:
        value = float(fer_arg)
        if not 0.0 <= value <= 1.0:
            raise CvqkdError("--fer must lie in [0, 1]")
        return value
    model = config.fer_model()
    return reanchor_to_snr(model, config.channel(), config.protocol())


# ----------------------------------------------------------------- commands


def _cmd_skr(args) -> int:
    config = _load_config(args)
    v_a = float(args.va)
    if v_a <= 0.0:
        raise CvqkdError("v_a must be positive")
    fer = _resolve_fer(config, args)
    fer_value = fer if isinstance(fer, float) else float(fer(v_a))
    bd = skr_finite(config.channel(), config.protocol(), config.finite_size(),
                    v_a, config.get_float("code_rate"), fer_value)
    _print_json({"v_a": v_a, **_breakdown_doc(bd)})
    return EXIT_OK


def _cmd_optimize(args) -> int:
    config = _load_config(args)
    fer = _resolve_fer(config, args)
    res = optimize_va(config.channel(), config.protocol(), config.finite_size(),
                      config.get_float("code_rate"), fer)
    doc = {
        "va_opt": res.v_a_opt,
        "skr_opt": res.skr_opt,
        "feasible": res.feasible,
        "degenerate": res.degenerate,
        "search_evals": res.search_evals,
        "breakdown": _breakdown_doc(res.breakdown),
    }
    out = config.output_dir
    _atomic_write(out / "optimize.json", _dump(doc))
    bd = res.breakdown
    _atomic_write(out / "optimize.csv", _csv_text(
        SWEEP_CSV_COLUMNS,
        [["va", res.v_a_opt, res.skr_opt, bd.beta, bd.fer, bd.snr]],
    ))
    _print_json(doc)
    return EXIT_OK


def _cmd_sweep(args) -> int:
    config = _load_config(args)
    grid = _grid(args.grid)
    model = config.fer_model()
    code_models = None
    if args.axis == "code":
        registry = config.code_registry()
        code_models = {}
        for cid, entry in registry.items():
            if "rate" not in entry or "fer_model" not in entry:
                raise ConfigError(f"code registry entry {cid!r} needs rate and fer_model")
            code_models[float(entry["rate"])] = FerModel.from_json(
                Path(entry["fer_model"]).read_text())
    rows = sweep(config.channel(), config.protocol(), config.finite_size(),
                 config.get_float("code_rate", 0.1), model, args.axis, grid,
                 code_models=code_models)
    csv_rows = []
    for r in rows:
        if r.error is not None:
            csv_rows.append([r.axis_value, "error", "error", "error", "error",
                             r.error])
        else:
            csv_rows.append([r.axis_value, r.va_opt, r.skr_opt, r.beta, r.fer,
                             r.snr])
    out = config.output_dir
    _atomic_write(out / f"sweep_{args.axis}.csv",
                  _csv_text(SWEEP_CSV_COLUMNS, csv_rows))
    doc = {"axis": args.axis, "rows": [dataclasses.asdict(r) for r in rows]}
    _atomic_write(out / f"sweep_{args.axis}.json", _dump(doc))
    _print_json(doc)
    if all(r.error is not None for r in rows):
        return EXIT_DOMAIN
    return EXIT_OK


def _cmd_compare(args) -> int:
    config = _load_config(args)
    model = config.fer_model()
    cmp_ = compare_methods(
        config.channel(), config.protocol(), config.finite_size(),
        config.get_float("code_rate"),
        reanchor_to_snr(model, config.channel(), config.protocol()),
        fixed_snr=float(args.fixed_snr),
        assumed_beta=float(args.assumed_beta),
        assumed_fer=float(args.assumed_fer),
    )
    rows = [cmp_.method_one, cmp_.method_two, cmp_.ours]
    csv_rows = [
        [r.method, r.v_a, r.beta, r.snr, r.fer, r.skr,
         {"fixed-snr": cmp_.improvement_over_one_pct,
          "assumed-constant": cmp_.improvement_over_two_pct,
          "joint-optimum": 0.0}[r.method]]
        for r in rows
    ]
    out = config.output_dir
    _atomic_write(out / "compare.csv", _csv_text(
        ("method", "va", "beta", "snr", "fer", "skr", "improvement_of_ours_pct"),
        csv_rows))
    doc = dataclasses.asdict(cmp_)
    _atomic_write(out / "compare.json", _dump(doc))
    _print_json(doc)
    return EXIT_OK


def _cmd_select_code(args) -> int:
    config = _load_config(args)
    registry = config.code_registry()
    if not registry:
        raise ConfigError("select-code needs code.<id>.rate and "
                          "code.<id>.fer_model registry entries")
    candidates = []
    ids = []
    for cid in sorted(registry):
        entry = registry[cid]
        if "rate" not in entry or "fer_model" not in entry:
            raise ConfigError(f"code registry entry {cid!r} needs rate and fer_model")
        model = FerModel.from_json(Path(entry["fer_model"]).read_text())
        candidates.append((float(entry["rate"]), model))
        ids.append(cid)
    ranking = select_code(config.channel(), config.protocol(),
                          config.finite_size(), candidates)
    doc = {
        "ranking": [
            {
                "code_id": ids[c.input_index],
                "code_rate": c.code_rate,
                "va_opt": c.result.v_a_opt,
                "skr_opt": c.result.skr_opt,
                "skr_delta_to_best": c.skr_delta_to_best,
            }
            for c in ranking
        ]
    }
    out = config.output_dir
    _atomic_write(out / "select_code.json", _dump(doc))
    _atomic_write(out / "select_code.csv", _csv_text(
        ("code_id", "code_rate", "va_opt", "skr_opt", "skr_delta_to_best"),
        [[r["code_id"], r["code_rate"], r["va_opt"], r["skr_opt"],
          r["skr_delta_to_best"]] for r in doc["ranking"]]))
    _print_json(doc)
    return EXIT_OK


def _cmd_fit_fer(args) -> int:
    config = _load_config(args)
    points_path = Path(args.points)
    data = FerMeasurementSet.from_csv(points_path.read_text())
    result = fit_fer(data, config.channel(), config.protocol(),
                     code_id=args.code_id)
    text = result.model.to_json()
    if args.output:
        _atomic_write(Path(args.output), text + "\n")
    else:
        sys.stdout.write(text + "\n")
    print(f"fit rms residual: {result.rms:.6g} over {len(data.va)} points",
          file=sys.stderr)
    return EXIT_OK


def _cmd_measure_fer(args) -> int:
    config = _load_config(args)
    h = read_alist(Path(args.matrix).read_text(),
                   code_id=Path(args.matrix).stem)
    grid = _grid(args.va_grid)
    trials = int(args.trials)
    params = config.channel()
    va_list, trial_list, fail_list = [], [], []
    for v_a in grid:
        est = measure_fer(h, params, v_a, trials=trials, seed=config.seed)
        print(
            f"va={v_a:g}: fer={est.fer:.4f} "
            f"ci=[{est.ci_low:.4f}, {est.ci_high:.4f}] "
            f"({est.failures}/{est.trials} failed, "
            f"mean iterations {est.mean_iterations:.1f})",
            file=sys.stderr,
        )
        va_list.append(v_a)
        trial_list.append(est.trials)
        fail_list.append(est.failures)
    out_path = Path(args.output) if args.output else (
        config.output_dir / "fer_measurements.csv")
    data = FerMeasurementSet(va=tuple(va_list), trials=tuple(trial_list),
                             failures=tuple(fail_list))
    _atomic_write(out_path, data.to_csv())
    return EXIT_OK


def _cmd_peg(args) -> int:
    config = _load_config(args)
    if args.dist in presets.DEGREE_DISTRIBUTION_IDS:
        dist = presets.degree_distribution(args.dist)
    else:
        spec_path = Path(args.dist)
        doc = json.loads(spec_path.read_text())
        try:
            dist = parse_degree_polynomials(
                doc["variable_poly"], doc["check_poly"],
                code_rate=float(doc["code_rate"]),
                threshold=doc.get("threshold"),
                dist_id=doc.get("id", spec_path.stem),
            )
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"bad distribution spec {spec_path}: {exc}") from None
    h = peg_construct(dist, n_vars=int(args.n_vars), seed=config.seed)
    out_path = Path(args.output) if args.output else (
        config.output_dir / f"{dist.dist_id}_n{int(args.n_vars)}.alist")
    _atomic_write(out_path, write_alist(h))
    print(f"wrote {out_path} (rate {h.code_rate:.4f}, {h.n_edges} edges)",
          file=sys.stderr)
    return EXIT_OK


def _cmd_reoptimize(args) -> int:
    config = _load_config(args)
    model = config.fer_model()
    second = None
    if args.second_excess_noise_snu is not None:
        base = config.channel()
        second = dataclasses.replace(
            base,
            excess_noise=float(args.second_excess_noise_snu),
            electronic_noise=(
                float(args.second_electronic_noise_snu)
                if args.second_electronic_noise_snu is not None
                else base.electronic_noise
            ),
        )
    report = reoptimize_live(
        config.channel(), config.protocol(), config.finite_size(),
        config.get_float("code_rate"), model,
        second_block=second,
        applied_va=float(args.applied_va) if args.applied_va else None,
    )
    doc = {
        "first_block": {
            "va_opt": report.first_opt.v_a_opt,
            "skr_opt": report.first_opt.skr_opt,
        },
        "applied_va": report.applied_va,
        "achieved_skr": None if report.achieved is None else report.achieved.skr,
        "second_block_opt": None if report.second_opt is None else {
            "va_opt": report.second_opt.v_a_opt,
            "skr_opt": report.second_opt.skr_opt,
        },
        "deviation_vs_first_pct": report.deviation_vs_first_pct,
    }
    _atomic_write(config.output_dir / "reoptimize.json", _dump(doc))
    _print_json(doc)
    return EXIT_OK


# ----------------------------------------------------------------- parser


def build_parser() -> _Parser:
    parser = _Parser(prog="cvqkd", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("skr", help="secret key rate at one modulation variance")
    _add_common(p)
    p.add_argument("--va", required=True, type=float)
    p.add_argument("--fer", default=None, help="constant FER instead of a model")
    p.set_defaults(func=_cmd_skr)

    p = sub.add_parser("optimize", help="optimal modulation variance")
    _add_common(p)
    p.add_argument("--fer", default=None)
    p.set_defaults(func=_cmd_optimize)

    p = sub.add_parser("sweep", help="optimize along one parameter axis")
    _add_common(p)
    p.add_argument("--axis", required=True,
                   choices=("v_a", "xi", "vel", "N", "code"))
    p.add_argument("--grid", required=True, help="comma-separated values")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("compare", help="three-method comparison")
    _add_common(p)
    p.add_argument("--fixed-snr", required=True, type=float)
    p.add_argument("--assumed-beta", required=True, type=float)
    p.add_argument("--assumed-fer", required=True, type=float)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("select-code", help="rank registered codes by key rate")
    _add_common(p)
    p.set_defaults(func=_cmd_select_code)

    p = sub.add_parser("fit-fer", help="fit a FER model to measured points")
    _add_common(p)
    p.add_argument("points", help="CSV file with header va,trials,failures")
    p.add_argument("--code-id", default="fitted")
    p.add_argument("--output", default=None, help="write model JSON here")
    p.set_defaults(func=_cmd_fit_fer)

    p = sub.add_parser("measure-fer", help="Monte Carlo FER of an alist code")
    _add_common(p)
    p.add_argument("matrix", help="parity-check matrix in alist format")
    p.add_argument("--va-grid", required=True)
    p.add_argument("--trials", default=200, type=int)
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_measure_fer)

    p = sub.add_parser("peg", help="construct a parity-check matrix")
    _add_common(p)
    p.add_argument("--dist", required=True,
                   help=f"bundled id {presets.DEGREE_DISTRIBUTION_IDS} or a "
                        "JSON polynomial spec")
    p.add_argument("--n-vars", required=True, type=int)
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_peg)

    p = sub.add_parser("reoptimize", help="two-block live re-optimization")
    _add_common(p)
    p.add_argument("--applied-va", default=None)
    p.add_argument("--second-excess-noise-snu", default=None)
    p.add_argument("--second-electronic-noise-snu", default=None)
    p.set_defaults(func=_cmd_reoptimize)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CvqkdError, ValueError) as exc:
        _print_json({"error": {"type": type(exc).__name__, "message": str(exc)}})
        return EXIT_DOMAIN
    except (FileNotFoundError, OSError) as exc:
        _print_json({"error": {"type": type(exc).__name__, "message": str(exc)}})
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
