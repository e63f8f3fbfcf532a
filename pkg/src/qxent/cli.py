"""Command-line entry point: ``qxent {check,tomography,bounds,counterexample}``.

Exit codes: 0 success / all checks pass, 1 a check failed, 2 bad
configuration (nothing is written in that case).
"""

import argparse
import dataclasses
import math
import os
import sys

import numpy as np
import yaml

from . import __version__, io as dataset_io
from .empirical import (
    avg_log_likelihood,
    empirical_operator,
    empirical_state,
    sample_dataset,
)
from .entropy import bound_chain, quantum_cross_entropy
from .exceptions import ConfigError, IncompleteSet, InvalidDensity, ZeroProbability
from .measurement import TomographicSet, measurement_from_literal
from .mle import CrossEntropyMinimizer, LinearInversionTomography, MaxLikelihoodTomography
from .reporting import dumps_csv, dumps_json, preamble, to_bits, write_text
from .states import random_density, state_from_literal, trace_distance
from .verify import SUITES, check_povm_counterexample, run_suites, trial_rng

CHECK_COLUMNS = ["check_id", "trials", "worst_margin", "tolerance", "pass", "witness_ref"]
BOUNDS_COLUMNS = ["trial", "rank_rho", "S", "neg_log_overlap", "neg_log_fidelity",
                  "overlap_gap", "fidelity_gap"]
TOMOGRAPHY_COLUMNS = ["estimator", "trace_distance", "S_operator", "S_state",
                      "neg_log_likelihood", "converged", "iterations"]


@dataclasses.dataclass
class RunConfig:
    seed: int = None
    dim: int = 2
    trials: int = 100
    suite: list = dataclasses.field(default_factory=lambda: ["all"])
    measurement: object = "pauli"
    state: list = None
    shots: int = 1000
    out: str = "qxent-out"
    parallel: int = 1
    bits: bool = False

    def echo(self):
        """Config as embedded in reports; execution-only fields are left out."""
        d = dataclasses.asdict(self)
        del d["out"], d["parallel"]
        return d


_FIELDS = {f.name for f in dataclasses.fields(RunConfig)}


def _as_int(name, value, lo=None):
    if isinstance(value, str) and value.strip().lstrip("-").isdigit():
        value = int(value)
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise ConfigError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if lo is not None and value < lo:
        raise ConfigError(f"{name} must be >= {lo}")
    return value


def load_config_file(path):
    try:
        with open(path) as f:
            data = yaml.safe_load(f)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("config file must be a mapping of RunConfig fields")
    unknown = sorted(set(data) - _FIELDS)
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
    return data


def build_config(args, need_seed=True):
    values = load_config_file(args.config) if getattr(args, "config", None) else {}
    for name in ("seed", "dim", "trials", "suite", "out", "parallel", "shots"):
        v = getattr(args, name, None)
        if v is not None:
            values[name] = v
    if getattr(args, "bits", False):
        values["bits"] = True
    cfg = RunConfig(**values)
    if cfg.seed is None:
        if need_seed:
            raise ConfigError("a seed is required (--seed or 'seed' in the config)")
    else:
        cfg.seed = _as_int("seed", cfg.seed, 0)
        if cfg.seed >= 2 ** 64:
            raise ConfigError("seed must fit in 64 bits")
    cfg.dim = _as_int("dim", cfg.dim, 1)
    cfg.trials = _as_int("trials", cfg.trials, 0)
    cfg.shots = _as_int("shots", cfg.shots, 1)
    cfg.parallel = _as_int("parallel", cfg.parallel, 1)
    if isinstance(cfg.suite, str):
        cfg.suite = [s.strip() for s in cfg.suite.split(",") if s.strip()]
    if not cfg.suite or any(s not in SUITES + ("all",) for s in cfg.suite):
        raise ConfigError(f"suite must be a subset of {', '.join(SUITES + ('all',))}")
    if not isinstance(cfg.bits, bool):
        raise ConfigError("bits must be true or false")
    cfg.out = os.environ.get("QXENT_OUT") or cfg.out
    return cfg


def _emit(cfg, stem, csv_text, json_obj):
    write_text(os.path.join(cfg.out, f"{stem}.csv"), csv_text)
    write_text(os.path.join(cfg.out, f"{stem}.json"), dumps_json(json_obj))


def _report_header(command, cfg):
    return {"artifact": "qxent", "version": __version__, "command": command,
            "seed": cfg.seed, "config": cfg.echo()}


def cmd_check(cfg):
    results = run_suites(cfg.suite, cfg.dim, cfg.trials, cfg.seed, cfg.parallel)
    stem = "check_report"
    rows = []
    for r in results:
        row = r.as_dict()
        row["witness_ref"] = f"{stem}.json#{r.check_id}" if r.witness else ""
        rows.append(row)
    report = _report_header("check", cfg)
    report["all_pass"] = all(r.passed for r in results)
    report["checks"] = [r.as_dict() for r in results]
    _emit(cfg, stem, dumps_csv(CHECK_COLUMNS, rows, preamble("check", cfg.echo(), cfg.seed)),
          report)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.check_id:24s} trials={r.trials:<5d} "
              f"worst_margin={r.worst_margin:.3e} tol={r.tolerance:.0e}")
    return 0 if report["all_pass"] else 1


def _tomography_inputs(cfg):
    try:
        groups = measurement_from_literal(cfg.measurement, cfg.dim)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad measurement: {exc}") from exc
    if cfg.state is not None:
        try:
            rho = state_from_literal(cfg.state)
        except (InvalidDensity, ValueError) as exc:
            raise ConfigError(f"bad state literal: {exc}") from exc
        if rho.dim != cfg.dim:
            raise ConfigError(f"state has dim {rho.dim}, config dim is {cfg.dim}")
    else:
        rho = random_density(cfg.dim, rng=trial_rng(cfg.seed, "tomography-state", cfg.dim, 0))
    if any(g.dim != cfg.dim for g in groups):
        raise ConfigError("measurement dimension does not match dim")
    try:
        TomographicSet(groups)
    except IncompleteSet as exc:
        raise ConfigError(f"measurement set is not tomographically complete: {exc}") from exc
    return rho, groups


def _estimate_row(name, sigma, rho, ds, bits):
    row = {"estimator": name, "trace_distance": trace_distance(sigma, rho)}
    nll = -avg_log_likelihood(ds, sigma)
    row["neg_log_likelihood"] = to_bits(nll, bits)
    row["S_operator"] = to_bits(quantum_cross_entropy(empirical_operator(ds).matrix, sigma), bits)
    try:
        row["S_state"] = to_bits(quantum_cross_entropy(empirical_state(ds, sigma).matrix, sigma), bits)
    except ZeroProbability:
        row["S_state"] = math.nan
    return row


def cmd_tomography(cfg):
    rho, groups = _tomography_inputs(cfg)
    rng = trial_rng(cfg.seed, "tomography-data", cfg.dim, 0)
    ds = sample_dataset(groups, rho, cfg.shots, rng, seed=cfg.seed)

    li = LinearInversionTomography().fit(ds)
    ml = MaxLikelihoodTomography().fit(ds)
    ce = CrossEntropyMinimizer().fit(rho)

    rows = [
        dict(_estimate_row("linear_inversion", li.estimate_, rho, ds, cfg.bits),
             converged=True, iterations=0),
        dict(_estimate_row("max_likelihood", ml.estimate_, rho, ds, cfg.bits),
             converged=ml.report_.converged, iterations=ml.report_.iterations),
        dict(_estimate_row("min_cross_entropy", ce.estimate_, rho, ds, cfg.bits),
             converged=ce.report_.converged, iterations=ce.report_.iterations),
    ]
    report = _report_header("tomography", cfg)
    report.update({
        "units": "bits" if cfg.bits else "nats",
        "true_state": _literal(rho),
        "n_records": len(ds),
        "manifest": ds.manifest,
        "estimators": rows,
        "estimates": {
            "linear_inversion": _literal(li.estimate_),
            "linear_inversion_raw": _literal(li.raw_estimate_),
            "max_likelihood": _literal(ml.estimate_),
            "min_cross_entropy": _literal(ce.estimate_),
        },
        "optimizer_reports": {
            "max_likelihood": ml.report_.as_dict(),
            "min_cross_entropy": ce.report_.as_dict(),
        },
    })
    _emit(cfg, "tomography_report",
          dumps_csv(TOMOGRAPHY_COLUMNS, rows, preamble("tomography", cfg.echo(), cfg.seed)), report)
    dataset_io.write_dataset(ds, os.path.join(cfg.out, "dataset.csv"))
    dataset_io.write_dataset(ds, os.path.join(cfg.out, "dataset.jsonl"))
    for r in rows:
        print(f"{r['estimator']:18s} trace_distance={r['trace_distance']:.3e} "
              f"S_O={r['S_operator']:.6f} S_S={r['S_state']:.6f} -l={r['neg_log_likelihood']:.6f}")
    return 0 if ml.report_.converged and ce.report_.converged else 1


def _literal(M):
    M = np.asarray(M)
    return [[[float(z.real), float(z.imag)] for z in row] for row in M]


def cmd_bounds(cfg):
    rows = []
    worst = math.inf
    for t in range(cfg.trials):
        rng = trial_rng(cfg.seed, "bounds", cfg.dim, t)
        rank = int(rng.integers(1, cfg.dim + 1))
        rho = random_density(cfg.dim, rank, rng)
        sigma = random_density(cfg.dim, rng=rng)
        chain = bound_chain(rho, sigma)
        worst = min(worst, chain.overlap_gap, chain.fidelity_gap)
        row = {k: to_bits(v, cfg.bits) for k, v in chain.as_dict().items()}
        row.update(trial=t, rank_rho=rank)
        rows.append(row)
    ok = worst >= -1e-9
    report = _report_header("bounds", cfg)
    report.update({"units": "bits" if cfg.bits else "nats", "trials": cfg.trials,
                   "worst_gap": to_bits(worst, cfg.bits), "pass": ok, "tolerance": 1e-9})
    _emit(cfg, "bounds", dumps_csv(BOUNDS_COLUMNS, rows, preamble("bounds", cfg.echo(), cfg.seed)),
          report)
    print(f"{'PASS' if ok else 'FAIL'} bound chain over {cfg.trials} pairs, worst gap {worst:.3e}")
    return 0 if ok else 1


def cmd_counterexample(cfg):
    result = check_povm_counterexample()
    values = dict(result.witness["values"])
    for key in ("tr_rho1_log_sigma", "tr_rho2_log_sigma", "log_prob1", "log_prob2",
                "record2_violation"):
        values[key] = to_bits(values[key], cfg.bits)
    report = _report_header("counterexample", cfg)
    report.update({"units": "bits" if cfg.bits else "nats", "values": values,
                   "check": result.as_dict()})
    row = result.as_dict()
    row["witness_ref"] = "counterexample_report.json#povm-counterexample"
    _emit(cfg, "counterexample_report",
          dumps_csv(CHECK_COLUMNS, [row], preamble("counterexample", cfg.echo(), cfg.seed)),
          report)
    for key, v in values.items():
        print(f"{key:22s} {v: .12f}")
    print("PASS" if result.passed else "FAIL")
    return 0 if result.passed else 1


def _parser():
    p = argparse.ArgumentParser(prog="qxent", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"qxent {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, trials=True):
        sp.add_argument("--config", metavar="PATH", help="YAML/JSON file with RunConfig fields")
        sp.add_argument("--seed", type=int, help="master seed (required unless in config)")
        sp.add_argument("--dim", type=int)
        if trials:
            sp.add_argument("--trials", type=int)
        sp.add_argument("--out", metavar="DIR", help="output directory (QXENT_OUT overrides)")
        sp.add_argument("--bits", action="store_true", default=None,
                        help="report entropies in bits instead of nats")

    c = sub.add_parser("check", help="run verification suites")
    common(c)
    c.add_argument("--suite", metavar="NAME[,NAME...]",
                   help=f"one or more of: all, {', '.join(SUITES)}")
    c.add_argument("--parallel", type=int, metavar="N", help="worker threads per check")

    t = sub.add_parser("tomography", help="simulate a tomography experiment")
    common(t, trials=False)
    t.add_argument("--shots", type=int, help="shots per measurement group")

    b = sub.add_parser("bounds", help="Monte-Carlo sweep of the entropy lower bounds")
    common(b)

    x = sub.add_parser("counterexample", help="POVM counterexample fixture")
    x.add_argument("--config", metavar="PATH")
    x.add_argument("--out", metavar="DIR")
    x.add_argument("--bits", action="store_true", default=None)
    return p


COMMANDS = {
    "check": cmd_check,
    "tomography": cmd_tomography,
    "bounds": cmd_bounds,
    "counterexample": cmd_counterexample,
}


def main(argv=None):
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        cfg = build_config(args, need_seed=args.command != "counterexample")
        if args.command == "tomography":
            _tomography_inputs(cfg)
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"qxent: configuration error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
