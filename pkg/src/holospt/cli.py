"""Command line entry point: holospt run | list | validate."""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
import zlib
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from importlib import resources

import jsonschema
import numpy as np

from . import __version__
from .experiments import REGISTRY, catalog
from .hilbert import CapacityError

DEFAULT_SEED = 20240917

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC, EXIT_CAP = 0, 2, 3, 4


class ConfigError(ValueError):
    pass


def load_schema() -> dict:
    return json.loads(resources.files("holospt").joinpath("schemas", "config.schema.json").read_text())


def _jobs_from(config: dict) -> list[dict]:
    if "experiments" in config:
        return [dict(j) for j in config["experiments"]]
    if config["experiment"] == "all":
        return [{"experiment": name} for name in REGISTRY]
    return [{"experiment": config["experiment"], "params": config.get("params", {})}]


def validate_config(config: dict) -> list[dict]:
    """Schema-check a config and resolve every job's parameters (defaults filled in)."""
    try:
        jsonschema.validate(config, load_schema())
    except jsonschema.ValidationError as e:
        raise ConfigError(f"config: {e.message}") from None
    jobs = []
    for job in _jobs_from(config):
        name = job["experiment"]
        if name not in REGISTRY:
            raise ConfigError(f"unknown experiment {name!r}")
        exp = REGISTRY[name]
        params = dict(job.get("params") or {})
        extra = set(params) - set(exp.defaults)
        if extra:
            raise ConfigError(f"{name}: unknown parameters {sorted(extra)}")
        schema = {"type": "object", "properties": exp.params_schema}
        try:
            jsonschema.validate(params, schema)
        except jsonschema.ValidationError as e:
            raise ConfigError(f"{name}: {e.message}") from None
        jobs.append({"experiment": name, "params": {**exp.defaults, **params}})
    return jobs


def config_hash(job: dict, seed: int) -> str:
    blob = json.dumps({"job": job, "seed": seed}, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _rng(seed: int, name: str) -> np.random.Generator:
    return np.random.default_rng([seed, zlib.crc32(name.encode())])


def _clean(x):
    """Convert numpy scalars and containers to plain JSON types."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, (np.complexfloating, complex)):
        return [float(np.real(x)), float(np.imag(x))]
    return x


def run_job(job: dict, seed: int) -> list[dict]:
    exp = REGISTRY[job["experiment"]]
    values = exp.func(job["params"], _rng(seed, exp.name))
    h = config_hash(job, seed)
    return [{
        "experiment": exp.name, "anchor": exp.anchor, "module_version": __version__,
        "config_hash": h, "seed": seed, "tolerance": exp.tolerance, "index": i,
        "values": _clean(v),
    } for i, v in enumerate(values)]


def run_jobs(jobs, seed: int, n_workers: int = 1) -> list[dict]:
    if n_workers > 1:
        with ThreadPoolExecutor(n_workers) as pool:
            results = list(pool.map(lambda j: run_job(j, seed), jobs))
    else:
        results = [run_job(j, seed) for j in jobs]
    return [r for rs in results for r in rs]


def records_digest(records) -> str:
    """Hash of the record values with timestamps excluded."""
    h = hashlib.sha256()
    for r in records:
        body = {k: v for k, v in r.items() if k != "timestamp"}
        h.update(json.dumps(body, sort_keys=True).encode())
    return h.hexdigest()


def _csv_rows(records):
    for r in records:
        for key, val in _flatten(r["values"]):
            yield [r["experiment"], r["index"], key, json.dumps(val)]


def _flatten(d, prefix=""):
    if isinstance(d, dict):
        for k, v in d.items():
            yield from _flatten(v, f"{prefix}{k}.")
    else:
        yield prefix[:-1], d


def _write(records, ndjson_path, csv_path, stream):
    stamp = datetime.now(timezone.utc).isoformat()
    lines = [json.dumps({**r, "timestamp": stamp}, sort_keys=True) for r in records]
    text = "\n".join(lines) + "\n"
    if ndjson_path:
        with open(ndjson_path, "w") as fh:
            fh.write(text)
    else:
        stream.write(text)
    if csv_path:
        with open(csv_path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["experiment", "index", "key", "value"])
            w.writerows(_csv_rows(records))


def _read_config(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read config: {e}") from None


def cmd_run(args, out, err) -> int:
    try:
        if args.all:
            config = {"experiment": "all"}
        elif args.config:
            config = _read_config(args.config)
        else:
            raise ConfigError("give --config or --all")
        jobs = validate_config(config)
    except ConfigError as e:
        err.write(f"invalid config: {e}\n")
        return EXIT_INVALID
    seed = args.seed if args.seed is not None else config.get("seed", DEFAULT_SEED)
    try:
        records = run_jobs(jobs, seed, args.jobs)
    except CapacityError as e:
        err.write(f"size cap: {e}\n")
        return EXIT_CAP
    except (ValueError, KeyError) as e:
        err.write(f"invalid parameters: {e}\n")
        return EXIT_INVALID
    except (ArithmeticError, RuntimeError, np.linalg.LinAlgError) as e:
        err.write(f"numerical failure: {e}\n")
        return EXIT_NUMERIC
    output = args.output or config.get("output")
    _write(records, output, args.csv or config.get("csv"), out)
    if output and args.json:
        out.write(json.dumps({"records": len(records), "digest": records_digest(records)}) + "\n")
    return EXIT_OK


def cmd_list(args, out, err) -> int:
    cat = catalog()
    if args.json:
        out.write(json.dumps(cat, indent=2) + "\n")
    else:
        for e in cat:
            out.write(f"{e['name']:<18} {e['anchor']}\n")
    return EXIT_OK


def cmd_validate(args, out, err) -> int:
    try:
        jobs = validate_config(_read_config(args.config))
    except ConfigError as e:
        err.write(f"invalid config: {e}\n")
        return EXIT_INVALID
    out.write(json.dumps({"valid": True, "jobs": jobs}, sort_keys=True) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="holospt", description="mixed-state SPT duality experiments")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run experiments from a JSON config")
    r.add_argument("--config")
    r.add_argument("--all", action="store_true", help="run the full catalog with defaults")
    r.add_argument("--json", action="store_true", help="print a summary line as JSON")
    r.add_argument("--seed", type=int)
    r.add_argument("--jobs", type=int, default=1)
    r.add_argument("--output", help="NDJSON path (stdout if omitted)")
    r.add_argument("--csv", help="CSV summary path")
    ls = sub.add_parser("list", help="list experiments")
    ls.add_argument("--json", action="store_true")
    v = sub.add_parser("validate", help="check a config without running it")
    v.add_argument("--config", required=True)
    return p


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return EXIT_INVALID if e.code else EXIT_OK
    if args.command == "run" and args.seed is not None and not 0 <= args.seed < 2 ** 64:
        err.write("invalid config: seed must be an unsigned 64-bit integer\n")
        return EXIT_INVALID
    return {"run": cmd_run, "list": cmd_list, "validate": cmd_validate}[args.command](args, out, err)


if __name__ == "__main__":
    sys.exit(main())
