"""Command-line harness: run verification suites over parameter ranges and
write a text or JSON report.

    sl2dyadic --e 1 --eisenstein " -2,1" --suite duality --n 1 --m 0 --l 0
    sl2dyadic --e 2 --eisenstein "-2,0,1" --suite all --n 1..2 --m 0..2
    sl2dyadic --config run.cfg --format json --output report.json

A config file holds ``key = value`` lines with the flag names as keys;
flags given on the command line win.  ``SL2DYADIC_WORKERS`` caps the
worker count.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from importlib import metadata

from .errors import ConfigError, DyadicError
from .padic import FieldSpec, make_field, n_min
from .report import FAIL, OUTSIDE, PASS, CheckReport

SCHEMA_VERSION = 1
SUITES = ("normality", "pairing", "theta", "duality", "projline", "equivariance")
WORKERS_ENV = "SL2DYADIC_WORKERS"
DEFAULT_EISENSTEIN = {1: (-2, 1), 2: (-2, 0, 1)}


@dataclass
class RunConfig:
    e: int = 1
    eisenstein: tuple = (-2, 1)
    n: tuple = (1,)
    m: tuple = (0,)
    l: tuple | None = None  # None: l follows m
    precision: int | None = None
    mode: str = "exhaustive"
    seed: int = 0
    samples: int = 1000
    suites: tuple = ()
    format: str = "text"
    output: str | None = None
    workers: int = 1
    timing: bool = False

    def tuples(self) -> list[tuple]:
        out = []
        for n in self.n:
            for m in self.m:
                for l in (self.l if self.l is not None else (m,)):
                    out.append((n, m, l))
        return out

    def field_spec(self) -> FieldSpec:
        N = max([n_min(n, m, l, self.e) for n, m, l in self.tuples()] + [self.e + 1])
        if self.precision is not None:
            N = max(N, self.precision)
        return make_field(self.e, self.eisenstein, N)

    def echo(self) -> dict:
        d = asdict(self)
        d.pop("output")
        d.pop("workers")
        return {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}


# -- parsing --------------------------------------------------------------------------

def parse_range(text: str, name: str) -> tuple:
    """``"1"``, ``"0..2"`` or ``"-1,0,1"``."""
    text = text.strip()
    try:
        if ".." in text:
            lo, hi = (int(t) for t in text.split(".."))
            if hi < lo:
                raise ValueError
            return tuple(range(lo, hi + 1))
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise ConfigError(f"{name}: cannot read {text!r} as an integer range") from None


def parse_coefficients(text: str) -> tuple:
    try:
        return tuple(int(t) for t in text.strip().split(","))
    except ValueError:
        raise ConfigError(f"eisenstein: cannot read {text!r} as comma-separated integers") from None


def read_config_file(path: str) -> dict:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            key, value = (t.strip() for t in line.split("=", 1))
            out[key.replace("-", "_")] = value.strip('"')
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sl2dyadic", description="Verify filtration-subgroup "
                                "and character-duality statements for SL_2 over 2-adic fields.")
    p.add_argument("--config", help="key = value file mirroring these flags")
    p.add_argument("--e", help="ramification index")
    p.add_argument("--eisenstein", help="coefficients, constant term first, e.g. \"-2,0,1\"")
    p.add_argument("--n", help="level range, e.g. 1..2")
    p.add_argument("--m", help="range for m")
    p.add_argument("--l", help="range for l (default: l = m)")
    p.add_argument("--precision", help="raise the working precision")
    p.add_argument("--mode", choices=("exhaustive", "sampled"))
    p.add_argument("--seed")
    p.add_argument("--samples")
    p.add_argument("--suite", action="append", dest="suite",
                   help="one of " + ", ".join(SUITES + ("all",)) + "; repeatable")
    p.add_argument("--format", choices=("text", "json"))
    p.add_argument("--output")
    p.add_argument("--workers")
    p.add_argument("--timing", action="store_true", default=None,
                   help="record wall time per suite (breaks byte-identical output)")
    return p


def _int(value, name: str) -> int:
    try:
        return int(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name}: expected an integer, got {value!r}") from None


_VALUE_FLAGS = ("--eisenstein", "--n", "--m", "--l")


def _join_negative_values(argv: list) -> list:
    """``--m -1,0`` would read as a flag; rewrite it as ``--m=-1,0``."""
    out = []
    it = iter(argv)
    for tok in it:
        if tok in _VALUE_FLAGS:
            value = next(it, None)
            out.append(tok if value is None else f"{tok}={value}")
        else:
            out.append(tok)
    return out


def parse_config(argv=None) -> RunConfig:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_join_negative_values(argv))
    raw = read_config_file(args.config) if args.config else {}
    for key, value in vars(args).items():
        if key != "config" and value is not None:
            raw[key] = value
    known = {f.name for f in fields(RunConfig)} | {"suite"}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")

    cfg = RunConfig()
    if "e" in raw:
        cfg.e = _int(raw["e"], "e")
    if cfg.e not in DEFAULT_EISENSTEIN and "eisenstein" not in raw:
        raise ConfigError(f"e: no default polynomial for e = {cfg.e}; pass --eisenstein")
    cfg.eisenstein = (parse_coefficients(raw["eisenstein"]) if "eisenstein" in raw
                      else DEFAULT_EISENSTEIN[cfg.e])
    for name in ("n", "m", "l"):
        if name in raw:
            setattr(cfg, name, parse_range(str(raw[name]), name))
    if any(n < 0 for n in cfg.n):
        raise ConfigError("n: levels must be non-negative")
    if "precision" in raw:
        cfg.precision = _int(raw["precision"], "precision")
    for name in ("seed", "samples", "workers"):
        if name in raw:
            setattr(cfg, name, _int(raw[name], name))
    if "mode" in raw:
        if raw["mode"] not in ("exhaustive", "sampled"):
            raise ConfigError(f"mode: expected exhaustive or sampled, got {raw['mode']!r}")
        cfg.mode = raw["mode"]
    if "format" in raw:
        if raw["format"] not in ("text", "json"):
            raise ConfigError(f"format: expected text or json, got {raw['format']!r}")
        cfg.format = raw["format"]
    cfg.output = raw.get("output")
    cfg.timing = str(raw.get("timing", False)).lower() in ("1", "true", "yes")
    suites = raw.get("suite", [])
    if isinstance(suites, str):
        suites = [s.strip() for s in suites.split(",") if s.strip()]
    chosen = []
    for s in suites:
        if s == "all":
            chosen.extend(SUITES)
        elif s in SUITES:
            chosen.append(s)
        else:
            raise ConfigError(f"suite: unknown suite {s!r}")
    cfg.suites = tuple(dict.fromkeys(chosen))
    validate(cfg)
    return cfg


def validate(cfg: RunConfig):
    try:
        F = cfg.field_spec()
    except DyadicError as exc:
        raise ConfigError(f"eisenstein: {exc}") from None
    if cfg.precision is not None:
        floor = max(n_min(n, m, l, cfg.e) for n, m, l in cfg.tuples())
        if cfg.precision < floor:
            raise ConfigError(f"precision: {cfg.precision} is below the required minimum {floor}")
    if "duality" in cfg.suites or "equivariance" in cfg.suites:
        for n, m, l in cfg.tuples():
            if n < 1 or not (-1 <= m <= F.e and -1 <= l <= F.e):
                raise ConfigError(
                    f"m, l: duality needs n >= 1 and -1 <= m, l <= e = {F.e}; "
                    f"(n, m, l) = ({n}, {m}, {l}) is refused")
    if cfg.workers < 1:
        raise ConfigError("workers: must be at least 1")


# -- running --------------------------------------------------------------------------

def _tasks(cfg: RunConfig) -> list[tuple]:
    tasks = []
    seen = set()

    def add(suite, params):
        if (suite, params) not in seen:
            seen.add((suite, params))
            tasks.append((suite, params))

    for suite in cfg.suites:
        for n, m, l in cfg.tuples():
            if suite == "normality" and m >= 0 and n >= 1:
                add(suite, (n, m))
            elif suite == "pairing" and n >= 1:
                add(suite, (n, m, l))
            elif suite == "theta" and n >= 1:
                add(suite, (n, m, l))
            elif suite in ("duality", "equivariance"):
                add(suite, (n, m, l))
            elif suite == "projline":
                add("stabilizer", (n,))
                add("transitivity", (n,))
                if m >= 0 and n >= 1:
                    add("trivial_action", (n, m))
                    add("conjugates", (n, m))
    return tasks


def run_task(e: int, eisenstein: tuple, N: int, suite: str, params: tuple,
             mode: str, seed: int, samples: int, precision: int | None) -> list[dict]:
    from . import characters, groups, matrices, projline

    F = make_field(e, eisenstein, N)
    sampled = mode == "sampled"
    if suite == "normality":
        reports = [groups.normality_check(F, *params, mode=mode, samples=samples, seed=seed)]
    elif suite == "pairing":
        reports = [matrices.nondegeneracy_check(F, *params, prec=precision, seed=seed),
                   matrices.closed_form_check(F, *params, samples=samples, seed=seed, prec=precision)]
    elif suite == "theta":
        n = params[0]
        exhaustive = n == 1 and not sampled
        reports = [groups.theta_hom_check(F, *params, samples=None if exhaustive else samples,
                                          seed=seed)]
    elif suite == "duality":
        reports = [characters.verify_duality(F, *params, prec=precision)]
    elif suite == "equivariance":
        reports = [characters.equivariance_check(F, *params, seed=seed)]
    elif suite == "stabilizer":
        reports = [projline.verify_stabilizer(F, *params)]
    elif suite == "transitivity":
        reports = [projline.transitivity_check(F, *params)]
    elif suite == "trivial_action":
        reports = [projline.trivial_action_check(F, *params)]
    elif suite == "conjugates":
        reports = [groups.conjugate_intersection_check(F, *params)]
    else:
        raise ConfigError(f"unknown task {suite!r}")
    return [r.to_dict() for r in reports]


def _timed(args, timing: bool) -> list[dict]:
    start = time.perf_counter()
    try:
        out = run_task(*args)
    except DyadicError as exc:
        suite, params = args[3], args[4]
        r = CheckReport(suite, {"params": list(params)}, verdict=FAIL,
                        notes=[f"{type(exc).__name__}: {exc}"])
        out = [r.to_dict()]
    if timing:
        ms = round((time.perf_counter() - start) * 1000, 1)
        for d in out:
            d["millis"] = ms
    return out


def worker_count(requested: int) -> int:
    cap = os.environ.get(WORKERS_ENV)
    if cap:
        try:
            requested = min(requested, max(1, int(cap)))
        except ValueError:
            raise ConfigError(f"{WORKERS_ENV}: expected an integer, got {cap!r}") from None
    return requested


def run_suites(cfg: RunConfig) -> dict:
    F = cfg.field_spec()
    jobs = [(cfg.e, cfg.eisenstein, F.precision, suite, params, cfg.mode, cfg.seed,
             cfg.samples, cfg.precision) for suite, params in _tasks(cfg)]
    workers = worker_count(cfg.workers)
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_timed, jobs, [cfg.timing] * len(jobs)))
    else:
        results = [_timed(job, cfg.timing) for job in jobs]
    entries = [d for chunk in results for d in chunk]
    entries.sort(key=lambda d: (d["name"], json.dumps(d["params"], sort_keys=True)))
    verdicts = [d["verdict"] for d in entries]
    report = {
        "schemaVersion": SCHEMA_VERSION,
        "library": {"name": "sl2dyadic", "version": _version()},
        "config": cfg.echo(),
        "field": str(F),
        "suites": entries,
        "summary": {"pass": verdicts.count(PASS), "fail": verdicts.count(FAIL),
                    "outside": verdicts.count(OUTSIDE)},
    }
    # tuples inside witnesses become lists, exactly as after a JSON round trip
    return json.loads(json.dumps(report))


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


def exit_code(report: dict) -> int:
    return 0 if all(d["verdict"] in (PASS, OUTSIDE) for d in report["suites"]) else 1


# -- output ---------------------------------------------------------------------------

def emit_report(report: dict, fmt: str = "json") -> bytes:
    if fmt == "json":
        return (json.dumps(report, sort_keys=True, indent=2) + "\n").encode()
    lines = [f"sl2dyadic {report['library']['version']}  field {report['field']}"]
    for d in report["suites"]:
        r = CheckReport.from_dict(d)
        extra = ", ".join(f"{k}={v}" for k, v in sorted(r.counts.items()))
        lines.append(f"{r.line():<60} {extra}")
        for w in r.witnesses:
            lines.append(f"    witness {w['check']}: {w['witness']}")
        for note in r.notes:
            lines.append(f"    note: {note}")
    s = report["summary"]
    lines.append(f"{s['pass']} passed, {s['fail']} failed, {s['outside']} outside hypothesis")
    return ("\n".join(lines) + "\n").encode()


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
    except ConfigError as exc:
        print(f"sl2dyadic: error: {exc}", file=sys.stderr)
        return 2
    report = run_suites(cfg)
    data = emit_report(report, cfg.format)
    if cfg.output:
        with open(cfg.output, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
    return exit_code(report)


if __name__ == "__main__":
    sys.exit(main())
