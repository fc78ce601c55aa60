"""Batch runner: ``rcip run <config-file> [--out PATH] [--threads N]``.

The config file is flat ``key = value`` text with ``#`` comments.  Complex
values are written ``re,im`` (a lone number means zero imaginary part);
``n_sub`` and ``k`` accept comma lists and ``n_sub`` also ``start:stop:step``
(inclusive stop).
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation

import numpy as np

PROBLEMS = ("laplace-circle", "laplace-corner", "bgkw")
INITIALIZERS = ("plain", "fixed-point")
KNOWN_KEYS = {"problem", "alpha", "lambda", "theta", "npan", "n_sub", "initializer",
              "k", "output", "reference", "reference_n_sub"}


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    problem: str
    alpha: complex = 0.5
    lam: complex = 0.5
    theta: float = np.pi / 2
    npan: int = 10
    n_sub: list = field(default_factory=lambda: [60])
    initializer: str = "fixed-point"
    k: list = field(default_factory=list)
    output: str | None = None
    reference: complex | None = None
    reference_n_sub: int = 500


def _real(text, key):
    try:
        return float(Decimal(text.strip()))
    except (InvalidOperation, ValueError):
        raise ConfigError(f"{key}: not a decimal number: {text!r}") from None


def _int(text, key):
    try:
        return int(text.strip())
    except ValueError:
        raise ConfigError(f"{key}: not an integer: {text!r}") from None


def _complex(text, key):
    parts = text.split(",")
    if len(parts) == 1:
        return complex(_real(parts[0], key), 0.0)
    if len(parts) == 2:
        return complex(_real(parts[0], key), _real(parts[1], key))
    raise ConfigError(f"{key}: expected 're' or 're,im', got {text!r}")


def _int_list(text, key):
    text = text.strip()
    if not text:
        return []
    if ":" in text:
        parts = [_int(p, key) for p in text.split(":")]
        if len(parts) != 3 or parts[2] <= 0:
            raise ConfigError(f"{key}: expected start:stop:step with step > 0")
        return list(range(parts[0], parts[1] + 1, parts[2]))
    return [_int(p, key) for p in text.split(",") if p.strip()]


def parse_config(text):
    """Parse config text into an :class:`ExperimentConfig`; raises ``ConfigError``."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value
    if "problem" not in raw:
        raise ConfigError("missing key 'problem'")
    if raw["problem"] not in PROBLEMS:
        raise ConfigError(f"problem must be one of {', '.join(PROBLEMS)}")
    cfg = ExperimentConfig(raw["problem"])
    if "alpha" in raw:
        cfg.alpha = _complex(raw["alpha"], "alpha")
    if "lambda" in raw:
        cfg.lam = _complex(raw["lambda"], "lambda")
    if "theta" in raw:
        cfg.theta = _real(raw["theta"], "theta")
    if cfg.problem == "laplace-circle":
        if "theta" in raw and abs(cfg.theta - np.pi) > 1e-12:
            raise ConfigError("laplace-circle requires theta = pi")
        cfg.theta = np.pi
    if "npan" in raw:
        cfg.npan = _int(raw["npan"], "npan")
    if cfg.problem == "bgkw":
        cfg.npan = 4 if "npan" not in raw else cfg.npan
        cfg.n_sub = [41]
    if "n_sub" in raw:
        cfg.n_sub = _int_list(raw["n_sub"], "n_sub")
        if not cfg.n_sub:
            raise ConfigError("n_sub: empty sweep")
        if min(cfg.n_sub) < 1:
            raise ConfigError("n_sub: values must be positive")
    if "initializer" in raw:
        if raw["initializer"] not in INITIALIZERS:
            raise ConfigError(f"initializer must be one of {', '.join(INITIALIZERS)}")
        cfg.initializer = raw["initializer"]
    if "k" in raw:
        cfg.k = [_real(p, "k") for p in raw["k"].split(",") if p.strip()]
        if any(v <= 0 for v in cfg.k):
            raise ConfigError("k: values must be positive")
    if cfg.problem == "bgkw" and not cfg.k:
        raise ConfigError("bgkw needs a nonempty k list")
    if "output" in raw:
        cfg.output = raw["output"]
    if "reference" in raw:
        cfg.reference = _complex(raw["reference"], "reference")
    if "reference_n_sub" in raw:
        cfg.reference_n_sub = _int(raw["reference_n_sub"], "reference_n_sub")
    return cfg


def _num(v):
    return "" if v is None else f"{float(v):.15e}"


def _map(fn, items, threads):
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


def _laplace_case(cfg):
    from .geometry import contour_one_corner
    from .models import circle_exact_q, laplace_dlp_kernel, rhs_circle, rhs_one_corner
    contour = contour_one_corner(cfg.theta)
    kernel = laplace_dlp_kernel(cfg.lam)
    if cfg.problem == "laplace-circle":
        return contour, kernel, rhs_circle(cfg.alpha), circle_exact_q(cfg.alpha, cfg.lam)
    return contour, kernel, rhs_one_corner(cfg.alpha), None


def run_convergence_sweep(cfg, threads=1):
    """Rows ``(n_sub, q_coa, q_fin, rel_err)`` with complex values split in two columns.

    Returns ``(header, rows, failures)``; a failed ``n_sub`` yields a row
    with blank values.
    """
    from .solver import solve_laplace
    if not cfg.n_sub:
        raise ConfigError("n_sub: empty sweep")
    contour, kernel, rhs, q_ref = _laplace_case(cfg)
    if q_ref is None:
        q_ref = cfg.reference
    if q_ref is None:
        q_ref = solve_laplace(contour, kernel, rhs, cfg.npan, cfg.reference_n_sub,
                              cfg.initializer).result.q

    def one(ns):
        try:
            run = solve_laplace(contour, kernel, rhs, cfg.npan, ns, cfg.initializer,
                                reconstruct=True)
        except Exception as exc:  # reported per row
            return ns, None, None, exc
        return ns, run.result.q, run.q_fin, None

    header = ["n_sub", "re_q_coa", "im_q_coa", "re_q_fin", "im_q_fin", "rel_err"]
    rows, failures = [], []
    for ns, qc, qf, exc in _map(one, cfg.n_sub, threads):
        if exc is not None:
            failures.append((ns, exc))
            rows.append([str(ns), "", "", "", "", ""])
            continue
        err = abs(qc - q_ref) / abs(q_ref)
        rows.append([str(ns), _num(qc.real), _num(qc.imag), _num(qf.real), _num(qf.imag),
                     _num(err)])
    return header, rows, failures


def run_bgkw_table(cfg, threads=1):
    """Rows ``(k, u(0.5), Q, P_xy, gmres_iters, cpu_seconds)``; ``P_xy`` is blank."""
    from .bgkw import BgkwProblem, solve_couette
    if not cfg.k:
        raise ConfigError("bgkw needs a nonempty k list")

    def one(k):
        t0 = time.perf_counter()
        try:
            res = solve_couette(BgkwProblem(k, npan=cfg.npan, n_sub=cfg.n_sub[0]))
        except Exception as exc:
            return k, None, exc, 0.0
        return k, res, None, time.perf_counter() - t0

    header = ["k", "u_half", "Q", "P_xy", "gmres_iters", "cpu_seconds"]
    rows, failures = [], []
    for k, res, exc, dt in _map(one, cfg.k, threads):
        if exc is not None:
            failures.append((k, exc))
            rows.append([_num(k), "", "", "", "", ""])
            continue
        rows.append([_num(k), _num(res.u_at_half), _num(res.Q), "", str(res.iters),
                     f"{dt:.3f}"])
    return header, rows, failures


def to_csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _threads(arg):
    if arg is not None:
        return arg
    env = os.environ.get("RCIP_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"RCIP_THREADS is not an integer: {env!r}") from None
    return 1


def main(argv=None):
    parser = argparse.ArgumentParser(prog="rcip", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run an experiment described by a config file")
    run.add_argument("config")
    run.add_argument("--out", help="CSV output path (default: config 'output' or stdout)")
    run.add_argument("--threads", type=int, help="worker threads (default: RCIP_THREADS or 1)")
    args = parser.parse_args(argv)

    try:
        with open(args.config, encoding="utf-8") as fh:
            cfg = parse_config(fh.read())
        threads = _threads(args.threads)
    except (OSError, ConfigError) as exc:
        print(f"rcip: config error: {exc}", file=sys.stderr)
        return 1

    if cfg.problem == "bgkw":
        header, rows, failures = run_bgkw_table(cfg, threads)
    else:
        header, rows, failures = run_convergence_sweep(cfg, threads)

    text = to_csv(header, rows)
    out = args.out or cfg.output
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    for key, exc in failures:
        print(f"rcip: row {key} failed: {exc}", file=sys.stderr)
    return 2 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
