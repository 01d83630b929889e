"""Command-line front end: ``extremalk <command> [options]``.

Options can also come from a config file of ``key=value`` lines (``--config``
or the ``EXTREMALK_CONFIG`` environment variable); flags given on the command
line win. Exit status is 0 on success and 2 on any usage or validation error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import secrets
import sys
from typing import Callable, Sequence

import numpy as np

from .distributions import catalog, get_distribution
from .norming import CLOSED_FORM, QUANTILE, NormingSequence
from .ordering import check_ordering, CLAIMS
from .simulation import SIZE_LAWS, convergence_study
from .transforms import (
    FAMILIES,
    LIMIT_FAMILIES,
    TailTransform,
    TauSpec,
    empirical_tail_ratio,
    limit_law_cdf,
    tail_equivalence_constant,
    transform_cdf,
    transform_pdf,
    transform_quantile,
    transform_sf,
)

DEFAULT_SEED = 0x5EED0
CONFIG_ENV = "EXTREMALK_CONFIG"


class UsageError(ValueError):
    pass


def _seed(text: str) -> int:
    if text == "random":
        return secrets.randbits(63)
    try:
        v = int(text, 0)
    except ValueError:
        raise UsageError(f"bad seed {text!r}: expected an integer, hex literal or 'random'") from None
    if not 0 <= v < 2**64:
        raise UsageError("seed must fit in 64 bits")
    return v


def _ints(text: str) -> list[int]:
    try:
        return [int(float(s)) if "e" in s.lower() else int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"bad integer list {text!r}") from None


def _floats(text: str) -> list[float]:
    try:
        return [float(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"bad number list {text!r}") from None


def _int(text: str) -> int:
    return _ints(text)[0] if text.strip() else 0


def _float(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise UsageError(f"bad number {text!r}") from None


# name -> (parser, default, help); every option may also appear in a config file
OPTIONS: dict[str, tuple[Callable, object, str]] = {
    "family": (str, None, "derived family (hk fk uk rk tk bk) or limit family (gk jk lk sk bn)"),
    "base": (str, "exponential", "base distribution name (see `catalog`)"),
    "alpha": (_float, None, "base shape alpha"),
    "beta": (_float, None, "base shape beta"),
    "c": (_float, None, "Pareto scale c"),
    "k": (_int, 1, "order k (for `order`: largest k checked)"),
    "r": (_int, 1, "negative-binomial shape r (for `order`: largest r checked)"),
    "tau": (TauSpec.parse, None, "finite tau law as value:prob pairs, e.g. 1:0.5,2:0.5"),
    "size-law": (str, "fixed", f"sample-size law: {', '.join(SIZE_LAWS)}"),
    "m": (_int, None, "shift m of the sample-size law (default k)"),
    "n": (_int, None, "single index n"),
    "n-grid": (_ints, None, "comma-separated indices n"),
    "M": (_int, 200_000, "Monte Carlo replicates"),
    "seed": (_seed, DEFAULT_SEED, f"64-bit seed, default {DEFAULT_SEED:#x}; 'random' draws one"),
    "workers": (_int, 1, "worker threads for `simulate`"),
    "x": (_floats, None, "comma-separated evaluation points"),
    "p": (_floats, None, "comma-separated probabilities"),
    "grid": (_int, 1000, "grid size for `order`"),
    "mode": (str, QUANTILE, f"norming recipe: {QUANTILE} or {CLOSED_FORM}"),
    "output": (str, "csv", "csv or json"),
    "out": (str, None, "write the report here instead of stdout"),
}

COMMANDS = {
    "eval": "evaluate cdf, survival and density of a family at points",
    "norming": "print norming constants (n, a_n, b_n)",
    "simulate": "Monte Carlo KS distance to the predicted limit law",
    "tails": "empirical tail ratios against the tail-equivalence constant",
    "order": "check the pointwise orderings between families",
    "catalog": "list the base distributions",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="extremalk",
        description="Limit laws of k-th upper order statistics under random sample sizes.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    for name, help_text in COMMANDS.items():
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("--config", default=None, help=f"key=value config file (env {CONFIG_ENV})")
        for opt, (_, default, h) in OPTIONS.items():
            shown = f" (default: {default:#x})" if opt == "seed" else (
                f" (default: {default})" if default is not None else ""
            )
            p.add_argument(f"--{opt}", dest=opt.replace("-", "_"), default=None, help=h + shown)
    return parser


def read_config(path: str) -> dict[str, str]:
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    for num, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{num}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lstrip("-").replace("_", "-")
        if key not in OPTIONS:
            raise UsageError(f"{path}:{num}: unknown key {key!r}")
        out[key] = value
    return out


def resolve(ns: argparse.Namespace, env: dict[str, str]) -> dict[str, object]:
    """Merge defaults, config file and flags (in increasing priority)."""
    path = ns.config or env.get(CONFIG_ENV)
    file_vals = read_config(path) if path else {}
    cfg: dict[str, object] = {"command": ns.command}
    for opt, (conv, default, _) in OPTIONS.items():
        raw = getattr(ns, opt.replace("-", "_"))
        if raw is None:
            raw = file_vals.get(opt)
        cfg[opt] = default if raw is None else conv(raw)
    if cfg["output"] not in ("csv", "json"):
        raise UsageError("--output must be csv or json")
    return cfg


def make_base(cfg):
    params = {name: cfg[name] for name in ("alpha", "beta", "c") if cfg[name] is not None}
    return get_distribution(cfg["base"], **params)


def make_transform(cfg, family: str | None = None) -> TailTransform:
    fam = family or cfg["family"]
    if fam is None:
        raise UsageError("--family is required")
    return TailTransform(
        fam,
        cfg["k"],
        cfg["r"] if fam == "tk" else 1,
        cfg["tau"] if fam == "bk" else None,
    )


def _n_grid(cfg) -> list[int]:
    if cfg["n-grid"]:
        return cfg["n-grid"]
    if cfg["n"] is not None:
        return [cfg["n"]]
    raise UsageError("give --n or --n-grid")


# ---------------------------------------------------------------------------
# commands; each returns a list of row dicts
# ---------------------------------------------------------------------------


def cmd_eval(cfg):
    base = make_base(cfg)
    fam = cfg["family"]
    if fam in LIMIT_FAMILIES:
        if base.mda is None:
            raise UsageError(f"{base.name} has no domain of attraction")
        if cfg["x"] is None:
            raise UsageError("limit families need --x")
        xs = np.asarray(cfg["x"])
        cdf = np.atleast_1d(limit_law_cdf(fam, base.mda, cfg["k"], xs, r=cfg["r"], tau=cfg["tau"]))
        return [{"family": fam, "law": str(base.mda), "k": cfg["k"], "x": float(x), "cdf": float(c)}
                for x, c in zip(xs, cdf)]
    t = make_transform(cfg)
    if cfg["x"] is not None:
        xs = np.asarray(cfg["x"], dtype=float)
    elif cfg["p"] is not None:
        xs = np.atleast_1d(transform_quantile(t, base, cfg["p"]))
    else:
        raise UsageError("give --x or --p")
    cdf = np.atleast_1d(transform_cdf(t, base, xs))
    sf = np.atleast_1d(transform_sf(t, base, xs))
    pdf = np.atleast_1d(transform_pdf(t, base, xs))
    return [
        {"family": str(t), "base": repr(base), "x": float(x), "cdf": float(c), "sf": float(s), "pdf": float(d)}
        for x, c, s, d in zip(xs, cdf, sf, pdf)
    ]


def cmd_norming(cfg):
    base = make_base(cfg)
    t = make_transform(cfg) if cfg["family"] not in (None, "base") else None
    seq = NormingSequence(base, t, cfg["mode"])
    rows = []
    for n in _n_grid(cfg):
        a, b = seq(n)
        rows.append({"n": n, "a_n": a, "b_n": b, "family": str(t) if t else "base", "mode": cfg["mode"]})
    return rows


def cmd_simulate(cfg):
    base = make_base(cfg)
    law = cfg["size-law"]
    kw = {"r": cfg["r"]}
    if cfg["m"] is not None:
        kw["m"] = cfg["m"]
    if law not in SIZE_LAWS:
        raise UsageError(f"unknown size law {law!r}; choose from {', '.join(SIZE_LAWS)}")
    if law == "tau" and cfg["tau"] is None:
        raise UsageError("size law 'tau' needs --tau")
    rows = convergence_study(
        base, law, cfg["k"], _n_grid(cfg), cfg["M"], cfg["seed"], cfg["workers"], tau=cfg["tau"], **kw
    )
    return [
        {"n": r.n, "M": r.M, "ks": r.ks, "seed": r.seed, "wall_time_s": round(r.wall_time, 3)}
        for r in rows
    ]


def cmd_tails(cfg):
    base = make_base(cfg)
    families = [cfg["family"]] if cfg["family"] else list(FAMILIES)
    ps = cfg["p"] or [1 - 1e-4, 1 - 1e-5, 1 - 1e-6]
    rows = []
    for fam in families:
        t = make_transform(cfg, fam)
        c = tail_equivalence_constant(t)
        for p in ps:
            ratio = empirical_tail_ratio(t, base, p)
            rows.append({"family": str(t), "base": repr(base), "p": p, "ratio": ratio,
                         "constant": c, "rel_error": ratio / c - 1.0})
    return rows


def cmd_order(cfg):
    base = make_base(cfg)
    rows = []
    for claim in CLAIMS:
        for k in range(1, cfg["k"] + 1):
            for r in range(1, cfg["r"] + 1):
                c = check_ordering(claim, base, k, r, cfg["grid"])
                rows.append({"claim_id": claim, "base": repr(base), "k": k, "r": r,
                             "max_violation": c.max_violation, "pass": c.passed})
    return rows


def cmd_catalog(cfg):
    return [
        {"name": e.name,
         "parameters": ";".join(f"{k}={v:g}" for k, v in e.parameters.items()),
         "mda": str(e.distribution.mda),
         "support": f"[{e.distribution.left:g}, {e.distribution.right:g}]"}
        for e in catalog()
    ]


HANDLERS = {
    "eval": cmd_eval,
    "norming": cmd_norming,
    "simulate": cmd_simulate,
    "tails": cmd_tails,
    "order": cmd_order,
    "catalog": cmd_catalog,
}


def _fmt(v):
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else str(v)
    return v


def render(rows: list[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(rows, indent=2) + "\n"
    buf = io.StringIO()
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({k: _fmt(v) for k, v in row.items()})
    return buf.getvalue()


def run(argv: Sequence[str] | None = None, env: dict[str, str] | None = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = resolve(ns, dict(os.environ) if env is None else env)
        text = render(HANDLERS[cfg["command"]](cfg), cfg["output"])
    except ValueError as exc:
        print(f"extremalk {ns.command}: error: {exc}", file=sys.stderr)
        return 2
    if cfg["out"]:
        try:
            with open(cfg["out"], "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"extremalk {ns.command}: error: cannot write {cfg['out']}: {exc.strerror}", file=sys.stderr)
            return 2
    else:
        stdout.write(text)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
