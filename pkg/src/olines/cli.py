"""Command-line interface: generate, analyse and verify configurations.

Exit codes: 0 pass (or plain success), 1 genuine failure, 2 inapplicable,
3 usage or parse error, 4 unknown (a search or iteration budget ran out).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

from . import __version__
from .configgen import ConfigParseError, ConfigRecipe, build, load, serialize
from .depmat import dump, full_dep_matrix, parse_dump
from .exactgeom import enumerate_lines
from .latin import check_triple_system, diagonal_square, skew_diagonal_square, triple_system
from .linalg import bareiss_rank
from .scalerank import C0, NonConvergence, gram_summary, l2_scale, snapped_rank
from .verify import CHECKS

EXIT_PASS, EXIT_FAIL, EXIT_INAPPLICABLE, EXIT_USAGE, EXIT_UNKNOWN = 0, 1, 2, 3, 4
_VERDICT_EXIT = {"pass": EXIT_PASS, "fail": EXIT_FAIL, "inapplicable": EXIT_INAPPLICABLE, "unknown": EXIT_UNKNOWN}


@dataclass
class RunManifest:
    command: str
    inputs: dict
    seed: int
    arithmetic: str = "exact"
    epsilon: float | None = None
    budgets: dict = field(default_factory=dict)
    outputs: list = field(default_factory=list)
    version: str = __version__


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# --------------------------------------------------------------------------
# deterministic JSON


def _encode(o, level=0):
    pad = "  " * (level + 1)
    if isinstance(o, bool) or o is None:
        return json.dumps(o)
    if isinstance(o, float):
        if math.isfinite(o):
            return format(o, ".17g")
        return json.dumps(str(o))
    if isinstance(o, int):
        return str(o)
    if isinstance(o, Fraction):
        return json.dumps(str(o))
    if isinstance(o, str):
        return json.dumps(o)
    if isinstance(o, dict):
        if not o:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, level + 1)}" for k, v in sorted(o.items(), key=lambda kv: str(kv[0]))]
        return "{\n" + ",\n".join(items) + "\n" + "  " * level + "}"
    if isinstance(o, (list, tuple)):
        if not o:
            return "[]"
        if all(isinstance(x, (int, float, str, bool)) or x is None for x in o):
            return "[" + ", ".join(_encode(x) for x in o) + "]"
        return "[\n" + ",\n".join(pad + _encode(x, level + 1) for x in o) + "\n" + "  " * level + "]"
    if hasattr(o, "item"):  # numpy scalar
        return _encode(o.item(), level)
    raise TypeError(f"cannot encode {type(o).__name__}")


def dumps(obj) -> str:
    """JSON with sorted keys and floats at 17 significant digits."""
    return _encode(obj) + "\n"


# --------------------------------------------------------------------------
# helpers


def fixtures_dir() -> Path:
    env = os.environ.get("OLINES_FIXTURES")
    if env:
        return Path(env)
    return Path(str(resources.files("olines") / "fixtures"))


def resolve(path: str) -> Path:
    """A path as given, or else the file of that name in the fixture directory."""
    p = Path(path)
    if p.exists():
        return p
    q = fixtures_dir() / path
    if q.exists():
        return q
    raise UsageError(f"no such file: {path}")


def _load_config(path):
    return load(resolve(path))


def _manifest(args, inputs, **extra) -> RunManifest:
    budgets = {"budget_cols": args.budget_cols, "retries": args.retries, "threads": args.threads}
    return RunManifest(args.command, inputs, args.seed, budgets=budgets, **extra)


def _emit(args, report: dict, manifest: RunManifest, text: str):
    report = dict(report, manifest=asdict(manifest))
    out = dumps(report) if args.format == "json" else text.rstrip("\n") + "\n"
    sys.stdout.write(out)


def _profile_text(inc) -> str:
    prof = dict(inc.t_profile)
    prof.setdefault(2, 0)
    return " ".join(f"t{r}={t}" for r, t in sorted(prof.items()))


# --------------------------------------------------------------------------
# commands


def cmd_gen(args) -> int:
    recipe = ConfigRecipe(args.kind, args.k, args.n, args.d, args.seed)
    try:
        cfg = build(recipe)
    except ValueError as e:
        raise UsageError(str(e)) from None
    text = serialize(cfg)
    outputs = []
    if args.out:
        Path(args.out).write_text(text)
        outputs.append(args.out)
    man = _manifest(args, {"recipe": recipe.as_dict()}, outputs=outputs)
    if not args.out and args.format == "text":
        sys.stdout.write(text)
        return EXIT_PASS
    rep = {"n": cfg.n, "d": cfg.dim, "field": cfg.field_name}
    if not args.out:
        rep["config"] = text
    _emit(args, rep, man, f"n={cfg.n} d={cfg.dim}")
    return EXIT_PASS


def cmd_stats(args) -> int:
    cfg = _load_config(args.config)
    inc = enumerate_lines(cfg, workers=args.threads)
    prof = {str(r): t for r, t in inc.t_profile.items()}
    prof.setdefault("2", 0)
    rep = {"n": cfg.n, "d": cfg.dim, "field": cfg.field_name, "t_profile": prof, "lines": len(inc.lines)}
    _emit(args, rep, _manifest(args, {"config": args.config}, arithmetic=cfg.field_name), _profile_text(inc))
    return EXIT_PASS


def cmd_depmat(args) -> int:
    cfg = _load_config(args.config)
    inc = enumerate_lines(cfg, workers=args.threads)
    A = full_dep_matrix(cfg, args.construction, seed=args.seed, retries=args.retries, inc=inc)
    outputs = []
    if args.out:
        Path(args.out).write_text(dump(A))
        outputs.append(args.out)
    frac = A.certified_fraction()
    shortfall = any(b.shortfall for b in A.blocks)
    rep = {
        "m": A.m, "n": A.n, "construction": A.construction,
        "expected_m": cfg.n * cfg.n - cfg.n - 2 * inc.t2,
        "annihilates": A.annihilates(cfg),
        "certified_fraction": None if frac is None else str(frac),
        "shortfall": shortfall,
    }
    if not args.out:
        rep["matrix"] = dump(A)
    man = _manifest(args, {"config": args.config, "construction": args.construction},
                    arithmetic=cfg.field_name, outputs=outputs)
    text = f"m={A.m} n={A.n} certified={rep['certified_fraction']}"
    if not args.out and args.format == "text":
        text = dump(A) + text
    _emit(args, rep, man, text)
    return EXIT_UNKNOWN if shortfall else EXIT_PASS


def cmd_scale(args) -> int:
    A = parse_dump(resolve(args.matrix).read_text())
    man = _manifest(args, {"matrix": args.matrix, "max_iters": args.max_iters}, arithmetic="float64", epsilon=args.epsilon)
    try:
        scaled, res = l2_scale(A, args.epsilon, args.max_iters)
    except NonConvergence as e:
        rep = {"scaling": e.result.as_dict(), "converged": False}
        _emit(args, rep, man, f"did not converge: {e}")
        return EXIT_UNKNOWN
    summary = gram_summary(scaled)
    rep = {"scaling": res.as_dict(), "gram": summary.as_dict(), "m": A.m, "n": A.n}
    if not args.no_exact:
        rep["rank_exact"] = bareiss_rank(A.dense())
        rep["rank_snapped"] = snapped_rank(A, res)
    text = (f"iterations={res.iterations} min_col={res.min_col_sum!r} max_row={res.max_row_sum!r} "
            f"rank_bound={float(summary.rank_bound):.6f}")
    if "rank_exact" in rep:
        text += f" rank={rep['rank_exact']}"
    _emit(args, rep, man, text)
    return EXIT_PASS


def _check_kwargs(args, statement):
    kw = {}
    if statement in ("dichotomy", "propS_bound"):
        kw.update(budget=args.budget_cols, seed=args.seed)
    if statement == "dichotomy":
        if args.b_star is None:
            raise UsageError("dichotomy needs --b-star")
        kw["b_star"] = Fraction(args.b_star)
    if statement == "removal":
        if args.point is None:
            raise UsageError("removal needs --point")
        kw["i"] = args.point
    if statement == "main":
        kw["c_min"] = Fraction(args.c_min)
    if statement == "prune":
        kw["floor"] = args.floor
        kw["c1"] = Fraction(args.c1) if args.c1 is not None else Fraction(args.c0) / 8
    return kw


def cmd_verify(args) -> int:
    if args.statement not in CHECKS:
        raise UsageError(f"unknown statement {args.statement!r}; choose from {', '.join(CHECKS)}")
    cfg = _load_config(args.config)
    kw = _check_kwargs(args, args.statement)
    if args.statement != "prune":
        kw["inc"] = enumerate_lines(cfg, workers=args.threads)
    rep = CHECKS[args.statement](cfg, **kw)
    d = rep.as_dict()
    man = _manifest(args, {"statement": args.statement, "config": args.config,
                           **{k: str(v) for k, v in kw.items() if k != "inc"}}, arithmetic=cfg.field_name)
    text = f"{rep.statement}: {rep.verdict}"
    if rep.applicable:
        text += f" (observed {d['observed']}, claimed {d['claimed']}, margin {rep.margin})"
    else:
        failed = [n for n, ok, _ in rep.hypotheses if not ok]
        if failed:
            text += f" (hypothesis failed: {', '.join(failed)})"
    _emit(args, d, man, text)
    return _VERDICT_EXIT[rep.verdict]


def cmd_latin(args) -> int:
    r = args.r
    if r < 3:
        raise UsageError("order must be at least 3")
    L = diagonal_square(r) if r == 3 else skew_diagonal_square(r, seed=args.seed)
    T = triple_system(r, seed=args.seed)
    bad = check_triple_system(T)
    rep = {"order": r, "square": L.rows(), "triples": len(T), "violations": bad}
    _emit(args, rep, _manifest(args, {"r": r}), L.grid())
    return EXIT_FAIL if bad else EXIT_PASS


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--epsilon", type=float, default=1e-6)
    common.add_argument("--threads", type=int, default=1, help="cap on worker processes")
    common.add_argument("--format", choices=("json", "text"), default="text")
    common.add_argument("--budget-cols", type=int, default=24, help="largest column count searched exhaustively for Property-S")
    common.add_argument("--c0", default=str(C0))
    common.add_argument("--c1", default=None, help="fallback constant in the plane prune (default c0/8)")
    common.add_argument("--retries", type=int, default=64, help="reseeds allowed per line in the v2 construction")

    p = _Parser(prog="olines", description="Ordinary lines of point configurations in C^d.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", parents=[common], help="generate a configuration file")
    g.add_argument("kind", help="fermat, fermat-apex, hesse, coplanar_plus or random")
    g.add_argument("--k", type=int)
    g.add_argument("--n", type=int)
    g.add_argument("--d", type=int)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("stats", parents=[common], help="t-profile of a configuration")
    s.add_argument("config")
    s.set_defaults(func=cmd_stats)

    m = sub.add_parser("depmat", parents=[common], help="dependency matrix of a configuration")
    m.add_argument("config")
    m.add_argument("--construction", choices=("v1", "v2"), default="v1")
    m.add_argument("--out")
    m.set_defaults(func=cmd_depmat)

    c = sub.add_parser("scale", parents=[common], help="l2 scaling of a dumped matrix")
    c.add_argument("matrix")
    c.add_argument("--max-iters", type=int, default=100_000)
    c.add_argument("--no-exact", action="store_true", help="skip the exact rank computations")
    c.set_defaults(func=cmd_scale)

    v = sub.add_parser("verify", parents=[common], help="check a statement on a configuration")
    v.add_argument("statement", help=", ".join(CHECKS))
    v.add_argument("config")
    v.add_argument("--b-star")
    v.add_argument("--point", type=int)
    v.add_argument("--c-min", default="0")
    v.add_argument("--floor", choices=("plane", "3-flat"), default="3-flat")
    v.set_defaults(func=cmd_verify)

    lt = sub.add_parser("latin", parents=[common], help="diagonal Latin square and triple system")
    lt.add_argument("r", type=int)
    lt.set_defaults(func=cmd_latin)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:  # usage errors, --help and --version
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except ConfigParseError as e:
        print(f"olines: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, ValueError, OSError) as e:
        print(f"olines: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
