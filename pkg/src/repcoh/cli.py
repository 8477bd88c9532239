"""Command-line entry point ``repcoh``.

    repcoh family chain 4 | repcoh compute --variant G --emit json
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from dataclasses import dataclass, field

from . import __version__
from .complex import build_complex, nerve_complex, singleton_complex
from .errors import InputError, IntervalExplosion, RepcohError
from .families import family
from .homology import cocycle_representatives, cohomology_range
from .levels import Variant
from .poset import Poset, bits, composition_length, interval_cap, parse_poset, serialize_poset

BASES = ("intervals", "singletons", "nerve")
EMITS = ("table", "json", "csv")


@dataclass
class RunConfig:
    variant: Variant
    input: str = "-"                       #: poset file path, ``-`` for stdin
    family: list = field(default_factory=list)  #: e.g. ``["chain", "4"]``; overrides ``input``
    max_dim: int | None = None
    basis: str = "intervals"
    reduced: bool = False                  #: singleton basis restricted to strict chains
    emit: str = "table"
    generators: bool = False
    cap: int | None = None
    threads: int = 1


def default_threads() -> int:
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:  # pragma: no cover - non-Linux
        return os.cpu_count() or 1


def _load(cfg: RunConfig, stdin) -> Poset:
    if cfg.family:
        return family(cfg.family[0], cfg.family[1:])
    if cfg.input == "-":
        return parse_poset(stdin.read())
    try:
        with open(cfg.input, encoding="utf-8") as fh:
            return parse_poset(fh.read())
    except OSError as e:
        raise InputError(f"cannot read {cfg.input}: {e.strerror}") from None


def _complex(cfg: RunConfig, base: Poset, L: int):
    if cfg.basis == "intervals":
        return build_complex(base, cfg.variant, L, cap=cfg.cap)
    if cfg.basis == "singletons":
        if cfg.variant is not Variant.TILDE_G:
            raise InputError("the singleton basis exists only for --variant tildeG")
        return singleton_complex(base, L, reduced=cfg.reduced)
    return nerve_complex(base, L)


def _support(cx, base: Poset, n: int, k: int) -> list[list[str]]:
    """Support of basis element ``k`` at level ``n`` as chains of element names."""
    elem = cx.basis[n][k]
    if cx.meta["kind"] == "intervals":
        objects = cx.meta["levels"][n].objects
        chains = [objects[i] for i in bits(elem)]
    else:
        chains = [elem]
    return [[base.names[x] for x in c] for c in chains]


def compute(cfg: RunConfig, base: Poset) -> tuple[dict, dict]:
    """Result object and metadata for one configuration."""
    t0 = time.perf_counter()
    if cfg.max_dim is None:
        if cfg.variant.simplicial and cfg.basis != "nerve":
            raise InputError(f"--max-dim is required for --variant {cfg.variant.value}")
        L = composition_length(base)
    else:
        L = cfg.max_dim
    if L < 0:
        raise InputError("--max-dim must be non-negative")
    cx = _complex(cfg, base, L)
    groups = cohomology_range(cx, L, threads=cfg.threads)
    result = {
        "variant": cfg.variant.value,
        "base": {
            "elements": list(base.names),
            "covers": [[base.names[a], base.names[b]] for a, b in base.covers],
        },
        "max_dim": L,
        "basis": cfg.basis + ("-reduced" if cfg.basis == "singletons" and cfg.reduced else ""),
        "groups": [{"dim": g.dim, "rank": g.free_rank, "torsion": list(g.torsion)} for g in groups],
        "basis_sizes": cx.dims[:L + 1],
    }
    if cfg.generators:
        gens = []
        for n in range(L + 1):
            for vec in cocycle_representatives(cx, n).free:
                gens.append({
                    "dim": n,
                    "terms": [{"coeff": vec[k], "support": _support(cx, base, n, k)} for k in sorted(vec)],
                })
        result["generators"] = gens
    meta = {
        "version": __version__,
        "truncation_bound": L,
        "higher_groups": "zero" if cx.vanishes_above else "not computed",
        "interval_cap": interval_cap(cfg.cap),
        "threads": cfg.threads,
        "wall_time_s": round(time.perf_counter() - t0, 6),
    }
    return result, meta


def render(result: dict, meta: dict, emit: str) -> str:
    if emit == "json":
        return json.dumps({**result, "metadata": meta}, sort_keys=True, indent=2) + "\n"
    if emit == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["dim", "rank", "torsion", "basis_size"])
        for g, size in zip(result["groups"], result["basis_sizes"]):
            w.writerow([g["dim"], g["rank"], ";".join(map(str, g["torsion"])), size])
        return buf.getvalue()
    lines = [
        f"variant {result['variant']}, basis {result['basis']}, "
        f"{len(result['base']['elements'])} elements, degrees 0..{result['max_dim']}",
        f"{'n':>3}  {'basis':>8}  {'rank':>6}  group",
    ]
    for g, size in zip(result["groups"], result["basis_sizes"]):
        parts = ([f"Z^{g['rank']}" if g["rank"] != 1 else "Z"] if g["rank"] else [])
        parts += [f"Z/{t}" for t in g["torsion"]]
        lines.append(f"{g['dim']:>3}  {size:>8}  {g['rank']:>6}  {' + '.join(parts) or '0'}")
    lines.append(f"higher groups: {meta['higher_groups']}; {meta['wall_time_s']:.3f}s")
    return "\n".join(lines) + "\n"


def run(cfg: RunConfig, stdin=None, stdout=None, stderr=None) -> int:
    """Run one computation; returns the process exit code."""
    stdin, stdout, stderr = stdin or sys.stdin, stdout or sys.stdout, stderr or sys.stderr
    try:
        base = _load(cfg, stdin)
        result, meta = compute(cfg, base)
    except InputError as e:
        print(f"repcoh: {type(e).__name__}: {e}", file=stderr)
        return 2
    except IntervalExplosion as e:
        print(f"repcoh: IntervalExplosion: {e}; raise --interval-cap or REPCOH_INTERVAL_CAP", file=stderr)
        return 3
    except RepcohError as e:
        print(f"repcoh: internal error: {type(e).__name__}: {e}", file=stderr)
        return 1
    stdout.write(render(result, meta, cfg.emit))
    return 0


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="repcoh", description="Representation cohomology of finite posets.")
    ap.add_argument("--version", action="version", version=f"repcoh {__version__}")
    sub = ap.add_subparsers(dest="cmd", required=True)

    fam = sub.add_parser("family", help="write a named poset in the poset file format")
    fam.add_argument("name", help="chain, dandelion, corolla, pseudo_circle, antichain, tree")
    fam.add_argument("params", nargs="*", help="integer parameters; tree takes cover pairs a b a b ...")

    comp = sub.add_parser("compute", help="compute cohomology groups")
    comp.add_argument("--variant", required=True, type=Variant.parse, help="E, G, tildeE or tildeG")
    comp.add_argument("--input", default="-", help="poset file, '-' for stdin (default)")
    comp.add_argument("--family", nargs="+", metavar="TOKEN", help="use a named poset instead of --input")
    comp.add_argument("--max-dim", type=int, help="highest degree (default: composition length; required for tilde variants)")
    comp.add_argument("--basis", choices=BASES, default="intervals")
    comp.add_argument("--reduced", action="store_true", help="singleton basis on strict chains only")
    comp.add_argument("--emit", choices=EMITS, default="table")
    comp.add_argument("--generators", action="store_true", help="include cocycle representatives (json)")
    comp.add_argument("--interval-cap", type=int, help="abort above this many intervals per level")
    comp.add_argument("--threads", type=int, default=None, help="worker processes for matrix reduction")
    return ap


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.cmd == "family":
        try:
            p = family(args.name, args.params)
        except InputError as e:
            print(f"repcoh: {type(e).__name__}: {e}", file=sys.stderr)
            return 2
        sys.stdout.write(serialize_poset(p))
        return 0
    if args.interval_cap is not None and args.interval_cap < 1:
        print("repcoh: --interval-cap must be at least 1", file=sys.stderr)
        return 2
    cfg = RunConfig(
        variant=args.variant, input=args.input, family=args.family or [],
        max_dim=args.max_dim, basis=args.basis, reduced=args.reduced, emit=args.emit,
        generators=args.generators, cap=args.interval_cap,
        threads=max(1, args.threads if args.threads is not None else default_threads()),
    )
    return run(cfg)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
