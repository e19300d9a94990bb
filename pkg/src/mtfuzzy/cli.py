"""Command line front end.

Subcommands: ``affinity``, ``compose``, ``closure``, ``stats``, ``bench``.
Data goes to files or stdout, diagnostics to stderr; the exit status is 0
exactly when no error was reported.
"""
import argparse
import csv
import io
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields

from ._validation import check_engine
from .dense import DenseRelation, dense_memory_bytes, dense_mmc, floyd_warshall_closure
from .exceptions import MTFuzzyError, ParseError, UsageError
from .fmtr import format_fmtr, read_fmtr
from .image import affinity_entries, compute_delta, read_image
from .membership import PRECISIONS
from .mtbdd import NodeTable
from .relation import NODE_BYTES, from_entries, mmc, relation_stats, transitive_closure

DEFAULT_MAX_DENSE = 4096
IMAGE_SUFFIXES = (".ppm", ".pgm", ".pnm")


@dataclass
class RunReport:
    input: str
    engine: str
    op: str
    precision: int
    seconds: float
    entries: int
    nodes: object = None
    terminals: object = None
    kb: int = 0
    iterations: object = None

    def line(self):
        return " ".join(f"{k}={v}" for k, v in zip(CSV_HEADER, self.row()))

    def row(self):
        d = asdict(self)
        d["seconds"] = f"{self.seconds:.6f}"
        return ["" if d[f.name] is None else str(d[f.name]) for f in fields(self)]


CSV_HEADER = [f.name for f in fields(RunReport)]


def _mtbdd_report(name, op, rel, seconds, iterations=None):
    st = relation_stats(rel)
    return RunReport(name, "mtbdd", op, rel.precision, seconds, rel.n * rel.n, st.nodes,
                     len(st.terminals), st.estimated_bytes // 1000, iterations)


def _dense_report(name, op, rel, seconds):
    return RunReport(name, "dense", op, rel.precision, seconds, rel.n * rel.n,
                     kb=dense_memory_bytes(rel.n) // 1000)


def _load(entries, engine, max_dense, table=None):
    if engine == "dense":
        if entries.n > max_dense:
            raise UsageError(
                f"dense engine refuses n={entries.n} > {max_dense} (raise --max-dense)")
        return DenseRelation.from_entries(entries)
    return from_entries(table or NodeTable(entries.p), entries)


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)


def _report(report, args):
    # the report goes to stderr when the relation itself is written to stdout
    stream = sys.stderr if getattr(args, "out", None) in (None, "-") else sys.stdout
    print(report.line(), file=stream)


def run_compose(ea, eb, engine, name="-", max_dense=DEFAULT_MAX_DENSE):
    if ea.n != eb.n or ea.p != eb.p:
        raise UsageError(f"incompatible relations: n={ea.n}/p={ea.p} vs n={eb.n}/p={eb.p}")
    if engine == "dense":
        a, b = _load(ea, engine, max_dense), _load(eb, engine, max_dense)
        t0 = time.perf_counter()
        out = dense_mmc(a, b)
        return out, _dense_report(name, "compose", out, time.perf_counter() - t0)
    table = NodeTable(ea.p)
    a, b = from_entries(table, ea), from_entries(table, eb)
    t0 = time.perf_counter()
    out = mmc(a, b)
    return out, _mtbdd_report(name, "compose", out, time.perf_counter() - t0)


def run_closure(entries, engine, name="-", max_dense=DEFAULT_MAX_DENSE):
    rel = _load(entries, engine, max_dense)
    t0 = time.perf_counter()
    if engine == "dense":
        out = floyd_warshall_closure(rel)
        return out, _dense_report(name, "closure", out, time.perf_counter() - t0)
    out, it = transitive_closure(rel, return_iterations=True)
    return out, _mtbdd_report(name, "closure", out, time.perf_counter() - t0, it)


def cmd_affinity(args):
    img = read_image(args.image)
    t0 = time.perf_counter()
    ctx = compute_delta(img, args.precision, args.normalize, args.connectivity)
    entries = affinity_entries(img, ctx)
    rel = from_entries(NodeTable(ctx.precision), entries)
    report = _mtbdd_report(args.image, "affinity", rel, time.perf_counter() - t0)
    _write(args.out, format_fmtr(entries))
    _report(report, args)


def cmd_compose(args):
    out, report = run_compose(read_fmtr(args.rel_a), read_fmtr(args.rel_b), args.engine,
                              args.rel_a, args.max_dense)
    _write(args.out, format_fmtr(out.to_entries()))
    _report(report, args)


def cmd_closure(args):
    out, report = run_closure(read_fmtr(args.rel), args.engine, args.rel, args.max_dense)
    _write(args.out, format_fmtr(out.to_entries()))
    _report(report, args)


def cmd_stats(args):
    entries = read_fmtr(args.rel)
    rel = from_entries(NodeTable(entries.p), entries)
    st = relation_stats(rel)
    n = entries.n
    print(f"n={n} entries={n * n} nonzero={int((entries.qs > 0).sum())} "
          f"nodes={st.nodes} terminals={len(st.terminals)} "
          f"mtbdd_kb={st.nodes * NODE_BYTES // 1000} array_kb={dense_memory_bytes(n) // 1000}")
    if args.threshold is not None:
        print(f"threshold={args.threshold} pairs={int((entries.qs >= args.threshold).sum())}")


@dataclass
class Job:
    path: str
    engine: str
    precision: int
    lineno: int


def parse_manifest(text, base="."):
    jobs = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ParseError("expected '<input-path> <engine> <precision>'", line=lineno)
        path, engine, prec = parts
        try:
            check_engine(engine)
        except UsageError as exc:
            raise ParseError(str(exc), line=lineno) from None
        if not prec.isdigit() or int(prec) not in PRECISIONS:
            raise ParseError(f"precision must be one of {PRECISIONS}, got {prec!r}", line=lineno)
        jobs.append(Job(os.path.join(base, path), engine, int(prec), lineno))
    return jobs


def run_job(job, op="closure", max_dense=DEFAULT_MAX_DENSE):
    if job.path.lower().endswith(IMAGE_SUFFIXES):
        img = read_image(job.path)
        entries = affinity_entries(img, compute_delta(img, job.precision))
    else:
        entries = read_fmtr(job.path)
        if entries.p != job.precision:
            raise ParseError(
                f"{job.path} has precision {entries.p}, manifest asks for {job.precision}",
                line=job.lineno)
    if op == "compose":
        return run_compose(entries, entries, job.engine, job.path, max_dense)[1]
    return run_closure(entries, job.engine, job.path, max_dense)[1]


def cmd_bench(args):
    with open(args.manifest, encoding="utf-8") as fh:
        jobs = parse_manifest(fh.read(), os.path.dirname(args.manifest) or ".")
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            futures = [pool.submit(run_job, j, args.op, args.max_dense) for j in jobs]
            reports = [f.result() for f in futures]
    else:
        reports = [run_job(j, args.op, args.max_dense) for j in jobs]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in reports:
        writer.writerow(r.row())
    _write(args.out, buf.getvalue())


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mtfuzzy", description="Fuzzy relations as multi-terminal decision diagrams.")
    sub = parser.add_subparsers(dest="command", required=True)

    def engine_opts(p):
        p.add_argument("--engine", choices=("mtbdd", "dense"), default="mtbdd")
        p.add_argument("--max-dense", type=int, default=DEFAULT_MAX_DENSE,
                       help="largest n the dense engine accepts")
        p.add_argument("--out", "-o", default="-", help="output file (default stdout)")

    p = sub.add_parser("affinity", help="image -> FMTR affinity relation")
    p.add_argument("image")
    p.add_argument("--precision", "-p", type=int, choices=PRECISIONS, default=1)
    p.add_argument("--normalize", choices=("delta", "sqrt-delta"), default="delta",
                   help="'sqrt-delta' divides by sqrt(delta) instead of delta")
    p.add_argument("--connectivity", type=int, choices=(4, 8), default=4)
    p.add_argument("--out", "-o", default="-")
    p.set_defaults(func=cmd_affinity)

    p = sub.add_parser("compose", help="max-min composition of two relations")
    p.add_argument("rel_a")
    p.add_argument("rel_b")
    engine_opts(p)
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("closure", help="max-min transitive closure")
    p.add_argument("rel")
    engine_opts(p)
    p.set_defaults(func=cmd_closure)

    p = sub.add_parser("stats", help="size figures of a relation")
    p.add_argument("rel")
    p.add_argument("--threshold", type=int, default=None,
                   help="also count pairs with raw value >= THRESHOLD")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("bench", help="run a manifest and write CSV")
    p.add_argument("manifest")
    p.add_argument("--op", choices=("closure", "compose"), default="closure")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--max-dense", type=int, default=DEFAULT_MAX_DENSE)
    p.add_argument("--out", "-o", default="-")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (MTFuzzyError, OSError, RuntimeError) as exc:
        print(f"mtfuzzy {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
