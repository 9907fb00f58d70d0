"""Command line entry point: ``seqlab <subcommand> ...``.

Exit codes: 0 success, 1 a verification failed, 2 usage error, 3 a budget
(memory, time or tuple count) was exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import platform
import sys
from datetime import datetime, timezone
from pathlib import Path

from seqlab import __version__, census, certify, checkpoint, growth, structure
from seqlab._accel import backend_name
from seqlab.errors import (BudgetExceededError, CapacityError, ChecksumError,
                           SeqlabError)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


class Run:
    """Collects the manifest for one invocation and writes its outputs."""

    def __init__(self, args):
        self.args = args
        self.manifest = {
            "subcommand": args.command,
            "parameters": {k: v for k, v in vars(args).items()
                           if k not in ("command", "func") and v is not None},
            "started": _now(),
            "finished": None,
            "checkpoint": getattr(args, "checkpoint", None),
            "outputs": [],
            "tool_version": f"seqlab {__version__} ({backend_name()}, python {platform.python_version()})",
        }

    def emit(self, payload, csv_text=None):
        """Write JSON (default) or CSV to --out or stdout."""
        self.manifest["finished"] = _now()
        out = getattr(self.args, "out", None)
        fmt = getattr(self.args, "format", "json")
        if fmt == "csv" and csv_text is not None:
            text = csv_text
        else:
            if isinstance(payload, dict):
                payload = dict(payload, manifest=self.manifest)
            else:
                payload = {"results": payload, "manifest": self.manifest}
            text = json.dumps(payload, indent=2, default=str) + "\n"
        if out:
            path = Path(out)
            path.parent.mkdir(parents=True, exist_ok=True)
            self.manifest["outputs"].append(str(path))
            path.write_text(text)
            if fmt == "csv" and csv_text is not None:
                Path(str(path) + ".manifest.json").write_text(
                    json.dumps(self.manifest, indent=2, default=str) + "\n")
        else:
            sys.stdout.write(text)


def _verdicts_exit(verdicts) -> int:
    return EXIT_OK if all(v.passed for v in verdicts) else EXIT_FAIL


def cmd_census(args) -> int:
    run = Run(args)
    table, complete = checkpoint.resumable_residues(
        args.m, args.limit, args.checkpoint, every=args.checkpoint_every,
        resume=args.resume, stop_after=args.stop_after)
    if not complete:
        print(f"stopped at index {table.limit} of {args.limit}; resume with --resume",
              file=sys.stderr)
        return EXIT_BUDGET
    rep = census.census_from_table(table)
    run.emit(rep.to_json(), census.to_csv([rep]))
    return EXIT_OK


def cmd_scan(args) -> int:
    run = Run(args)
    res = census.deviation_scan(args.max_m, args.limit, threshold=args.threshold,
                                threads=args.threads)
    payload = {
        "limit": args.limit,
        "threshold": args.threshold,
        "worst_abs_deviation": res.worst,
        "passed": res.passed,
        "skipped_moduli": res.skipped,
        "reports": [r.to_json() | {"max_abs_deviation": r.max_abs_deviation}
                    for r in res.reports],
    }
    run.emit(payload, census.to_csv(sorted(res.reports, key=lambda r: r.modulus.m)))
    return EXIT_OK if res.passed else EXIT_FAIL


def _load_or_search_cert(args):
    if args.cert:
        return certify.Certificate.from_json(json.loads(Path(args.cert).read_text()))
    if None in (args.x, args.m, args.j):
        raise SeqlabError("give --cert or all of --x, --m, --j")
    return certify.search_min_hits(args.x, args.m, args.j, threads=args.threads)


def cmd_verify(args) -> int:
    run = Run(args)
    verdicts = []
    if args.suite in ("congruences", "all"):
        verdicts += structure.lemma_suite(args.limit, args.max_power)
    if args.suite in ("windows", "all"):
        verdicts.append(certify.verify_window_disjoint(args.window_n or args.limit, args.j or 2))
    if args.suite in ("empirical", "all"):
        if args.suite == "all" and not args.cert and args.x is None:
            args.x, args.m, args.j = 0, 3, args.j or 2
        cert = _load_or_search_cert(args)
        verdicts.append(certify.empirical_window_check(cert, args.limit))
    run.emit([v.to_json() | {"detail": v.detail} for v in verdicts])
    return _verdicts_exit(verdicts)


def cmd_certify(args) -> int:
    run = Run(args)
    state = None
    if args.resume and args.checkpoint and Path(args.checkpoint).exists():
        state = certify.SearchState.load(args.checkpoint)
    try:
        cert = certify.search_min_hits(
            args.x, args.m, args.j, threads=args.threads, time_budget=args.time_budget,
            tuple_budget=args.tuple_budget, state=state, checkpoint=args.checkpoint)
    except BudgetExceededError as exc:
        print(str(exc), file=sys.stderr)
        run.emit(exc.partial.to_json())
        return EXIT_BUDGET
    run.emit(cert.to_json())
    return EXIT_OK


def cmd_verify_certificate(args) -> int:
    run = Run(args)
    cert = certify.Certificate.from_json(json.loads(Path(args.path).read_text()))
    v = certify.verify_certificate(cert)
    payload = v.to_json() | {"detail": v.detail}
    if v.passed:
        payload["density_lower_bound"] = str(certify.density_bound(cert))
    run.emit(payload)
    return _verdicts_exit([v])


def cmd_growth(args) -> int:
    run = Run(args)
    recs = growth.growth_lower_check(args.start, args.stop)
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=["n", "log_a_n", "threshold", "margin", "verdict"],
                       lineterminator="\n")
    w.writeheader()
    for r in recs:
        w.writerow(r.row())
    failing = growth.failing_set(recs)
    undecided = [r.n for r in recs if r.verdict == "indeterminate"]
    payload = {
        "from": args.start, "to": args.stop,
        "checked": len(recs),
        "failing": failing,
        "indeterminate": undecided,
        "largest_failing": max(failing) if failing else None,
        "min_margin": min(r.margin for r in recs),
    }
    run.emit(payload, buf.getvalue())
    return EXIT_OK if not failing and not undecided else EXIT_FAIL


def cmd_probe(args) -> int:
    run = Run(args)
    probes = [growth.upper_probe(e, args.limit) for e in args.epsilon]
    run.emit([p.__dict__ for p in probes])
    return EXIT_OK


def cmd_lemmas(args) -> int:
    run = Run(args)
    verdicts = growth.analytic_lemma_suite(args.grid_density)
    run.emit([v.to_json() | {"detail": v.detail} for v in verdicts])
    return _verdicts_exit(verdicts)


def _positive_int(text):
    v = int(float(text)) if "e" in text.lower() else int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="seqlab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"seqlab {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def out_opts(sp, csv_ok=True):
        sp.add_argument("--out", help="write to this file instead of stdout")
        sp.add_argument("--format", choices=["json", "csv"] if csv_ok else ["json"],
                        default="json")

    sp = sub.add_parser("census", help="residue-class counts for one modulus")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--limit", type=_positive_int, required=True)
    sp.add_argument("--checkpoint", help="checkpoint file for the residue pass")
    sp.add_argument("--checkpoint-every", type=_positive_int, default=1_000_000)
    sp.add_argument("--resume", action="store_true")
    sp.add_argument("--stop-after", type=_positive_int,
                    help="halt after this index (leaves a checkpoint)")
    out_opts(sp)
    sp.set_defaults(func=cmd_census)

    sp = sub.add_parser("scan", help="conjecture deviation scan over m = 2..max-m")
    sp.add_argument("--max-m", type=int, required=True)
    sp.add_argument("--limit", type=_positive_int, required=True)
    sp.add_argument("--threshold", type=float, default=0.01)
    sp.add_argument("--threads", type=_positive_int)
    out_opts(sp)
    sp.set_defaults(func=cmd_scan)

    sp = sub.add_parser("verify", help="congruence lemmas and window-set structure")
    sp.add_argument("--suite", choices=["congruences", "windows", "empirical", "all"],
                    default="all")
    sp.add_argument("--limit", type=_positive_int, default=1_000_000,
                    help="largest sequence index touched")
    sp.add_argument("--max-power", type=int, default=3)
    sp.add_argument("--window-n", type=_positive_int)
    sp.add_argument("--cert", help="certificate JSON for the empirical check")
    sp.add_argument("--x", type=int)
    sp.add_argument("--m", type=int)
    sp.add_argument("--j", type=int)
    sp.add_argument("--threads", type=_positive_int)
    out_opts(sp, csv_ok=False)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("certify", help="search e_{x,m,j} and emit a certificate")
    sp.add_argument("--x", type=int, required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--j", type=int, required=True)
    sp.add_argument("--threads", type=_positive_int)
    sp.add_argument("--time-budget", type=float, help="seconds")
    sp.add_argument("--tuple-budget", type=_positive_int)
    sp.add_argument("--checkpoint", help="JSON file of completed partitions")
    sp.add_argument("--resume", action="store_true")
    out_opts(sp, csv_ok=False)
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("verify-certificate", help="re-evaluate a certificate's witness")
    sp.add_argument("path")
    out_opts(sp, csv_ok=False)
    sp.set_defaults(func=cmd_verify_certificate)

    sp = sub.add_parser("growth", help="check a_n > n^f(n) exactly")
    sp.add_argument("--from", dest="start", type=_positive_int, default=141)
    sp.add_argument("--to", dest="stop", type=_positive_int, default=100_000)
    out_opts(sp)
    sp.set_defaults(func=cmd_growth)

    sp = sub.add_parser("probe", help="empirical a_n / n^(f(n)+eps) boundedness")
    sp.add_argument("--epsilon", type=float, nargs="+", default=[0.5])
    sp.add_argument("--limit", type=_positive_int, default=10_000)
    out_opts(sp, csv_ok=False)
    sp.set_defaults(func=cmd_probe)

    sp = sub.add_parser("lemmas", help="sample the analytic helper inequalities")
    sp.add_argument("--grid-density", type=int, default=200)
    out_opts(sp, csv_ok=False)
    sp.set_defaults(func=cmd_lemmas)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CapacityError, BudgetExceededError) as exc:
        print(f"seqlab: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ChecksumError, FileNotFoundError) as exc:
        print(f"seqlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SeqlabError, ValueError) as exc:
        print(f"seqlab: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
