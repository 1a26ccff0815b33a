"""Command line: ``modjac find | verify | table``.

    modjac find --levels 63..63 [--precision BITS] [--cache DIR] [--json PATH]
    modjac verify --curve FILE --eigenvalues FILE [--periods FILE]
    modjac table --out PATH (--records FILE | --levels A..B)

``find`` prints one JSON object per class (see ``pipeline.CurveRecord``) and
exits non-zero if any record has status ``failed``.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import pipeline
from .errors import ModjacError, ParseError

log = logging.getLogger("modjac")


def parse_levels(text: str) -> list[int]:
    """``A..B``, ``A-B``, a single level, or a comma-separated mix of these."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        sep = ".." if ".." in part else ("-" if "-" in part[1:] else None)
        try:
            if sep:
                lo, hi = (int(x) for x in part.split(sep, 1))
                if lo > hi:
                    raise ValueError
                out.extend(range(lo, hi + 1))
            else:
                out.append(int(part))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad level range {part!r}") from None
    if not out or min(out) < 1:
        raise argparse.ArgumentTypeError(f"bad level range {text!r}")
    return sorted(set(out))


def _config(args) -> pipeline.PipelineConfig:
    return pipeline.PipelineConfig(
        precision_bits=args.precision,
        n_terms_override=getattr(args, "n_terms", None),
        prime_bound=getattr(args, "prime_bound", 1000),
        lfactor_bound=args.lfactor_bound,
        cache_dir=getattr(args, "cache", None),
    )


def _find(args) -> int:
    records = pipeline.cmd_find(args.levels, _config(args))
    for r in records:
        print(r.to_line())
    if args.json:
        pipeline.write_records(args.json, records)
    failed = [r for r in records if r.status == "failed"]
    for r in failed:
        log.error("%s: %s", r.label, r.message)
    return 1 if failed else 0


def _verify(args) -> int:
    report = pipeline.cmd_verify(args.curve, args.eigenvalues, _config(args), args.periods)
    print(json.dumps(report, sort_keys=True, indent=2))
    return 0 if report["passed"] else 1


def _table(args) -> int:
    if args.records:
        records = pipeline.read_records(args.records)
    else:
        records = pipeline.cmd_find(args.levels or [], _config(args))
    text, data = pipeline.cmd_table(args.out, records)
    print(f"wrote {text} and {data}")
    return 1 if any(r.status == "failed" for r in records) else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="modjac", description="genus-2 curves with Jacobian A_f")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--precision", type=int, default=128, help="working precision in bits")
        p.add_argument("--lfactor-bound", type=int, default=100)

    p = sub.add_parser("find", help="compute curves for a range of levels")
    p.add_argument("--levels", type=parse_levels, required=True)
    p.add_argument("--cache", default=None, help="cache directory (MODJAC_CACHE overrides)")
    p.add_argument("--json", default=None, help="also write records to this file")
    p.add_argument("--prime-bound", type=int, default=1000)
    p.add_argument("--n-terms", type=int, default=None, help="fixed number of q-expansion terms")
    common(p)
    p.set_defaults(func=_find)

    p = sub.add_parser("verify", help="check an equation against Hecke eigenvalues")
    p.add_argument("--curve", required=True)
    p.add_argument("--eigenvalues", required=True)
    p.add_argument("--periods", default=None, help="period cache file for the theta check")
    common(p)
    p.set_defaults(func=_verify)

    p = sub.add_parser("table", help="write a table of records")
    p.add_argument("--out", required=True)
    p.add_argument("--records", default=None, help="records written by find --json")
    p.add_argument("--levels", type=parse_levels, default=None)
    p.add_argument("--cache", default=None)
    common(p)
    p.set_defaults(func=_table)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ParseError, OSError) as exc:
        log.error("%s", exc)
        return 2
    except ModjacError as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
