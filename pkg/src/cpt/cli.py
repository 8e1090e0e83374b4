"""Command-line interface: ``cpt encode|decode|analyze|simulate|attack``.

Exit codes: 0 success, 1 I/O or corrupt input, 2 invalid arguments,
3 unrecoverable loss (fewer than k coded packets left).

CSV schemas (header row always emitted):

    analyze table     q,k,r,o,m_prime,l,secrecy_bits
    analyze range     l,lower,upper,lower_exact,upper_exact,empty
    analyze overhead  k,p,p_thres,mode,r,o,p_fail
    analyze delay     k,r,n,d_systematic,d_nonsystematic,buffer_systematic,buffer_nonsystematic
    analyze config    q,k,n,l,r,o,stripe_sizes,secrecy_bits,survivable,
                      meets_survivability,meets_secrecy,meets_strong_secrecy
    simulate          n,k,l,q,p,failed_path,trials,failures,estimate,stderr,analytic,z_score
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import analysis as an
from .adversary import (
    DEFAULT_BUDGET_BITS,
    Intercept,
    brute_force,
    known_from,
    parse_known,
    search_space_bits,
    secrecy_margin,
    tap,
)
from .channel_sim import SIM_HEADER, SimSpec, result_row, run
from .errors import ChecksumFailure, CptError, HeaderMismatch, InsufficientPackets
from .rs_code import Codec, PacketSet, decode
from .transport import (
    CptConfig,
    StripeFile,
    drop_rows,
    encode_and_stripe,
    read_stripes,
    reassemble,
    write_stripes,
)

EXIT_OK, EXIT_IO, EXIT_USAGE, EXIT_LOSS = 0, 1, 2, 3
MANIFEST = "manifest.json"


class UsageError(Exception):
    pass


def int_list(text: str) -> list[int]:
    """``"1-4,8"`` -> ``[1, 2, 3, 4, 8]``."""
    out = []
    for part in filter(None, (p.strip() for p in text.split(","))):
        if "-" in part:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def float_list(text: str) -> list[float]:
    return [float(p) for p in text.split(",") if p.strip()]


def _config(args) -> CptConfig:
    return CptConfig(args.k, args.n, args.l, args.q)


def _emit(header, rows, out) -> None:
    out.write(an.to_csv(header, rows))


# encode / decode

def cmd_encode(args, out) -> int:
    cfg = _config(args)
    data = Path(args.infile).read_bytes()
    stripes = encode_and_stripe(data, cfg)
    paths = write_stripes(args.out_dir, stripes)
    margin = secrecy_margin(cfg)
    manifest = {
        "files": [p.name for p in paths],
        "k": cfg.k, "n": cfg.n, "l": cfg.l, "q": cfg.q,
        "reduction_poly": hex(cfg.field_spec.reduction_poly),
        "generator": cfg.field_spec.generator,
        "evaluation_points": "g^(i-1), i = 1..n",
        "stripe_sizes": list(cfg.stripe_sizes),
        "overhead": str(cfg.overhead),
        "overhead_float": float(cfg.overhead),
        "secrecy_bits": margin.bits,
        "original_byte_length": len(data),
        "packet_length": stripes[0].L,
    }
    (Path(args.out_dir) / MANIFEST).write_text(json.dumps(manifest, indent=2) + "\n")
    out.write(f"wrote {len(paths)} stripes to {args.out_dir} (sizes {list(cfg.stripe_sizes)})\n")
    return EXIT_OK


def cmd_decode(args, out) -> int:
    in_dir = Path(args.in_dir)
    stripes = read_stripes(in_dir)
    expected = None
    manifest = in_dir / MANIFEST
    if manifest.exists():
        meta = json.loads(manifest.read_text())
        expected = CptConfig(meta["k"], meta["n"], meta["l"], meta["q"])
    drop = set(args.drop_path or [])
    stripes = [s for s in stripes if s.stripe_index not in drop]
    if args.drop_rows:
        doomed = set(int_list(args.drop_rows))
        pattern = [(s.stripe_index, r) for s in stripes for r in s.row_indices if r in doomed]
        stripes = drop_rows(stripes, pattern)
    payload = reassemble(stripes, expected)
    Path(args.outfile).write_bytes(payload)
    out.write(f"recovered {len(payload)} bytes to {args.outfile}\n")
    return EXIT_OK


# analyze

def cmd_analyze(args, out) -> int:
    what = args.what
    if what == "table":
        keys = [k.strip() for k in args.rows.split(",") if k.strip()]
        _emit(an.TABLE_HEADER, an.table_rows(keys), out)
    elif what == "range":
        loss = None
        if args.p is not None:
            loss = an.LossModel(args.p, args.pthres, failed_paths=1)
        bounds = an.operational_range(int_list(args.l), args.m, args.q, args.bits, loss)
        _emit(an.RANGE_HEADER, an.range_rows(bounds), out)
    elif what == "overhead":
        grid = float_list(args.p_grid) if args.p_grid else an.default_p_grid()
        _emit(an.OVERHEAD_HEADER, an.overhead_rows(int_list(args.k), grid, args.pthres, args.failed_l), out)
    elif what == "delay":
        _emit(an.DELAY_HEADER, an.delay_rows(int_list(args.k), int_list(args.r_grid)), out)
    elif what == "config":
        rep = an.evaluate_config(args.q, args.k, args.l, n=args.n, security_bits=args.bits)
        _emit(an.CONFIG_HEADER, an.config_rows(rep), out)
    return EXIT_OK


# simulate

def cmd_simulate(args, out) -> int:
    fail = args.fail_path
    if fail is not None and fail != "worst":
        try:
            fail = int(fail)
        except ValueError:
            raise UsageError(f"--fail-path must be 'worst' or a path index, got {fail!r}")
    spec = SimSpec(
        _config(args), an.LossModel(args.p), args.trials, args.seed, args.mode, fail,
        args.payload_bytes,
    )
    est = run(spec)
    _emit(SIM_HEADER, [result_row(spec, est)], out)
    if est.mismatches:
        sys.stderr.write(f"error: {est.mismatches} decoded payloads differed from the original\n")
        return EXIT_LOSS
    return EXIT_OK


# attack

def cmd_attack(args, out) -> int:
    cfg = _config(args)
    truth = None
    if args.stripe:
        stripe = StripeFile.from_bytes(Path(args.stripe).read_bytes())
        if (stripe.q, stripe.k, stripe.n, stripe.l) != (cfg.q, cfg.k, cfg.n, cfg.l):
            raise UsageError("stripe file header does not match --q/--k/--n/--l")
        intercept = Intercept.from_stripe(stripe)
    else:
        rng = np.random.default_rng(args.seed)
        truth = rng.integers(0, cfg.field_spec.order, (cfg.k, args.packet_length), dtype=np.uint8)
        codec = Codec(cfg.params)
        Y = codec.encode(PacketSet(truth)).rows
        if not 1 <= args.tap_path <= cfg.l:
            raise UsageError(f"--tap-path must be in 1..{cfg.l}")
        intercept = tap(cfg, Y, args.tap_path)

    bits = search_space_bits(cfg.k, intercept.count, cfg.q)
    out.write(f"config: q={cfg.q} k={cfg.k} n={cfg.n} l={cfg.l}\n")
    span = f" (indices {intercept.row_indices[0]}..{intercept.row_indices[-1]})" if intercept.count else ""
    out.write(f"tapped rows: {intercept.count}{span}\n")
    out.write(f"search space: 2^{bits} per column\n")

    if intercept.count >= cfg.k:
        X = decode(cfg.params, Codec(cfg.params).G, list(zip(intercept.row_indices, intercept.rows)))
        out.write("direct decode: tapped path alone carries k packets, no search needed\n")
        if truth is not None:
            out.write(f"payload recovered: {'yes' if X == PacketSet(truth) else 'no'}\n")
        return EXIT_OK

    if not args.known:
        raise UsageError("--known is required when the tapped path carries fewer than k packets")
    predicate = known_from(parse_known(args.known), truth)
    res = brute_force(intercept, predicate, args.budget_bits)
    if not res.feasible:
        out.write(f"Infeasible ({res.bits} bits) exceeds budget of {res.budget_bits} bits\n")
        return EXIT_OK
    out.write(f"enumerated per column: {res.enumerated_per_column}\n")
    for col, cand in res.candidates.items():
        out.write(f"column {col + 1}: {len(cand)} candidates\n")
        for row in cand[: args.show]:
            out.write("  " + " ".join(f"{v:0{(cfg.q + 3) // 4}x}" for v in row) + "\n")
        if len(cand) > args.show:
            out.write(f"  ... {len(cand) - args.show} more\n")
    if truth is not None:
        out.write(f"true payload among candidates: {'yes' if res.contains(truth) else 'no'}\n")
    return EXIT_OK


# parser

def _code_flags(p) -> None:
    p.add_argument("--k", type=int, required=True, help="data packets per set")
    p.add_argument("--n", type=int, required=True, help="coded packets per set")
    p.add_argument("--l", type=int, required=True, help="disjoint paths")
    p.add_argument("--q", type=int, default=8, help="symbol width in bits (2..8, default 8)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cpt",
        description="Coded packet transport over disjoint paths.",
        epilog=__doc__.split("\n\n", 1)[1],
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="encode a file into per-path stripe files")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out-dir", required=True)
    _code_flags(p)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="reassemble a file from the stripes that arrived")
    p.add_argument("--in-dir", required=True)
    p.add_argument("--out", dest="outfile", required=True)
    p.add_argument("--drop-path", type=int, action="append", help="ignore this path's stripe (repeatable)")
    p.add_argument("--drop-rows", help="global coded row indices to discard, e.g. 1,5-7")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("analyze", help="analytic model, CSV on stdout")
    asub = p.add_subparsers(dest="what", required=True)
    a = asub.add_parser("table", help="n = 2^q - 1 example configurations")
    a.add_argument("--rows", default="q5,q6,q7,q8")
    a = asub.add_parser("range", help="admissible overhead interval per path count")
    a.add_argument("--m", type=int, default=32)
    a.add_argument("--q", type=int, default=8)
    a.add_argument("--l", default="2-6")
    a.add_argument("--bits", type=int, default=an.SECURITY_BITS)
    a.add_argument("--p", type=float, help="packet loss rate; enables the loss-driven lower bound")
    a.add_argument("--pthres", type=float, default=1e-12)
    a = asub.add_parser("overhead", help="required redundancy versus loss rate")
    a.add_argument("--k", default="32,64,128")
    a.add_argument("--pthres", type=float, default=1e-12)
    a.add_argument("--p-grid", help="comma-separated loss rates")
    a.add_argument("--failed-l", type=int, help="assume one of this many paths has failed")
    a = asub.add_parser("delay", help="decoder processing delay")
    a.add_argument("--k", default="32,64")
    a.add_argument("--r-grid", default="1-64")
    a = asub.add_parser("config", help="evaluate one configuration")
    a.add_argument("--q", type=int, required=True)
    a.add_argument("--k", type=int, required=True)
    a.add_argument("--l", type=int, required=True)
    a.add_argument("--n", type=int, help="code length (default 2^q - 1)")
    a.add_argument("--bits", type=int, default=an.SECURITY_BITS)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="Monte Carlo decoding-failure estimate")
    _code_flags(p)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fail-path", help="'worst' or a 1-based path index")
    p.add_argument("--mode", choices=("counting", "integration"), default="counting")
    p.add_argument("--payload-bytes", type=int, default=64)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("attack", help="single-path eavesdropper brute force")
    _code_flags(p)
    p.add_argument("--tap-path", type=int, default=1)
    p.add_argument("--known", help="known data symbols row:col[:val],... (1-based)")
    p.add_argument("--budget-bits", type=int, default=DEFAULT_BUDGET_BITS)
    p.add_argument("--stripe", help="tapped stripe file; default is a synthetic payload")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--packet-length", type=int, default=4)
    p.add_argument("--show", type=int, default=8, help="candidates to print per column")
    p.set_defaults(func=cmd_attack)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, out)
    except InsufficientPackets as e:
        sys.stderr.write(f"unrecoverable: {e}\n")
        return EXIT_LOSS
    except OSError as e:
        sys.stderr.write(f"I/O error: {e}\n")
        return EXIT_IO
    except (UsageError, CptError, ValueError) as e:
        sys.stderr.write(f"error: {e}\n")
        # a damaged stripe file is bad input, not a bad flag
        return EXIT_IO if isinstance(e, (ChecksumFailure, HeaderMismatch)) else EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
