"""Command-line front end.

Subcommands: hitratio (replay one trace), sweep (associativity sweep),
throughput (multi-threaded harness), synth (materialize a synthetic trace),
ballsbins (capacity-theorem Monte-Carlo next to its closed-form bound).

Output is CSV by default (JSON with --json) and starts with '#' header lines
echoing the full effective configuration, rounded capacity included.  For
hitratio, sweep, synth and ballsbins the output is byte-identical across runs
with the same flags and seed; throughput depends on the wall clock.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from .bench import BenchPlan, report, run_throughput
from .core import DEFAULT_HASH_SEED, CacheConfig, Policy, Variant
from .sim import (
    DEFAULT_WAYS,
    balls_in_bins,
    run_hit_ratio,
    sweep_associativity,
    theorem_failure_bound,
)
from .traces import PARSERS, SynthMode, SyntheticSpec, gen_fixed_hit, gen_zipf, write_plain


def parse_size(text: str) -> int:
    """Accept plain integers or 2^N power-of-two notation."""
    text = text.strip()
    if "^" in text:
        base, _, exp = text.partition("^")
        if base.strip() != "2":
            raise argparse.ArgumentTypeError(f"only 2^N sizes supported, got {text!r}")
        return 2 ** int(exp)
    return int(text)


def _int_list(text: str) -> list[int]:
    return [parse_size(t) for t in text.split(",") if t.strip()]


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="kwaycache",
                                  description="set-associative cache toolkit")
    sub = top.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--capacity", type=parse_size, default=2 ** 14,
                        help="total slots, e.g. 16384 or 2^14 (rounded up per ways)")
    common.add_argument("--ways", type=parse_size, default=8, help="slots per set")
    common.add_argument("--policy", choices=[p.value for p in Policy], default="lru")
    common.add_argument("--admission", action="store_true",
                        help="enable TinyLFU admission")
    common.add_argument("--seed", type=int, default=DEFAULT_HASH_SEED)
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--json", action="store_true", help="emit JSON instead of CSV")

    trace = argparse.ArgumentParser(add_help=False)
    trace.add_argument("--trace", required=True, help="trace file path")
    trace.add_argument("--format", choices=sorted(PARSERS), default="plain")

    p = sub.add_parser("hitratio", parents=[common, trace],
                       help="replay a trace and report the hit ratio")
    p.add_argument("--variant", choices=[v.value for v in Variant], default="st")

    p = sub.add_parser("sweep", parents=[common, trace],
                       help="hit ratio across set sizes, sample sizes and FA")
    p.add_argument("--ways-list", type=_int_list,
                   default=list(DEFAULT_WAYS), metavar="K1,K2,...")
    p.add_argument("--sample", type=_int_list, default=[8], metavar="S1,S2,...",
                   help="sampled-eviction sample sizes")
    p.add_argument("--no-fa", action="store_true", help="skip the FA row")

    p = sub.add_parser("throughput", parents=[common],
                       help="multi-threaded ops/sec harness")
    p.add_argument("--variant", choices=["wfa", "wfsc", "ls", "fa"], default="wfa",
                   help="cache under test (fa = fully associative under one lock)")
    p.add_argument("--trace", default=None, help="trace file (else synthetic)")
    p.add_argument("--format", choices=sorted(PARSERS), default="plain")
    p.add_argument("--synthetic", choices=["miss100", "hit100", "hit95", "hit90"],
                   default="miss100")
    p.add_argument("--universe", type=parse_size, default=0,
                   help="resident-set size for the hit modes")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--duration", type=float, default=1.0)
    p.add_argument("--repeats", type=int, default=11)

    p = sub.add_parser("synth", parents=[common],
                       help="materialize a synthetic trace as a plain file")
    p.add_argument("--mode", choices=[m.value for m in SynthMode], default="zipf")
    p.add_argument("--universe", type=parse_size, default=2 ** 18)
    p.add_argument("--requests", type=parse_size, default=10 ** 6)
    p.add_argument("--alpha", type=float, default=1.0, help="zipf exponent")

    p = sub.add_parser("ballsbins", parents=[common],
                       help="capacity-theorem Monte-Carlo plus closed-form bound")
    p.add_argument("--slots", type=parse_size, required=True)
    p.add_argument("--items", type=parse_size, required=True)
    p.add_argument("--trials", type=int, default=1000)

    return top


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _config_fields(args, **extra) -> dict:
    """Effective configuration echoed into every output."""
    return {"command": args.command, "seed": args.seed, **extra}


def _header(fields: dict) -> str:
    return "# kwaycache " + " ".join(f"{k}={v}" for k, v in fields.items()) + "\n"


def _config(args, variant: str) -> CacheConfig:
    return CacheConfig(capacity=args.capacity, ways=args.ways,
                       policy=Policy(args.policy), variant=Variant(variant),
                       admission=args.admission, hash_seed=args.seed)


def _load_trace(args):
    return PARSERS[args.format](args.trace)


def _cmd_hitratio(args) -> int:
    cfg = _config(args, args.variant)
    stream = _load_trace(args)
    backend = "python" if cfg.variant is Variant.ST and len(stream) <= 10_000 else "kernel"
    m = run_hit_ratio(cfg, stream, backend=backend)
    fields = _config_fields(args, capacity=cfg.capacity, ways=cfg.ways,
                            policy=cfg.policy.value, variant=cfg.variant.value,
                            admission=cfg.admission, trace=args.trace,
                            format=args.format)
    if args.json:
        _emit(args, json.dumps({"config": fields, "requests": m.requests,
                                "hits": m.hits, "misses": m.misses,
                                "hit_ratio": round(m.hit_ratio, 6)},
                               indent=2) + "\n")
    else:
        _emit(args, _header(fields) + "requests,hits,misses,hit_ratio\n"
              f"{m.requests},{m.hits},{m.misses},{m.hit_ratio:.6f}\n")
    return 0


def _cmd_sweep(args) -> int:
    cfg = _config(args, "st")
    stream = _load_trace(args)
    rows = sweep_associativity(cfg, stream, tuple(args.ways_list),
                               tuple(args.sample), include_fa=not args.no_fa)
    hdr = _header(args, capacity=cfg.capacity, policy=cfg.policy.value,
                  admission=cfg.admission, trace=args.trace, format=args.format,
                  ways_list=",".join(map(str, args.ways_list)),
                  sample=",".join(map(str, args.sample)))
    if args.json:
        body = json.dumps([{"label": r.label, "kind": r.kind, "param": r.param,
                            "capacity": r.capacity, "requests": r.metrics.requests,
                            "hits": r.metrics.hits,
                            "hit_ratio": round(r.metrics.hit_ratio, 6)}
                           for r in rows], indent=2) + "\n"
        _emit(args, body)
        return 0
    lines = [hdr + "label,kind,param,capacity,requests,hits,misses,hit_ratio"]
    for r in rows:
        m = r.metrics
        lines.append(f"{r.label},{r.kind},{r.param},{r.capacity},"
                     f"{m.requests},{m.hits},{m.misses},{m.hit_ratio:.6f}")
    _emit(args, "\n".join(lines) + "\n")
    return 0


def _cmd_throughput(args) -> int:
    if args.variant == "fa":
        cfg = _config(args, "wfa")
        baseline = "fa-lock"
    else:
        cfg = _config(args, args.variant)
        baseline = None
    if args.trace:
        workload = _load_trace(args)
    else:
        workload = SyntheticSpec(mode=SynthMode(args.synthetic),
                                 universe=args.universe, requests=1, seed=args.seed)
    plan = BenchPlan(config=cfg, workload=workload, threads=args.threads,
                     duration=args.duration, repeats=args.repeats, seed=args.seed,
                     baseline=baseline)
    result = run_throughput(plan)
    hdr = _header(args, capacity=cfg.capacity, ways=cfg.ways, policy=cfg.policy.value,
                  variant=args.variant, threads=args.threads,
                  duration=args.duration, repeats=args.repeats)
    body = report([result], "json" if args.json else "csv")
    _emit(args, body if args.json else hdr + body)
    return 0


def _cmd_synth(args) -> int:
    mode = SynthMode(args.mode)
    spec = SyntheticSpec(mode=mode, universe=args.universe, requests=args.requests,
                         exponent=args.alpha, seed=args.seed)
    if mode is SynthMode.ZIPF:
        stream = gen_zipf(spec)
    else:
        stream = gen_fixed_hit(spec, args.capacity).stream
    header = (f"kwaycache synth mode={mode.value} universe={args.universe} "
              f"requests={args.requests} alpha={args.alpha} seed={args.seed} "
              f"capacity={args.capacity}")
    if args.out:
        write_plain(stream, args.out, header=header)
    else:
        write_plain(stream, sys.stdout.buffer, header=header)
    return 0


def _cmd_ballsbins(args) -> int:
    fraction = balls_in_bins(args.slots, args.ways, args.items, args.trials,
                             seed=args.seed)
    bound = theorem_failure_bound(args.slots, args.items, args.ways)
    hdr = _header(args, slots=args.slots, ways=args.ways, items=args.items,
                  trials=args.trials)
    if args.json:
        _emit(args, json.dumps({"slots": args.slots, "ways": args.ways,
                                "items": args.items, "trials": args.trials,
                                "success_fraction": round(fraction, 6),
                                "failure_bound": round(bound, 9)}, indent=2) + "\n")
    else:
        _emit(args, hdr + "slots,ways,items,trials,success_fraction,failure_bound\n"
              f"{args.slots},{args.ways},{args.items},{args.trials},"
              f"{fraction:.6f},{bound:.9f}\n")
    return 0


_COMMANDS = {"hitratio": _cmd_hitratio, "sweep": _cmd_sweep,
             "throughput": _cmd_throughput, "synth": _cmd_synth,
             "ballsbins": _cmd_ballsbins}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"kwaycache {args.command}: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # anything else still exits with a diagnostic
        print(f"kwaycache {args.command}: unexpected error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
