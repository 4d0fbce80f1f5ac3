"""Command-line entry point.

Exit codes: 0 ok, 1 verification violation, 2 usage or configuration error,
3 resource exhaustion (pre-shared key pool).
"""

from __future__ import annotations

import argparse
import datetime as dt
import hashlib
import json
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .algoinfo import CAVEAT, OTP_LIMIT, LZ78Model, otp_experiment
from .analysis import aggregate_sessions, key_rate, security_bound
from .config import load_run_settings
from .lincode import write_code
from .protocol import AttackStrategy, ConfigError, KeyPool, PoolExhausted, run_session, session_seed
from .verify import SUITES, run_suite

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_EXHAUSTED = 0, 1, 2, 3

ATTACKS = {
    "none": AttackStrategy.none(),
    "intercept-random": AttackStrategy.intercept_resend("random_per_qubit"),
    "intercept-plus": AttackStrategy.intercept_resend("always_plus"),
    "intercept-times": AttackStrategy.intercept_resend("always_times"),
}


def _dump(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    when = (dt.datetime.fromtimestamp(int(epoch), dt.timezone.utc) if epoch
            else dt.datetime.now(dt.timezone.utc))
    return when.replace(microsecond=0).isoformat()


def _manifest(command: str, config_path: str | None, config_text: str, seed: int,
              out_dir: Path, extra: dict) -> dict:
    identity = {"command": command, "config_sha256": hashlib.sha256(config_text.encode()).hexdigest(),
                "seed": seed, **extra}
    manifest_id = hashlib.sha256(_dump(identity).encode()).hexdigest()[:16]
    return {"command": command, "config_path": config_path, "seed": seed,
            "output_dir": str(out_dir), "timestamp": _timestamp(), "manifest_id": manifest_id,
            "version": __version__, **identity}


def cmd_run(args) -> int:
    try:
        settings = load_run_settings(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.sessions < 1:
        print("config error: --sessions must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    template = settings.template
    if args.delta is not None:
        template = replace(template, delta=args.delta)
    attack = ATTACKS[args.attack]
    out = Path(args.out)
    (out / "transcripts").mkdir(parents=True, exist_ok=True)

    manifest = _manifest("run", str(args.config), Path(args.config).read_text(), args.seed, out,
                         {"sessions": args.sessions, "attack": args.attack,
                          "delta": template.delta})
    (out / "manifest.json").write_text(_dump(manifest))
    (out / "code.txt").write_text(write_code(template.code))

    pool = KeyPool(settings.pool_bits)
    transcripts = []
    for i in range(args.sessions):
        cfg = replace(template, seed=session_seed(args.seed, i))
        try:
            t = run_session(cfg, attack, pool)
        except PoolExhausted as exc:
            print(f"key pool exhausted at session {i}: {exc}", file=sys.stderr)
            return EXIT_EXHAUSTED
        transcripts.append(t)
        record = t.to_dict()
        record["manifest_id"] = manifest["manifest_id"]
        record["session_index"] = i
        (out / "transcripts" / f"session_{i:06d}.json").write_text(_dump(record))

    report = aggregate_sessions(transcripts, LZ78Model(), template.delta)
    summary = report.to_dict()
    summary.update(manifest_id=manifest["manifest_id"], attack=args.attack,
                   pool_consumed_bits=pool.consumed_bits, pool_remaining_bits=pool.remaining_bits,
                   debit_sum=sum(t.pool_debit for t in transcripts))
    (out / "summary.json").write_text(_dump(summary))
    print(f"sessions={report.sessions} aborted={report.aborted} bad={report.bad_events} "
          f"frequency={report.empirical_bad_frequency:.6g} bound={report.bound:.6g}"
          f"{' (vacuous)' if report.vacuous else ''}")
    print(report.caveat)
    return EXIT_OK


def _fmt_stats(stats: dict) -> str:
    parts = []
    for k, v in stats.items():
        if isinstance(v, float):
            parts.append(f"{k}={v:.3g}")
        elif isinstance(v, (int, str)):
            parts.append(f"{k}={v}")
    return " ".join(parts)


def cmd_verify(args) -> int:
    names = SUITES if args.suite == "all" else (args.suite,)
    results = []
    for name in names:
        r = run_suite(name, seed=args.seed, instances=args.instances, m=args.m)
        results.append(r)
        print(f"{r.suite:<14} instances={r.instances:<6} violations={r.violations:<3} "
              f"{'PASS' if r.passed else 'FAIL'}  {_fmt_stats(r.stats)}")
        if name == "counting":
            print(f"  {'m':>3} {'strings':>8} {'min_dl':>7} {'max_dl':>7} "
                  f"{'threshold':>9} {'count':>7} {'bound':>12}")
            for row in r.stats["table"]:
                print(f"  {row['m']:>3} {row['strings']:>8} {row['min_dl']:>7} {row['max_dl']:>7} "
                      f"{row['threshold']:>9} {row['count']:>7} {row['bound']:>12}")
    if args.out:
        Path(args.out).write_text(_dump([r.to_dict() for r in results]))
    return EXIT_OK if all(r.passed for r in results) else EXIT_VIOLATION


def cmd_otp(args) -> int:
    if args.m > OTP_LIMIT or args.m < 1:
        print(f"error: m must be in [1, {OTP_LIMIT}] for the exhaustive experiment",
              file=sys.stderr)
        return EXIT_USAGE
    if args.delta <= 0:
        print("error: delta must be positive", file=sys.stderr)
        return EXIT_USAGE
    r = otp_experiment(LZ78Model(), args.m, args.delta, args.seed)
    print(f"{'m':>3} {'delta':>7} {'dl_k':>5} {'threshold':>10} {'|B_delta|':>10} "
          f"{'bound':>10} holds")
    print(f"{r.m:>3} {r.delta:>7.4g} {r.dl_of_key:>5} {r.threshold:>10.4g} "
          f"{r.b_delta_size:>10} {r.bound:>10.6g} {r.holds}")
    print(f"key={r.key} c_model={r.c_model} model={r.model}")
    print(CAVEAT)
    if args.out:
        Path(args.out).write_text(_dump(r.to_dict()))
    return EXIT_OK if r.holds else EXIT_VIOLATION


def cmd_keyrate(args) -> int:
    try:
        r = key_rate(args.p, args.epsilon)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(f"key_rate(p={args.p:g}, epsilon={args.epsilon:g}) = {r.value:.17g}")
    if not r.in_regime:
        print("warning: non-positive-regime (2(p+epsilon) > 1/2)", file=sys.stderr)
    return EXIT_OK


def cmd_bound(args) -> int:
    try:
        b = security_bound(args.n, args.delta, args.epsilon)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(f"security_bound(n={args.n}, delta={args.delta:g}, epsilon={args.epsilon:g}) = {b:.17g}")
    if b >= 1:
        print("note: bound >= 1, vacuous at these parameters", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="algoqkd", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run BB84 sessions and aggregate against the security bound")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sessions", type=int, default=1)
    p.add_argument("--attack", choices=sorted(ATTACKS), default="none")
    p.add_argument("--delta", type=float, default=None, help="override the config's delta")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("verify", help="run a verification sweep")
    p.add_argument("--suite", choices=SUITES + ("all",), required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--instances", type=int, default=None)
    p.add_argument("--m", type=int, default=None, help="largest m for the counting suite")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("otp", help="exhaustive one-time-pad counting experiment")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_otp)

    p = sub.add_parser("keyrate", help="asymptotic key rate 1 - h(2(p+eps)) - h(p+eps)")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.set_defaults(func=cmd_keyrate)

    p = sub.add_parser("bound", help="security bound 2^(-delta n) + 3 exp(-eps^2 n / 4)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.set_defaults(func=cmd_bound)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
