"""Command line entry point: ``ciprng <subcommand> ...``.

With ``--out DIR`` every subcommand writes its artifacts into DIR together
with ``manifest.json``; ``ciprng rerun DIR/manifest.json --out OTHER``
regenerates the same artifacts byte for byte.  Without ``--out`` the main
artifact goes to stdout and no manifest is written.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
import time
from pathlib import Path

from . import __version__
from .bitcore import BUILTIN_NAMES, BooleanFunction, Strategy, builtin_function, load_function, load_functions, trajectory
from .errors import ContractError
from .graphgen import GenerationParams, build_graph, dedup_functions, generate_scc_function, is_strongly_connected
from .markov import sufficient_iterations
from .prng import CiGenerator, LegacyGenerator, default_b, outputs, pack_bytes, to_bits
from .stattests import BatteryConfig, repartition, run_battery
from .xorshift import MASK32, XorshiftState, seed_from_time

log = logging.getLogger("ciprng")

SEED_ENV = "CIPRNG_SEED"


class InputFileError(OSError):
    pass


def resolve_function(spec: str) -> tuple[BooleanFunction, str | None]:
    """A function from a file path or a builtin name; also returns the file digest."""
    path = Path(spec)
    if path.is_file():
        return load_function(path), hashlib.sha256(path.read_bytes()).hexdigest()
    if spec in BUILTIN_NAMES:
        return builtin_function(spec), None
    raise InputFileError(f"no such function file: {spec}")


def resolve_seed(seed: int | None) -> int:
    if seed is None:
        env = os.environ.get(SEED_ENV)
        seed = int(env, 0) if env else seed_from_time().z
    if not 0 < seed <= MASK32:
        raise ContractError(f"seed must be a nonzero 32-bit word, got {seed}")
    return seed


def _u32(text: str) -> int:
    return int(text, 0)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


class Output:
    """Collects artifacts for one run and writes them plus the manifest."""

    def __init__(self, directory: str | None):
        self.dir = Path(directory) if directory else None
        self.files: list[str] = []
        if self.dir:
            self.dir.mkdir(parents=True, exist_ok=True)

    def write(self, name: str, data: str | bytes) -> None:
        if self.dir is None:
            return
        path = self.dir / name
        if isinstance(data, bytes):
            path.write_bytes(data)
        else:
            path.write_text(data, encoding="utf-8")
        self.files.append(name)

    def manifest(self, command: str, argv: list[str], params: dict, inputs: dict, elapsed: float) -> None:
        if self.dir is None:
            return
        doc = {
            "tool": "ciprng",
            "version": __version__,
            "subcommand": command,
            "argv": argv,
            "params": params,
            "inputs": inputs,
            "outputs": sorted(self.files),
            "elapsed_seconds": round(elapsed, 3),
        }
        (self.dir / "manifest.json").write_text(_dump(doc), encoding="utf-8")


def _fn_arg(spec: str) -> str:
    # Absolute paths keep manifests replayable from any working directory.
    path = Path(spec)
    return str(path.resolve()) if path.is_file() else spec


def _fn_input(spec: str, f: BooleanFunction, digest: str | None) -> dict:
    return {"fn": _fn_arg(spec), "sha256": digest, "name": f.name}


# --- subcommands -------------------------------------------------------------
# Each returns (resolved argv for replay, params, inputs).

def cmd_gen_fn(args, out: Output):
    if args.verify:
        functions = load_functions(args.verify)
        bad = 0
        for idx, f in enumerate(functions):
            ok = is_strongly_connected(build_graph(f))
            bad += not ok
            print(f"{idx}\t{f.name or '-'}\t{'scc' if ok else 'NOT-SCC'}")
        if bad:
            raise ContractError(f"{bad} of {len(functions)} functions are not strongly connected")
        return None
    seed = resolve_seed(args.seed)
    if args.n is None or args.rate is None:
        raise ContractError("gen-fn needs --n and --rate (or --verify FILE)")
    functions = []
    rates = []
    for j in range(args.count):
        sub_seed = (seed + j * 0x9E3779B9) & MASK32 or 1
        res = generate_scc_function(GenerationParams(args.n, args.rate, args.max_attempts, sub_seed))
        if res.saturated:
            log.warning("run %d saturated at rate %.4f < %.4f", j, res.achieved_rate, args.rate)
        functions.append(BooleanFunction(args.n, res.function.images, f"gen-{seed}-{j}"))
        rates.append(res.achieved_rate)
    if args.dedup:
        functions = dedup_functions(functions)
    lines = "".join(f.to_json() + "\n" for f in functions)
    if out.dir:
        out.write("functions.jsonl", lines)
    else:
        sys.stdout.write(lines)
    argv = ["gen-fn", "--n", str(args.n), "--rate", repr(args.rate), "--count", str(args.count),
            "--seed", str(seed), "--max-attempts", str(args.max_attempts)] + (["--dedup"] if args.dedup else [])
    params = {"n": args.n, "rate": args.rate, "count": args.count, "seed": seed,
              "max_attempts": args.max_attempts, "dedup": args.dedup, "achieved_rates": rates}
    return argv, params, {}


def _profile_artifacts(profile) -> tuple[str, str]:
    rows = ["t,relative_deviation,deviation_rate"]
    for t, (rel, ab) in enumerate(zip(profile.deviations, profile.absolute), start=1):
        rows.append(f"{t},{float(rel)!r},{float(ab)!r}")
    return "\n".join(rows) + "\n", _dump(profile.summary())


def cmd_analyze(args, out: Output):
    f, digest = resolve_function(args.fn)
    start = None if args.worst_case else args.start
    profile = sufficient_iterations(f, start, args.epsilon, args.tmax)
    csv, summary = _profile_artifacts(profile)
    if out.dir:
        out.write("deviation.csv", csv)
        out.write("summary.json", summary)
    else:
        sys.stdout.write(csv)
        sys.stderr.write(summary)
    argv = ["analyze", "--fn", _fn_arg(args.fn), "--epsilon", repr(args.epsilon), "--tmax", str(args.tmax)]
    argv += ["--worst-case"] if args.worst_case else ["--start", str(args.start)]
    params = {"epsilon": args.epsilon, "tmax": args.tmax, "start": start}
    return argv, params, _fn_input(args.fn, f, digest)


def _make_generator(f: BooleanFunction, args, seed: int):
    x0 = args.x0 if args.x0 is not None else seed % (1 << f.n)
    rng = XorshiftState(seed)
    if getattr(args, "algorithm", "ci") == "legacy":
        return LegacyGenerator(f.n, rng, x0, f, strict_paper=args.strict_paper), x0, None
    b = args.b if args.b is not None else default_b(f)
    return CiGenerator(f, b, rng, x0), x0, b


def cmd_generate(args, out: Output):
    f, digest = resolve_function(args.fn)
    seed = resolve_seed(args.seed)
    g, x0, b = _make_generator(f, args, seed)
    values, _ = outputs(g, args.rounds)
    if args.format == "ints":
        name, data = "stream.txt", "".join(f"{v}\n" for v in values)
    elif args.format == "bits":
        name, data = "stream.bits", (to_bits(values, f.n) + ord("0")).tobytes().decode("ascii") + "\n"
    else:
        name, data = "stream.bin", pack_bytes(to_bits(values, f.n))
    if out.dir:
        out.write(name, data)
    elif isinstance(data, bytes):
        sys.stdout.buffer.write(data)
    else:
        sys.stdout.write(data)
    argv = ["generate", "--fn", _fn_arg(args.fn), "--seed", str(seed), "--rounds", str(args.rounds),
            "--format", args.format, "--x0", str(x0), "--algorithm", args.algorithm]
    if b is not None:
        argv += ["--b", str(b)]
    if args.strict_paper:
        argv.append("--strict-paper")
    params = {"seed": seed, "rounds": args.rounds, "format": args.format, "x0": x0, "b": b,
              "algorithm": args.algorithm, "strict_paper": args.strict_paper}
    return argv, params, _fn_input(args.fn, f, digest)


def _battery(f, args, seed, out: Output, prefix: str = ""):
    g, x0, b = _make_generator(f, args, seed)
    needed = args.streams * args.bits
    values, _ = outputs(g, -(-needed // f.n))
    bits = to_bits(values, f.n)
    seqs = [bits[i * args.bits:(i + 1) * args.bits] for i in range(args.streams)]
    config = BatteryConfig(alpha=args.alpha, block_length=args.block_length, serial_m=args.serial_m,
                           apen_m=args.apen_m, workers=args.workers)
    report = run_battery(seqs, config)
    # timing stays out of the files so reruns are byte-identical
    out.write(prefix + "report.json", _dump(report.to_dict()))
    out.write(prefix + "report.txt", report.table(include_timing=False) + "\n")
    out.write(prefix + "repartition.csv", repartition(values, f.n).to_csv())
    print(report.table())
    params = {"seed": seed, "x0": x0, "b": b, "streams": args.streams, "bits": args.bits,
              "alpha": args.alpha, "block_length": args.block_length, "serial_m": args.serial_m,
              "apen_m": args.apen_m, "timing_seconds": round(report.timing, 3)}
    return report, params


def _battery_argv(args, seed, x0, b) -> list[str]:
    return ["--streams", str(args.streams), "--bits", str(args.bits), "--seed", str(seed),
            "--x0", str(x0), "--b", str(b), "--alpha", repr(args.alpha),
            "--block-length", str(args.block_length), "--serial-m", str(args.serial_m),
            "--apen-m", str(args.apen_m)]


def cmd_test(args, out: Output):
    f, digest = resolve_function(args.fn)
    seed = resolve_seed(args.seed)
    _, params = _battery(f, args, seed, out)
    argv = ["test", "--fn", _fn_arg(args.fn)] + _battery_argv(args, seed, params["x0"], params["b"])
    return argv, params, _fn_input(args.fn, f, digest)


def cmd_trace(args, out: Output):
    f, digest = resolve_function(args.fn)
    strategy = Strategy.parse(args.strategy, f.n)
    states = trajectory(f, strategy, args.x0, len(strategy))
    line = ",".join(map(str, states))
    print(line)
    out.write("trace.json", _dump({"x0": args.x0, "strategy": list(strategy), "states": states}))
    argv = ["trace", "--fn", _fn_arg(args.fn), "--x0", str(args.x0), "--strategy", args.strategy]
    return argv, {"x0": args.x0, "strategy": list(strategy)}, _fn_input(args.fn, f, digest)


def cmd_pipeline(args, out: Output):
    seed = resolve_seed(args.seed)
    res = generate_scc_function(GenerationParams(args.n, args.rate, args.max_attempts, seed))
    f = BooleanFunction(args.n, res.function.images, f"gen-{seed}")
    out.write("function.json", f.to_json() + "\n")
    profile = sufficient_iterations(f, 0, args.epsilon, args.tmax)
    csv, summary = _profile_artifacts(profile)
    out.write("deviation.csv", csv)
    out.write("summary.json", summary)
    if args.b is None:
        if profile.sufficient_iterations is None:
            raise ContractError("generated function has no sufficient iteration count; pass --b")
        args.b = profile.sufficient_iterations
    print(f"function {list(f.images)} removed {res.achieved_rate:.4f} b={args.b}")
    _, params = _battery(f, args, seed, out)
    argv = ["pipeline", "--n", str(args.n), "--rate", repr(args.rate), "--max-attempts", str(args.max_attempts),
            "--epsilon", repr(args.epsilon), "--tmax", str(args.tmax)]
    argv += _battery_argv(args, seed, params["x0"], args.b)
    params.update({"n": args.n, "rate": args.rate, "achieved_rate": res.achieved_rate,
                   "saturated": res.saturated, "epsilon": args.epsilon, "tmax": args.tmax})
    return argv, params, {}


def cmd_rerun(args, out: Output):
    manifest = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
    fn = manifest.get("inputs", {}).get("fn")
    expected = manifest.get("inputs", {}).get("sha256")
    if fn and expected:
        _, digest = resolve_function(fn)
        if digest != expected:
            raise ContractError(f"input {fn} changed since the manifest was written")
    argv = list(manifest["argv"])
    if args.out:
        argv += ["--out", args.out]
    return main(argv)


# --- parser --------------------------------------------------------------------

def _add_battery_options(p):
    p.add_argument("--b", type=int, help="minimal iterations per round (default: sufficient count)")
    p.add_argument("--streams", type=int, default=100)
    p.add_argument("--bits", type=int, default=1_000_000)
    p.add_argument("--seed", type=_u32)
    p.add_argument("--x0", type=int, help="initial configuration (default: seed mod 2^n)")
    p.add_argument("--alpha", type=float, default=0.01)
    p.add_argument("--block-length", type=int, default=128)
    p.add_argument("--serial-m", type=int, default=10)
    p.add_argument("--apen-m", type=int, default=10)
    p.add_argument("--workers", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ciprng", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"ciprng {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-fn", help="generate functions with strongly connected iteration graphs")
    p.add_argument("--n", type=int)
    p.add_argument("--rate", type=float, help="target fraction of removed arcs")
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=_u32)
    p.add_argument("--max-attempts", type=int, default=1000)
    p.add_argument("--dedup", action="store_true", help="keep one function per isomorphism class")
    p.add_argument("--verify", metavar="FILE", help="re-check strong connectivity of stored functions")
    p.set_defaults(func=cmd_gen_fn)

    p = sub.add_parser("analyze", help="deviation from uniform of the iteration chain")
    p.add_argument("--fn", required=True, help="function file or builtin name")
    p.add_argument("--epsilon", type=float, default=0.01)
    p.add_argument("--tmax", type=int, default=500)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--start", type=int, default=0)
    g.add_argument("--worst-case", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("generate", help="emit generator output")
    p.add_argument("--fn", required=True)
    p.add_argument("--b", type=int)
    p.add_argument("--seed", type=_u32)
    p.add_argument("--x0", type=int)
    p.add_argument("--rounds", type=int, required=True)
    p.add_argument("--format", choices=("bits", "bytes", "ints"), default="bits")
    p.add_argument("--algorithm", choices=("ci", "legacy"), default="ci")
    p.add_argument("--strict-paper", action="store_true",
                   help="legacy generator: draw k modulo 2^n - 1 as literally written")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("test", help="run the statistical battery on generator output")
    p.add_argument("--fn", required=True)
    _add_battery_options(p)
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("trace", help="print the states visited under an explicit strategy")
    p.add_argument("--fn", required=True)
    p.add_argument("--x0", type=int, required=True)
    p.add_argument("--strategy", required=True, help="comma separated components, e.g. 2,4,2,3")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("pipeline", help="gen-fn, analyze and test in one go")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--rate", type=float, required=True)
    p.add_argument("--max-attempts", type=int, default=1000)
    p.add_argument("--epsilon", type=float, default=0.01)
    p.add_argument("--tmax", type=int, default=500)
    _add_battery_options(p)
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("rerun", help="replay a run from its manifest")
    p.add_argument("manifest")
    p.set_defaults(func=cmd_rerun)

    for name, action in sub.choices.items():
        action.add_argument("--out", metavar="DIR", help="write artifacts and manifest.json here")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    if args.command == "rerun":
        out = Output(None)
    else:
        out = Output(args.out)
    start = time.perf_counter()
    try:
        result = args.func(args, out)
    except ContractError as exc:
        print(f"ciprng: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"ciprng: error: {exc}", file=sys.stderr)
        return 1
    if args.command == "rerun":
        return result
    if result is not None:
        argv_resolved, params, inputs = result
        out.manifest(args.command, argv_resolved, params, inputs, time.perf_counter() - start)
    return 0


if __name__ == "__main__":
    sys.exit(main())
