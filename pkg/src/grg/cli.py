"""``grg`` command-line front end.

Exit codes: 0 ok, 1 check mismatch or failed ``--k`` threshold, 2 malformed
input or parameters, 3 solver does not apply to the instance, 4 budget
exceeded.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

from grg import oracle
from grg.arena import ADAM, EVE, DEFAULT_FPT_CUTOFF, parse_game, serialize_game
from grg.errors import (
    BudgetExceeded, GrgError, InfeasibleParams, MemoryBudget, ParseError,
    TooLarge, TooManyTargets, TooManyVariables, WrongClass,
)
from grg.genreach import SOLVERS, START_MASKS, solve
from grg.maxreach import MAX_SOLVERS, PROMISE_SOLVERS, max_value, promise_value
from grg import reductions

EXIT_OK, EXIT_MISMATCH, EXIT_PARSE, EXIT_CLASS, EXIT_BUDGET = 0, 1, 2, 3, 4
WITNESS_LIMIT = 50


def exit_code_for(exc: Exception) -> int:
    if isinstance(exc, WrongClass):
        return EXIT_CLASS
    if isinstance(exc, (MemoryBudget, TooManyTargets, BudgetExceeded, TooManyVariables, TooLarge)):
        return EXIT_BUDGET
    return EXIT_PARSE


@dataclass
class RunReport:
    command: str
    file: str
    digest: str
    algo: str
    winner: str | None = None
    value: int | None = None
    witness: object = None
    micros: int = 0
    states: int | None = None
    check: str | None = None          # "ok" / "mismatch" / None when not requested

    def as_json(self) -> dict:
        d = asdict(self)
        # exactly one of winner/value is meaningful per command
        if self.winner is None:
            d.pop("winner")
        if self.value is None:
            d.pop("value")
        if self.check is None:
            d.pop("check")
        return d

    def as_text(self, timing: bool = False) -> str:
        verdict = f"winner {self.winner}" if self.winner is not None else f"value {self.value}"
        lines = [verdict, f"algo {self.algo}"]
        if self.states is not None:
            lines.append(f"states {self.states}")
        if self.witness:
            lines.append(f"witness {self.witness}")
        if self.check is not None:
            lines.append(f"check {self.check}")
        if timing:
            lines.append(f"micros {self.micros}")
        return "\n".join(lines)


def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None


def _witness(cert, g, args):
    if cert is None:
        return None
    limit = None if args.full_witness else WITNESS_LIMIT
    return cert.as_dict(g, limit) if args.json else cert.summary(g, limit)


def run_file(command: str, path: str, args) -> RunReport:
    data = _read(path)
    try:
        g = parse_game(data.decode("utf-8"))
    except UnicodeDecodeError:
        raise ParseError("file is not UTF-8") from None
    digest = hashlib.sha256(data).hexdigest()[:16]
    start_mask = getattr(args, "start_mask", "seeded")
    t0 = time.perf_counter()
    if command == "solve":
        out = solve(g, args.algo, start_mask=start_mask,
                    fpt_cutoff=getattr(args, "fpt_cutoff", DEFAULT_FPT_CUTOFF))
        micros = int((time.perf_counter() - t0) * 1e6)
        report = RunReport(command, path, digest, out.algorithm, winner=str(out.winner),
                           witness=_witness(out.certificate, g, args), micros=micros,
                           states=out.states)
        if args.check:
            expected = oracle.oracle_genreach(g, start_mask=start_mask)
            report.check = "ok" if expected is out.winner else "mismatch"
        return report
    if command == "max":
        res = max_value(g, args.algo)
    else:
        res = promise_value(g, args.algo)
    micros = int((time.perf_counter() - t0) * 1e6)
    report = RunReport(command, path, digest, res.algorithm, value=res.value,
                       witness=_witness(res.witness, g, args), micros=micros,
                       states=res.states)
    if args.check:
        expected = oracle.oracle_max(g) if command == "max" else oracle.oracle_promise(g)
        report.check = "ok" if expected == res.value else "mismatch"
    return report


def _emit(report: RunReport, args, timing=False) -> None:
    if args.json:
        print(json.dumps(report.as_json(), sort_keys=True))
    else:
        print(report.as_text(timing))


def cmd_run(args) -> int:
    report = run_file(args.command, args.file, args)
    _emit(report, args)
    if report.check == "mismatch":
        print("error: solver disagrees with the oracle", file=sys.stderr)
        return EXIT_MISMATCH
    k = getattr(args, "k", None)
    if k is not None and report.value < k:
        return EXIT_MISMATCH
    return EXIT_OK


def cmd_oracle(args) -> int:
    g = parse_game(_read(args.file).decode("utf-8"))
    problems = ("genreach", "max", "promise") if args.problem == "all" else (args.problem,)
    result = {}
    for p in problems:
        if p == "genreach":
            result["winner"] = str(oracle.oracle_genreach(g, start_mask=args.start_mask))
        elif p == "max":
            result["max"] = oracle.oracle_max(g, start_mask=args.start_mask)
        else:
            result["promise"] = oracle.oracle_promise(g)
    if args.json:
        print(json.dumps(result, sort_keys=True))
    else:
        for key, val in result.items():
            print(f"{key} {val}")
    return EXIT_OK


def _write_output(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_reduce(args) -> int:
    text = _read(args.input).decode("utf-8")
    if args.kind == "qbf":
        phi = reductions.parse_qdimacs(text)
        g, _ = reductions.qbf_to_game(phi)
        comment = f"qbf reduction of {Path(args.input).name}"
    elif args.kind == "cnf":
        if args.owner is None:
            raise InfeasibleParams("cnf reduction needs --owner eve|adam")
        psi = reductions.parse_dimacs_cnf(text)
        g, _ = reductions.cnf_to_game(psi, EVE if args.owner == "eve" else ADAM)
        comment = f"cnf reduction of {Path(args.input).name}, owner {args.owner}"
    elif args.kind == "st-reach":
        if args.source is None or args.sink is None:
            raise InfeasibleParams("st-reach reduction needs --source and --sink")
        h = reductions.parse_edge_graph(text)
        g, _ = reductions.streach_to_game(h, args.source - 1, args.sink - 1)
        comment = f"st-reach reduction of {Path(args.input).name}, {args.source} -> {args.sink}"
    else:
        h = reductions.parse_edge_graph(text)
        g, _ = reductions.vertex_cover_to_game(h)
        comment = f"vertex-cover reduction of {Path(args.input).name}"
    _write_output(serialize_game(g, comment), args.output)
    return EXIT_OK


def cmd_gen(args) -> int:
    g = reductions.random_game(args.vertices, args.edges, args.targets, args.large,
                               args.large_size, args.seed, args.profile)
    _write_output(serialize_game(g, f"random game, seed {args.seed}"), args.output)
    return EXIT_OK


def _bench_one(path: str, check: bool, json_mode: bool):
    # module-level so worker processes can pickle it
    ns = argparse.Namespace(algo="auto", check=check, start_mask="seeded", json=json_mode,
                            full_witness=False, fpt_cutoff=DEFAULT_FPT_CUTOFF)
    try:
        if check:
            g = parse_game(_read(path).decode("utf-8"))
            try:
                oracle.DEFAULT_BUDGET.check(g)
            except BudgetExceeded:
                ns.check = False
        return run_file("solve", path, ns), None
    except (GrgError, UnicodeDecodeError) as exc:
        return None, (exit_code_for(exc), str(exc))


def cmd_bench(args) -> int:
    root = Path(args.dir)
    if not root.is_dir():
        raise ParseError(f"{args.dir} is not a directory")
    files = sorted(str(p) for p in root.glob("*.grg"))
    t0 = time.perf_counter()
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_bench_one, files, [args.check] * len(files),
                                    [args.json] * len(files)))
    else:
        results = [_bench_one(f, args.check, args.json) for f in files]
    algos: Counter = Counter()
    mismatches = 0
    failure = EXIT_OK
    for path, (report, error) in zip(files, results):
        if error is not None:
            code, msg = error
            failure = failure or code
            if args.json:
                print(json.dumps({"command": "solve", "file": path, "error": msg,
                                  "exit": code}, sort_keys=True))
            else:
                print(f"{path}: error {msg}")
            continue
        algos[report.algo] += 1
        mismatches += report.check == "mismatch"
        if args.json:
            print(json.dumps(report.as_json(), sort_keys=True))
        else:
            check = f" check {report.check}" if report.check else ""
            print(f"{path}: winner {report.winner} algo {report.algo} "
                  f"micros {report.micros}{check}")
    total = int((time.perf_counter() - t0) * 1e6)
    summary = {"files": len(files), "micros": total, "algorithms": dict(sorted(algos.items())),
               "mismatches": mismatches}
    if args.json:
        print(json.dumps({"summary": summary}, sort_keys=True))
    else:
        per = " ".join(f"{a}={c}" for a, c in sorted(algos.items()))
        print(f"summary files {len(files)} micros {total} mismatches {mismatches} {per}".rstrip())
    if mismatches:
        return EXIT_MISMATCH
    return failure


def _positive(text: str) -> int:
    val = int(text)
    if val < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return val


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="grg", description="Generalised reachability game solver.")
    p.add_argument("-v", "--verbose", action="store_true", help="log warnings and progress")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("file")
        sp.add_argument("--check", action="store_true", help="cross-check against the oracle")
        sp.add_argument("--json", action="store_true")
        sp.add_argument("--full-witness", action="store_true")

    sp = sub.add_parser("solve", help="decide the generalised reachability game")
    common(sp)
    sp.add_argument("--algo", choices=["auto", *SOLVERS], default="auto")
    sp.add_argument("--start-mask", choices=START_MASKS, default="seeded")
    sp.add_argument("--fpt-cutoff", type=int, default=DEFAULT_FPT_CUTOFF)
    sp.set_defaults(func=cmd_run)

    for name, table in (("max", MAX_SOLVERS), ("promise", PROMISE_SOLVERS)):
        sp = sub.add_parser(name, help=f"{name} number of target sets Eve can secure")
        common(sp)
        sp.add_argument("--algo", choices=["auto", *table], default="auto")
        sp.add_argument("--k", type=int, help="exit 1 unless the value is at least K")
        sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("oracle", help="brute-force answers for small games")
    sp.add_argument("file")
    sp.add_argument("--problem", choices=["all", "genreach", "max", "promise"], default="all")
    sp.add_argument("--start-mask", choices=START_MASKS, default="seeded")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("reduce", help="build a game from a formula or graph")
    sp.add_argument("kind", choices=["qbf", "cnf", "st-reach", "vertex-cover"])
    sp.add_argument("input")
    sp.add_argument("--owner", choices=["eve", "adam"])
    sp.add_argument("--source", type=int, help="1-based source vertex")
    sp.add_argument("--sink", type=int, help="1-based sink vertex")
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_reduce)

    sp = sub.add_parser("gen", help="seeded random game")
    sp.add_argument("--vertices", type=int, required=True)
    sp.add_argument("--edges", type=int)
    sp.add_argument("--targets", type=int, default=0, help="singleton targets")
    sp.add_argument("--large", type=int, default=0, help="large target sets")
    sp.add_argument("--large-size", type=int, default=2)
    sp.add_argument("--profile", choices=["two", "eve", "adam"], default="two")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("bench", help="solve every .grg file in a directory")
    sp.add_argument("dir")
    sp.add_argument("--check", action="store_true")
    sp.add_argument("--json", action="store_true")
    sp.add_argument("--jobs", type=_positive, default=1)
    sp.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (GrgError, UnicodeDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exit_code_for(exc)


if __name__ == "__main__":
    sys.exit(main())
