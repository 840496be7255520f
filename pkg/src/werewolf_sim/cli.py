"""``werewolf-sim`` command line: run, analyze, replay, validate.

Exit codes:

    0  success
    2  usage error (argparse)
    3  configuration or input error
    4  one or more games aborted (backend failure)
    5  schema / log integrity violation
    6  replay does not match the log's final snapshot
    7  log is truncated or the game never finished (partial replay)
    8  I/O failure
"""

from __future__ import annotations

import argparse
import hashlib
import logging
import sys
import time
from pathlib import Path

from werewolf_sim.config import build_run_spec
from werewolf_sim.errors import ConfigError, ReplayError
from werewolf_sim.eventlog import dumps
from werewolf_sim.metrics.loader import find_run_dir, load_run
from werewolf_sim.metrics.report import ReportError, build_report, figure_csv, render
from werewolf_sim.replay import first_divergence, replay_file
from werewolf_sim.runner import run_games
from werewolf_sim.schema import validate_dir, validate_file

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_BACKEND = 4
EXIT_SCHEMA = 5
EXIT_MISMATCH = 6
EXIT_PARTIAL = 7
EXIT_IO = 8


def _err(msg: str) -> None:
    print(f"werewolf-sim: {msg}", file=sys.stderr)


def cmd_run(args: argparse.Namespace) -> int:
    spec = build_run_spec(
        games=args.games,
        mode=args.mode,
        seed=args.seed,
        out_dir=args.out,
        config_file=args.config,
        parallelism=args.parallelism,
        overwrite=args.overwrite,
        run_id=args.run_id,
        game_overrides={"alpha": args.alpha, "max_rounds": args.max_rounds},
        log_prompts=False if args.no_prompt_log else None,
    )
    start = time.perf_counter()
    run_dir, results = run_games(spec)
    for r in results:
        print(r.summary())
    aborted = sum(r.aborted for r in results)
    print(f"{len(results)} games in {time.perf_counter() - start:.2f}s, {aborted} aborted; logs in {run_dir}")
    return EXIT_BACKEND if aborted else EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    path = Path(args.logs_dir)
    if not path.exists():
        raise ConfigError(f"{path} does not exist")
    if path.is_file():
        count, violations = 1, validate_file(path)
    else:
        count, violations = validate_dir(path)
    for v in violations:
        print(v)
    print(f"{count} files checked, {len(violations)} violations")
    if count == 0:
        raise ConfigError(f"no *.ndjson logs under {path}")
    return EXIT_SCHEMA if violations else EXIT_OK


def cmd_analyze(args: argparse.Namespace) -> int:
    try:
        run_dir = find_run_dir(args.logs_dir)
    except FileNotFoundError as exc:
        raise ConfigError(str(exc)) from None
    count, violations = validate_dir(run_dir)
    if violations:
        for v in violations:
            print(v, file=sys.stderr)
        _err(f"{len(violations)} schema violations; refusing to analyze")
        return EXIT_SCHEMA
    if count == 0:
        raise ConfigError(f"no logs in {run_dir}")
    manifest, games = load_run(run_dir)
    report = build_report(manifest, games)
    text = render(report, args.format)
    if args.out is None:
        sys.stdout.write(text)
    else:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding="utf-8")
        print(f"report written to {out}")
    figure = Path(args.figure) if args.figure else (Path(args.out).with_suffix(".figure1.csv") if args.out else None)
    if figure is not None:
        figure.parent.mkdir(parents=True, exist_ok=True)
        figure.write_text(figure_csv(report["trends"]), encoding="utf-8")
        print(f"figure data written to {figure}")
    return EXIT_OK


def _digest(result, name: str) -> list[str]:
    st, D = result.state, result.matrix
    alive = ",".join(p.id for p in st.players if p.alive)
    matrix_hash = hashlib.sha256(dumps(D.to_list()).encode("utf-8")).hexdigest()[:16]
    winner = st.winner.value if st.winner is not None else "-"
    return [
        f"game {name} seed={st.config.seed} records={result.last_seq} round={st.round} phase={st.phase.value} winner={winner}",
        f"alive: {alive}",
        f"suspicion matrix sha256: {matrix_hash}",
    ]


def cmd_replay(args: argparse.Namespace) -> int:
    path = Path(args.log_file)
    if not path.is_file():
        raise ConfigError(f"{path} is not a file")
    try:
        result, _bad, trailing = replay_file(path)
    except ReplayError as exc:
        where = f" (seq {exc.seq})" if exc.seq is not None else ""
        _err(f"replay failed{where}: {exc}")
        return EXIT_SCHEMA
    if result.state is None:
        _err("log contains no GameStarted record")
        return EXIT_SCHEMA
    for line in _digest(result, path.stem):
        print(line)
    if trailing or not result.complete:
        why = "truncated final line" if trailing else ("game aborted" if result.aborted else "no VictoryDeclared record")
        print(f"PARTIAL replay through seq {result.last_seq}: {why}")
        if result.divergences:
            print(f"first divergence: {result.divergences[0]}")
        return EXIT_PARTIAL
    divergence = first_divergence(result)
    if divergence is not None:
        print(f"MISMATCH first divergence: {divergence}")
        return EXIT_MISMATCH
    print("OK replay matches final snapshot")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="werewolf-sim", description="Werewolf social-deduction simulator")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="play games and write NDJSON logs plus a manifest")
    run.add_argument("--games", type=int, required=True)
    run.add_argument("--mode", choices=["mock", "llm"], default="mock")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--out", default="runs")
    run.add_argument("--config", help="TOML config file ([game], [backend], [logging])")
    run.add_argument("--parallelism", type=int, default=1)
    run.add_argument("--overwrite", action="store_true", help="allow a non-empty output directory")
    run.add_argument("--run-id")
    run.add_argument("--alpha", type=float)
    run.add_argument("--max-rounds", type=int)
    run.add_argument("--no-prompt-log", action="store_true", help="log prompt hashes only")
    run.set_defaults(func=cmd_run)

    analyze = sub.add_parser("analyze", help="validate a run and build the metrics report")
    analyze.add_argument("logs_dir")
    analyze.add_argument("--format", choices=["markdown", "csv", "json"], default="markdown")
    analyze.add_argument("--out", help="report file (stdout if omitted)")
    analyze.add_argument("--figure", help="suspicion-by-round CSV (default: next to --out)")
    analyze.set_defaults(func=cmd_analyze)

    rep = sub.add_parser("replay", help="rebuild state from a log and compare with its final snapshot")
    rep.add_argument("log_file")
    rep.set_defaults(func=cmd_replay)

    val = sub.add_parser("validate", help="schema-check every log line")
    val.add_argument("logs_dir")
    val.set_defaults(func=cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, ReportError) as exc:
        _err(str(exc))
        return EXIT_CONFIG
    except OSError as exc:
        _err(f"I/O error: {exc}")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
