"""Batch command line: ``ftir-interrogate <recipe> [--config PATH] [--seed N] [--runs N] [--out DIR]``.

Exit codes: 0 success, 2 validation failure, 3 numerical singularity, 1 anything else.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import tempfile
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .config import DEFAULT_CONFIG_TEXT, ResolvedConfig, loads, parse_config
from .errors import InterrogationError, SingularityError
from .recipes import RECIPES

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VALIDATION = 2
EXIT_SINGULAR = 3

logger = logging.getLogger("ftir_interrogation")


def format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return f"{value:.9g}"
    return str(value)


def render_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        if len(row) != len(header):
            raise AssertionError(f"row has {len(row)} columns, header has {len(header)}")
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()


def _atomic_write(path: Path, text: str, pending: list[Path]):
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    pending.append(Path(tmp))
    with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def run_recipe(name: str, cfg: ResolvedConfig, base_seed: int, out_dir, runs: int | None = None) -> dict:
    """Run one recipe and write ``<name>.csv`` plus ``<name>.manifest.json`` into ``out_dir``.

    Both files appear only if the whole recipe succeeds.
    """
    if name not in RECIPES:
        raise InterrogationError(f"unknown recipe '{name}'")
    header, rows = RECIPES[name](cfg, base_seed, runs)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{name}.csv"
    manifest_path = out_dir / f"{name}.manifest.json"
    manifest = {
        "config_digest": cfg.digest,
        "base_seed": base_seed,
        "command": {"recipe": name, "runs": runs, "workers": cfg.workers},
        "artifact_version": __version__,
        "created_utc": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "csv": csv_path.name,
        "columns": header,
    }
    pending: list[Path] = []
    try:
        _atomic_write(csv_path, render_csv(header, rows), pending)
        _atomic_write(manifest_path, json.dumps(manifest, indent=2, sort_keys=True) + "\n", pending)
        os.replace(pending[0], csv_path)
        os.replace(pending[1], manifest_path)
    except BaseException:
        for tmp in pending:
            tmp.unlink(missing_ok=True)
        raise
    return {"csv": csv_path, "manifest": manifest_path, "header": header, "rows": rows}


def _error_prefix() -> str:
    if os.environ.get("NO_COLOR") is None and sys.stderr.isatty():
        return "\x1b[31merror:\x1b[0m"
    return "error:"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ftir-interrogate",
        description="Simulate FTIR single-photon quantum interrogation and plan the shot-noise test.",
    )
    parser.add_argument("recipe", choices=sorted(RECIPES))
    parser.add_argument("--config", type=Path, help="TOML config; built-in worked-example operating point if omitted")
    parser.add_argument("--seed", type=int, help="base seed (overrides the config; default 42)")
    parser.add_argument("--runs", type=int, help="number of Monte Carlo runs")
    parser.add_argument("--workers", type=int, help="threads for ensemble runs")
    parser.add_argument("--out", type=Path, default=Path("."), help="output directory")
    parser.add_argument("-q", "--quiet", action="store_true", help="do not print the result table")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        cfg = parse_config(args.config) if args.config else loads(DEFAULT_CONFIG_TEXT)
        if args.workers is not None:
            if args.workers < 1:
                raise InterrogationError("--workers must be >= 1")
            cfg = replace(cfg, workers=args.workers)
        seed = cfg.seed if args.seed is None else args.seed
        if not 0 <= seed < 2**64:
            raise InterrogationError("--seed must be an unsigned 64-bit integer")
        if args.runs is not None and args.runs < 1:
            raise InterrogationError("--runs must be >= 1")
        result = run_recipe(args.recipe, cfg, seed, args.out, args.runs)
    except SingularityError as exc:
        print(f"{_error_prefix()} numerical singularity: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except InterrogationError as exc:
        print(f"{_error_prefix()} {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:  # noqa: BLE001
        print(f"{_error_prefix()} {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if not args.quiet:
        _print_table(result["header"], result["rows"])
        print(f"wrote {result['csv']} (seed {seed})")
    return EXIT_OK


def _print_table(header, rows, limit: int = 12):
    if len(rows) == 1:
        width = max(len(h) for h in header)
        for key, value in zip(header, rows[0]):
            print(f"{key:<{width}}  {format_value(value)}")
        return
    print(",".join(header))
    for row in rows[:limit]:
        print(",".join(format_value(v) for v in row))
    if len(rows) > limit:
        print(f"... {len(rows) - limit} more rows")


if __name__ == "__main__":
    sys.exit(main())
