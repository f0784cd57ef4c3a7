"""Command-line entry point: ``roughvol --config run.json [--mode ...]``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .errors import RoughVolError
from .runner import ConfigError, ExperimentConfig, apply_overrides, run


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="roughvol", description=__doc__)
    p.add_argument("--config", required=True, type=Path, help="JSON experiment configuration")
    p.add_argument("--mode", choices=["table", "decay", "asymptotics", "price", "selftest"],
                   help="override the configured mode")
    p.add_argument("--out", type=Path, help="output directory (overrides output.dir)")
    p.add_argument("--seed-override", type=int)
    p.add_argument("--paths-override", type=int)
    p.add_argument("--paper-scale", action="store_true",
                   help="1e7 paths and 250 steps/year per cell (very slow)")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = ExperimentConfig.load(args.config)
        cfg = apply_overrides(cfg, args.seed_override, args.paths_override, args.paper_scale, args.mode)
        if args.out is not None:
            cfg = replace(cfg, out_dir=args.out)
        manifest = run(cfg)
    except (ConfigError, RoughVolError, OSError, json.JSONDecodeError) as exc:
        print(f"roughvol: error: {exc}", file=sys.stderr)
        return 2
    print(json.dumps({k: manifest[k] for k in ("mode", "status", "summary", "outputs")}, indent=2, default=str))
    return 0 if manifest["status"] == "ok" else 1


if __name__ == "__main__":
    sys.exit(main())
