"""Shared plumbing for the experiment scripts."""

import argparse
import logging
import time

from intermap.harness import build_config, run


def parser(description: str) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--out", default="results")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--seed", type=int, default=12345)
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def execute(args, stem=None, **raw):
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    raw.update(out=args.out, workers=args.workers, seed=args.seed)
    config = build_config({k: str(v) for k, v in raw.items() if v is not None})
    start = time.perf_counter()
    table = run(config)
    path = table.write(config.out, stem=stem)
    print(f"wrote {path} ({len(table.rows)} rows, {time.perf_counter() - start:.1f} s)")
    return table
