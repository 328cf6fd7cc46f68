"""Command line entry point.

    sciatlas <subcommand> --config pipeline.json [flags]

Stage subcommands (ingest, cluster, label, layout, build, export, all) run
the pipeline against checkpoint files under the configured output directory;
overlay projects a subset/metric onto the built base map; validate checks a
bundle; fetch-citations pulls citation links from a remote endpoint;
make-fixture writes a synthetic corpus; serve starts the HTTP service.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__, corpus as corpus_mod, export, pipeline, synthgen
from .config import ConfigError, OverlayJob, PipelineConfig

logger = logging.getLogger(__name__)

STAGE_COMMANDS = ("ingest", "cluster", "label", "layout", "build", "export", "all")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sciatlas",
        description="Hierarchical base maps of science with overlay projections.")
    parser.add_argument("--version", action="version", version=f"sciatlas {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, needs_config=True):
        p.add_argument("--config", required=needs_config,
                       help="pipeline configuration JSON")
        p.add_argument("--seed", type=int, help="override config seed")
        p.add_argument("--threads", type=int, help="override config thread count")
        p.add_argument("--force", action="store_true",
                       help="run even over stale checkpoints")
        p.add_argument("--output-dir", help="override config output_dir")
        p.add_argument("--viewer-assets",
                       help="directory with built viewer assets to copy into bundles")

    for name in STAGE_COMMANDS:
        p = sub.add_parser(name, help=f"run the {name} stage" if name != "all"
                           else "run every stage in order")
        add_common(p)

    p = sub.add_parser("overlay", help="project an overlay onto the base map")
    add_common(p)
    p.add_argument("--name", help="overlay name (default: derived from mode)")
    p.add_argument("--mode", choices=("subset_size", "metric_color", "cited_by"),
                   help="projection mode (omit to run overlays from the config)")
    p.add_argument("--subset", help="subset.txt path (subset_size / cited_by)")
    p.add_argument("--metric", help="metric.tsv path or 'oa_status' (metric_color)")
    p.add_argument("--year-max", type=int, help="cited_by: drop cited publications "
                   "published after this year")

    p = sub.add_parser("validate", help="validate a map bundle directory")
    p.add_argument("bundle", help="bundle directory")

    p = sub.add_parser("fetch-citations", help="fetch citation links over HTTP")
    p.add_argument("--ids", required=True, help="file with one publication id per line")
    p.add_argument("--endpoint", required=True, help="citation API base URL")
    p.add_argument("--out", required=True, help="citations.tsv output path")
    p.add_argument("--rate-limit", type=float, default=3.0, help="requests per second")
    p.add_argument("--batch-size", type=int, default=corpus_mod.FETCH_BATCH_SIZE)

    p = sub.add_parser("make-fixture", help="write a synthetic planted corpus")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scale", choices=("smoke", "tiny"), default="smoke",
                   help="smoke: ~10k publications; tiny: a few hundred")

    p = sub.add_parser("serve", help="serve bundles and the viewer over HTTP")
    p.add_argument("--workspace", required=True,
                   help="directory containing bundle output directories")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--viewer-assets", help="built viewer assets directory")

    return parser


def _load_config(args) -> PipelineConfig:
    config = PipelineConfig.from_file(args.config)
    if args.seed is not None:
        config.seed = args.seed
    if getattr(args, "threads", None) is not None:
        config.threads = args.threads
    if getattr(args, "output_dir", None):
        config.output_dir = str(Path(args.output_dir).resolve())
    return config


def _print_report(report) -> None:
    print(json.dumps(report, indent=1, sort_keys=True, default=str))


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)

    try:
        if args.command in STAGE_COMMANDS:
            config = _load_config(args)
            report = pipeline.run_stage(config, args.command, force=args.force,
                                        viewer_assets=args.viewer_assets)
            _print_report(report)
            return 0

        if args.command == "overlay":
            config = _load_config(args)
            if args.mode:
                job = OverlayJob(
                    name=args.name or args.mode,
                    mode=args.mode,
                    subset=args.subset,
                    metric=args.metric,
                    year_max=args.year_max,
                )
                jobs = [job]
            else:
                jobs = config.overlays
                if not jobs:
                    print("no overlays configured and no --mode given", file=sys.stderr)
                    return 2
            for job in jobs:
                _print_report(pipeline.run_overlay(config, job, force=args.force,
                                                   viewer_assets=args.viewer_assets))
            return 0

        if args.command == "validate":
            report = export.validate_bundle(args.bundle)
            _print_report(report)
            return 0 if report["ok"] else 1

        if args.command == "fetch-citations":
            ids = [line.strip() for line in Path(args.ids).read_text("utf-8").splitlines()
                   if line.strip()]
            written = corpus_mod.fetch_citations_remote(
                ids, args.endpoint, args.out, rate_limit=args.rate_limit,
                batch_size=args.batch_size)
            _print_report({"edges_written": written, "out": args.out})
            return 0

        if args.command == "make-fixture":
            spec = synthgen.SynthSpec()
            if args.scale == "tiny":
                spec = synthgen.SynthSpec(
                    n_areas=2, disciplines_per_area=2, specialties_per_discipline=2,
                    topics_per_specialty=3, pubs_per_topic=14,
                    cites_same_topic=4, cites_same_specialty=2,
                    p_cite_same_discipline=1.0, p_cite_same_area=0.3,
                    p_cite_anywhere=0.05)
            counts = synthgen.write_fixture(args.out, spec, seed=args.seed)
            _print_report(counts)
            return 0

        if args.command == "serve":
            import uvicorn

            from .service.app import create_app

            app = create_app(args.workspace, viewer_assets=args.viewer_assets)
            uvicorn.run(app, host=args.host, port=args.port, log_level="info")
            return 0

    except (ConfigError, pipeline.StageError, corpus_mod.CorpusError,
            export.ExportError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    return 2


if __name__ == "__main__":
    sys.exit(main())
