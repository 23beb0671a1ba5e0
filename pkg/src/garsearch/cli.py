"""Batch command-line entry points.

Subcommands mirror the library one-to-one: index, search, generate, fuse,
eval, compare, oov, serve. Usage errors exit 2 before any side effect;
runtime failures exit 1 with a one-line `garsearch: error: ...` diagnostic
on stderr. Output files are written to a temp name and atomically renamed
so interrupted runs never leave torn files.
"""

from __future__ import annotations

import argparse
import base64
import json
import os
import sys

from .embedding import build_store, load_store, read_text_vectors, serialize_store
from .errors import GarError
from .evaluation import (
    EvalConfig,
    compare_runs,
    evaluate_run,
    render_comparison_tsv,
    render_report_json,
    render_report_tsv,
)
from .fusion import FusionSpec, fuse_runs
from .generation.concept_bank import detect_oov, load_concept_bank
from .generation.fixtures import tv24_mock_backend
from .generation.http import HttpGeneratorBackend
from .generation.mocks import load_substitutions, mock_backend
from .generation.variants import GeneratorConfig, generate_variants
from .pipeline import ALL_CHANNELS, PipelineConfig, run_gar
from .trec_io import parse_qrels, parse_topics, read_run, write_run

PROG = "garsearch"


def _fail(message: str) -> int:
    print(f"{PROG}: error: {message}", file=sys.stderr)
    return 1


def _atomic_write(path: str, data: bytes) -> None:
    tmp = f"{path}.tmp-{os.getpid()}"
    with open(tmp, "wb") as fh:
        fh.write(data)
    os.replace(tmp, path)


def _read(path: str) -> bytes:
    with open(path, "rb") as fh:
        return fh.read()


def _channel_out_path(out: str, channel: str) -> str:
    root, ext = os.path.splitext(out)
    return f"{root}.{channel}{ext}" if ext else f"{out}.{channel}"


def _build_backend(args) -> object:
    if getattr(args, "generator_url", ""):
        return HttpGeneratorBackend(args.generator_url)
    substitutions = load_substitutions(args.substitutions) if getattr(args, "substitutions", None) else None
    if substitutions is not None or not getattr(args, "tv24_fixtures", True):
        return mock_backend(dim=args.dim, substitutions=substitutions)
    return tv24_mock_backend(dim=args.dim)


def cmd_index_build(args) -> int:
    records, dim = read_text_vectors(_read(args.input))
    store = build_store(records, dim)
    _atomic_write(args.out, serialize_store(store))
    print(f"wrote {args.out}: {len(store)} vectors, dim {store.dim}, checksum {store.checksum:#018x}")
    return 0


def cmd_search(args) -> int:
    store = load_store(args.store)
    topics = parse_topics(_read(args.topics))
    if args.dim != store.dim:
        args = argparse.Namespace(**{**vars(args), "dim": store.dim})
    backend = _build_backend(args)
    bank = load_concept_bank(args.concepts) if args.concepts else None
    channels = tuple(args.channels.split(","))
    cfg = PipelineConfig(
        run_tag=args.tag,
        channels=channels,
        k=args.k,
        generator=GeneratorConfig(
            n_t2t=args.n_t2t, n_images=args.n_images, seed=args.seed,
            channels=frozenset(channels) & {"t2t", "t2i", "i2t"},
        ),
        fusion=FusionSpec(normalization=args.norm, cutoff=args.k),
    )
    result = run_gar(topics, cfg, store, backend, bank)
    _atomic_write(args.out, write_run(result.fused))
    written = [args.out]
    for channel, run in sorted(result.channels.items()):
        path = _channel_out_path(args.out, channel)
        _atomic_write(path, write_run(run))
        written.append(path)
    for warning in result.warnings:
        print(f"{PROG}: warning: {warning}", file=sys.stderr)
    print(f"wrote {', '.join(written)} ({len(topics)} topics)")
    return 0


def cmd_generate(args) -> int:
    topics = parse_topics(_read(args.topics))
    backend = _build_backend(args)
    bank = load_concept_bank(args.concepts) if args.concepts else None
    cfg = GeneratorConfig(n_t2t=args.n_t2t, n_images=args.n_images, seed=args.seed)
    out = []
    for topic in topics:
        variants = generate_variants(topic, cfg, backend, bank)
        out.append({
            "topic_id": topic.topic_id,
            "text": topic.text,
            "t2t_texts": list(variants.t2t_texts),
            "t2i_images": [
                {
                    "png_base64": base64.b64encode(img.data).decode("ascii"),
                    "provenance_prompt": img.provenance_prompt,
                    "seed": img.seed,
                }
                for img in variants.t2i_images
            ],
            "i2t_captions": list(variants.i2t_captions),
            "oov": sorted(detect_oov(topic.text, bank)) if bank else [],
            "warnings": list(variants.warnings),
        })
    payload = json.dumps(out, indent=2, ensure_ascii=False).encode("utf-8") + b"\n"
    if args.out:
        _atomic_write(args.out, payload)
        print(f"wrote {args.out} ({len(out)} topics)")
    else:
        sys.stdout.buffer.write(payload)
    return 0


def cmd_fuse(args) -> int:
    runs = [read_run(_read(path)) for path in args.runs]
    weights = None
    if args.weights:
        weights = tuple(float(w) for w in args.weights.split(","))
    spec = FusionSpec(weights=weights, normalization=args.norm, cutoff=args.k)
    fused = fuse_runs(runs, spec, args.tag)
    _atomic_write(args.out, write_run(fused))
    print(f"wrote {args.out} ({len(fused.lists)} topics from {len(runs)} runs)")
    return 0


def cmd_eval(args) -> int:
    run = read_run(_read(args.run))
    qrels = parse_qrels(_read(args.qrels))
    report = evaluate_run(run, qrels, EvalConfig(epsilon=args.epsilon), metric=args.metric)
    rendered = render_report_json(report) if args.json else render_report_tsv(report)
    if args.report:
        _atomic_write(args.report, rendered.encode("utf-8"))
    else:
        sys.stdout.write(rendered)
    metric_name = "xinfAP" if report.metric == "xinfap" else "AP"
    print(f"mean {metric_name} {report.mean:.6f}")
    return 0


def cmd_compare(args) -> int:
    runs = [read_run(_read(path)) for path in args.runs]
    qrels = parse_qrels(_read(args.qrels))
    cfg = EvalConfig(epsilon=args.epsilon)
    reports = [evaluate_run(run, qrels, cfg, metric=args.metric) for run in runs]
    comparison = compare_runs(reports, runs, depth=args.depth)
    rendered = render_comparison_tsv(comparison)
    if args.out:
        _atomic_write(args.out, rendered.encode("utf-8"))
    else:
        sys.stdout.write(rendered)
    return 0


def cmd_oov(args) -> int:
    bank = load_concept_bank(args.concepts)
    terms = sorted(detect_oov(args.query, bank))
    print(" ".join(terms) if terms else "(none)")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service.app import create_app_from_config
    from .service.config import load_config

    config = load_config(args.config)
    app = create_app_from_config(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=PROG,
        description="Generation-augmented retrieval for ad-hoc video search.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_index = sub.add_parser("index", help="embedding store maintenance")
    index_sub = p_index.add_subparsers(dest="index_command", required=True)
    p_build = index_sub.add_parser("build", help="build a binary store from text vectors")
    p_build.add_argument("--input", required=True, help="text vectors: `shot_id v1 v2 ...` per line")
    p_build.add_argument("--out", required=True, help="output .gar store path")
    p_build.set_defaults(func=cmd_index_build)

    p_search = sub.add_parser("search", help="run the retrieval pipeline over topics")
    p_search.add_argument("--store", required=True)
    p_search.add_argument("--topics", required=True)
    p_search.add_argument("--channels", default="original,t2t,t2i,i2t",
                          help="comma-separated subset of original,t2t,t2i,i2t")
    p_search.add_argument("--mock", action="store_true",
                          help="use the deterministic mock generator stack")
    p_search.add_argument("--generator-url", default="", help="generator service base URL")
    p_search.add_argument("--concepts", default="", help="concept bank file (for OOV/t2t context)")
    p_search.add_argument("--substitutions", default="", help="JSON phrase->replacement table for the mock rewriter")
    p_search.add_argument("--k", type=int, default=1000)
    p_search.add_argument("--norm", default="minmax", choices=["minmax", "none", "rank"])
    p_search.add_argument("--tag", required=True)
    p_search.add_argument("--seed", type=int, default=0)
    p_search.add_argument("--dim", type=int, default=256, help="mock embedder dimensionality")
    p_search.add_argument("--n-t2t", type=int, default=1)
    p_search.add_argument("--n-images", type=int, default=4)
    p_search.add_argument("--out", required=True)
    p_search.set_defaults(func=cmd_search)

    p_generate = sub.add_parser("generate", help="emit query variants as JSON")
    p_generate.add_argument("--topics", required=True)
    p_generate.add_argument("--mock", action="store_true")
    p_generate.add_argument("--generator-url", default="")
    p_generate.add_argument("--concepts", default="")
    p_generate.add_argument("--substitutions", default="")
    p_generate.add_argument("--seed", type=int, default=0)
    p_generate.add_argument("--dim", type=int, default=256)
    p_generate.add_argument("--n-t2t", type=int, default=1)
    p_generate.add_argument("--n-images", type=int, default=4)
    p_generate.add_argument("--out", default="")
    p_generate.set_defaults(func=cmd_generate)

    p_fuse = sub.add_parser("fuse", help="fuse run files with linear combination")
    p_fuse.add_argument("--runs", nargs="+", required=True)
    p_fuse.add_argument("--weights", default="", help="comma-separated, one per run")
    p_fuse.add_argument("--norm", default="minmax", choices=["minmax", "none", "rank"])
    p_fuse.add_argument("--k", type=int, default=1000)
    p_fuse.add_argument("--tag", default="fused")
    p_fuse.add_argument("--out", required=True)
    p_fuse.set_defaults(func=cmd_fuse)

    p_eval = sub.add_parser("eval", help="score a run against stratified qrels")
    p_eval.add_argument("--run", required=True)
    p_eval.add_argument("--qrels", required=True)
    p_eval.add_argument("--metric", default="xinfap", choices=["xinfap", "ap"])
    p_eval.add_argument("--epsilon", type=float, default=1e-5)
    p_eval.add_argument("--report", default="", help="write TSV/JSON report here")
    p_eval.add_argument("--json", action="store_true", help="render the report as JSON")
    p_eval.set_defaults(func=cmd_eval)

    p_compare = sub.add_parser("compare", help="compare evaluated runs")
    p_compare.add_argument("--runs", nargs="+", required=True)
    p_compare.add_argument("--qrels", required=True)
    p_compare.add_argument("--metric", default="xinfap", choices=["xinfap", "ap"])
    p_compare.add_argument("--epsilon", type=float, default=1e-5)
    p_compare.add_argument("--depth", type=int, default=1000)
    p_compare.add_argument("--out", default="")
    p_compare.set_defaults(func=cmd_compare)

    p_oov = sub.add_parser("oov", help="report query terms missing from a concept bank")
    p_oov.add_argument("--concepts", required=True)
    p_oov.add_argument("--query", required=True)
    p_oov.set_defaults(func=cmd_oov)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--config", required=True, help="TOML config file")
    p_serve.set_defaults(func=cmd_serve)

    return parser


def _validate_usage(parser: argparse.ArgumentParser, args) -> None:
    """Usage-level checks that must exit 2 before any side effect."""
    if args.command == "fuse" and args.weights:
        n_weights = len(args.weights.split(","))
        if n_weights != len(args.runs):
            parser.error(f"{n_weights} weights for {len(args.runs)} runs")
    if args.command == "search":
        channels = args.channels.split(",")
        bad = set(channels) - set(ALL_CHANNELS)
        if bad or not channels:
            parser.error(f"invalid --channels value {args.channels!r}")
        if not args.mock and not args.generator_url and set(channels) != {"original"}:
            parser.error("generation channels need --mock or --generator-url")
    if args.command == "generate" and not args.mock and not args.generator_url:
        parser.error("generate needs --mock or --generator-url")


def run_cli(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _validate_usage(parser, args)
    try:
        return args.func(args)
    except GarError as exc:
        return _fail(str(exc))
    except OSError as exc:
        return _fail(str(exc))
    except ValueError as exc:
        return _fail(str(exc))


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
