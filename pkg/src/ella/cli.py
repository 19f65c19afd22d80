"""Command-line entry points: serve, index, mine, eval."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import load_config, resolve_config_path
from .errors import EllaError


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except EllaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ella", description="Legal consultation engine")
    subparsers = parser.add_subparsers(dest="command", required=True)

    serve = subparsers.add_parser("serve", help="run the HTTP consultation service")
    serve.add_argument("--config", type=Path, help="config file (env ELLA_CONFIG overrides)")
    serve.set_defaults(handler=cmd_serve)

    index = subparsers.add_parser("index", help="load corpora and report index statistics")
    index.add_argument("--config", type=Path, help="config file (env ELLA_CONFIG overrides)")
    index.set_defaults(handler=cmd_index)

    mine = subparsers.add_parser("mine", help="mine contrastive training pairs")
    mine.add_argument("--config", type=Path, help="config file (env ELLA_CONFIG overrides)")
    mine.add_argument("--in", dest="input_path", type=Path, required=True, help="query file")
    mine.add_argument("--out", dest="output_path", type=Path, required=True, help="pair file")
    mine.set_defaults(handler=cmd_mine)

    evaluate = subparsers.add_parser("eval", help="score a retrieval run against qrels")
    evaluate.add_argument("--run", type=Path, required=True)
    evaluate.add_argument("--qrels", type=Path, required=True)
    evaluate.add_argument("--k", default="10,20,30", help="comma-separated cutoffs")
    evaluate.add_argument("--model", default="run", help="row label in the report")
    evaluate.add_argument(
        "--report-dir", type=Path, help="also write ndcg.tsv and ndcg.png here"
    )
    evaluate.set_defaults(handler=cmd_eval)

    return parser


def _load_config(args: argparse.Namespace):
    return load_config(resolve_config_path(args.config))


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import ConsultEngine, create_app

    config = _load_config(args)
    engine = ConsultEngine(config)
    app = create_app(engine, static_dir=config.static_dir)
    uvicorn.run(app, host=config.listen_host, port=config.listen_port, log_level="info")
    return 0


def cmd_index(args: argparse.Namespace) -> int:
    from .article_retrieval import ArticleRetriever
    from .bm25 import Bm25Params
    from .case_retrieval import build_case_store
    from .corpus import load_corpus
    from .embedding import ROLE_CASE_RETRIEVER, ROLE_GROUNDER, EmbeddingClient, EmbeddingProviderRef

    config = _load_config(args)
    bundle = load_corpus(config.articles_path, config.interpretations_path, config.cases_path)
    grounder_client = EmbeddingClient(
        EmbeddingProviderRef(ROLE_GROUNDER, config.grounder_endpoint, config.embedding_dimension)
    )
    case_client = EmbeddingClient(
        EmbeddingProviderRef(
            ROLE_CASE_RETRIEVER, config.case_retriever_endpoint, config.embedding_dimension
        )
    )
    try:
        retriever = ArticleRetriever(
            bundle, grounder_client, config.retrieval, Bm25Params(config.bm25_k1, config.bm25_b)
        )
        case_store = build_case_store(bundle, case_client)
    finally:
        grounder_client.close()
        case_client.close()
    print(f"articles: {len(bundle.articles)}")
    print(f"interpretations: {len(bundle.interpretations)}")
    print(f"cases: {len(bundle.cases)}")
    print(f"article backend: {config.retrieval.article_backend}")
    print(f"case vectors: {len(case_store)} x {case_store.dimension}")
    del retriever
    return 0


def cmd_mine(args: argparse.Namespace) -> int:
    from .corpus import load_corpus
    from .pair_mining import run_mining

    config = _load_config(args)
    bundle = load_corpus(config.articles_path, config.interpretations_path, config.cases_path)
    report = run_mining(args.input_path, args.output_path, bundle)
    print(f"inputs: {report.inputs}")
    print(f"pairs: {report.pairs}")
    print(f"skipped: {report.skipped}")
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    from .evaluation import evaluate_run, format_report, load_qrels, load_run

    try:
        ks = tuple(int(part) for part in args.k.split(",") if part.strip())
    except ValueError:
        print(f"error: invalid --k value {args.k!r}", file=sys.stderr)
        return 2
    if not ks or any(k < 1 for k in ks):
        print(f"error: invalid --k value {args.k!r}", file=sys.stderr)
        return 2
    run = load_run(args.run)
    qrels = load_qrels(args.qrels)
    results = evaluate_run(run, qrels, ks)
    rows = [(args.model, results)]
    print(format_report(rows, ks))
    if args.report_dir is not None:
        from .reporting import write_report_files

        tsv_path, figure_path = write_report_files(args.report_dir, rows, ks)
        print(f"wrote {tsv_path}")
        print(f"wrote {figure_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
