"""Command-line interface: generate, evaluate, batch, serve.

Exit codes are a stable contract: 0 on success, 1 on operational errors
(bad flags, unreadable files, transport failures), 2 when generation
completed but the completion contained no digraph — the prose outcome,
given its own code so scripts can tally it without scraping stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .client import (
    ClientError,
    HttpProvider,
    MockProvider,
    Provider,
    ProviderConfig,
    batch_generate,
    run_pipeline,
)
from .corpus import Corpus, CorpusIoError, SchemaError, ValidationError, bundled_goldens, load_corpus
from .dotio import (
    DigraphSyntaxError,
    ParseMode,
    emit_digraph,
    emit_render_dot,
    parse_digraph,
)
from .evaluate import (
    DEFAULT_THRESHOLD,
    AlignmentError,
    EvalReport,
    batch_report,
    evaluate,
)
from .model import enumerate_loops
from .prompting import NotEnoughExemplars, PreconditionViolation, Strategy
from .service import AddressInUse, BadConfig, load_service_config, serve

__all__ = ["main", "entrypoint"]

_STRATEGY_SLUGS = [s.value for s in Strategy]


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad usage; our contract reserves 2 for no-digraph."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _read_dh(spec: str) -> str:
    if spec == "-":
        return sys.stdin.read()
    return Path(spec).read_text(encoding="utf-8")


def _load_corpus_arg(path: str | None) -> Corpus:
    return load_corpus(path) if path else bundled_goldens()


def _make_provider(args) -> Provider:
    if args.provider == "mock":
        if not args.fixtures:
            raise BadConfig("--provider mock requires --fixtures <dir>")
        return MockProvider(args.fixtures)
    if not args.endpoint or not args.model:
        raise BadConfig("--provider live requires --endpoint and --model")
    return HttpProvider(ProviderConfig(endpoint=args.endpoint, model_id=args.model))


def _write_out(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        print(text)


def _add_provider_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--provider", choices=["live", "mock"], default="mock")
    sub.add_argument("--fixtures", help="mock provider fixture directory")
    sub.add_argument("--endpoint", help="live provider completion URL")
    sub.add_argument("--model", help="live provider model id")


def cmd_generate(args) -> int:
    dh = _read_dh(args.dh)
    corpus = _load_corpus_arg(args.corpus)
    provider = _make_provider(args)
    record = run_pipeline(provider, Strategy(args.strategy), dh, corpus, args.shots)
    if record.diagram is None:
        print("error: no digraph found in completion", file=sys.stderr)
        for diag in record.diagnostics:
            print(str(diag), file=sys.stderr)
        return 2
    diagram = record.diagram
    if args.format == "digraph":
        text = emit_digraph(diagram)
    elif args.format == "dot":
        text = emit_render_dot(diagram, annotate_loops=True)
    else:
        display = {v.normalized: v.raw for v in diagram.variables}
        text = json.dumps({
            "strategy": record.strategy.value,
            "dh": record.dh,
            "digraph": emit_digraph(diagram),
            "render_dot": emit_render_dot(diagram, annotate_loops=True),
            "variables": [v.raw for v in diagram.variables],
            "loops": [
                {
                    "length": lp.length,
                    "kind": lp.kind.value,
                    "members": [display[n] for n in lp.member_names],
                }
                for lp in enumerate_loops(diagram)
            ],
            "diagnostics": [str(d) for d in record.diagnostics],
            "transcripts": [[p, c] for p, c in record.stage_transcripts],
        }, indent=2)
    _write_out(text, args.out)
    return 0


def _format_table(report: EvalReport, threshold: float) -> str:
    lines = []
    for label, scores in (
        ("node", report.node),
        ("link_strict", report.link_strict),
        ("link_lenient", report.link_lenient),
    ):
        lines.append(
            f"{label:<13} precision {scores.precision:.3f}  "
            f"recall {scores.recall:.3f}  f1 {scores.f1:.3f}")
    polarity = ("undefined" if report.polarity_accuracy is None
                else f"{report.polarity_accuracy:.3f}")
    lines.append(f"polarity_accuracy {polarity}")

    def fmt(loops) -> str:
        return ", ".join(f"{n}-{k.value}" for n, k in loops) or "none"

    lines.append(f"loops generated: {fmt(report.loops_generated)}")
    lines.append(f"loops truth:     {fmt(report.loops_truth)}")
    lines.append(
        f"loop_count_match {'yes' if report.loop_count_match else 'no'}  "
        f"loop_kind_multiset_match "
        f"{'yes' if report.loop_kind_multiset_match else 'no'}")
    lines.append(f"threshold {threshold}")
    return "\n".join(lines)


def _resolve_truth(spec: str, corpus_path: str | None):
    path = Path(spec)
    if path.is_file():
        text = path.read_text(encoding="utf-8")
        diagram, _ = parse_digraph(text, ParseMode.STRICT)
        return diagram
    corpus = _load_corpus_arg(corpus_path)
    try:
        return corpus.get(spec).ground_truth
    except KeyError:
        raise BadConfig(
            f"--truth {spec!r} is neither a readable file nor a corpus item id")


def cmd_evaluate(args) -> int:
    generated_text = Path(args.generated).read_text(encoding="utf-8")
    try:
        generated, _ = parse_digraph(generated_text, ParseMode.STRICT)
    except DigraphSyntaxError as exc:
        print(f"error: invalid generated digraph: {exc}", file=sys.stderr)
        return 1
    try:
        truth = _resolve_truth(args.truth, args.corpus)
    except DigraphSyntaxError as exc:
        print(f"error: invalid truth digraph: {exc}", file=sys.stderr)
        return 1
    if not 0 < args.threshold <= 1:
        print("error: --threshold must be in (0, 1]", file=sys.stderr)
        return 1
    report = evaluate(generated, truth, args.threshold)
    if args.format == "json":
        _write_out(json.dumps(report.to_dict(), indent=2), None)
    else:
        _write_out(_format_table(report, args.threshold), None)
    return 0


def cmd_batch(args) -> int:
    corpus = _load_corpus_arg(args.corpus)
    slugs = [s.strip() for s in args.strategies.split(",") if s.strip()]
    if not slugs:
        raise BadConfig("--strategies must name at least one strategy")
    try:
        strategies = [Strategy(slug) for slug in slugs]
    except ValueError:
        raise BadConfig(
            f"unknown strategy in {args.strategies!r}; "
            f"expected from: {', '.join(_STRATEGY_SLUGS)}")
    provider = _make_provider(args)
    if not 0 < args.threshold <= 1:
        raise BadConfig("--threshold must be in (0, 1]")
    document = {}
    for strategy in strategies:
        records = batch_generate(provider, strategy, corpus, args.shots,
                                 parallelism=args.parallelism)
        document[strategy.value] = batch_report(
            records, corpus, args.threshold).to_json_dict()
    _write_out(json.dumps(document, indent=2), args.out)
    return 0


def cmd_serve(args) -> int:
    config = load_service_config(
        args.config,
        listen=args.listen,
        provider=args.provider,
        fixtures_dir=args.fixtures,
        endpoint=args.endpoint,
        model_id=args.model,
        corpus_path=args.corpus,
        threshold=args.threshold,
        shots=args.shots,
    )
    serve(config)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cldforge",
                     description="Causal loop diagrams from dynamic hypotheses")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="generate a diagram from a hypothesis")
    gen.add_argument("--dh", required=True, help="hypothesis text file, or - for stdin")
    gen.add_argument("--strategy", required=True, choices=_STRATEGY_SLUGS)
    gen.add_argument("--corpus", help="corpus JSON path (default: bundled goldens)")
    gen.add_argument("--shots", type=int, default=3)
    _add_provider_flags(gen)
    gen.add_argument("--out", help="output path (default: stdout)")
    gen.add_argument("--format", choices=["digraph", "dot", "json"], default="digraph")
    gen.set_defaults(func=cmd_generate)

    ev = sub.add_parser("evaluate", help="score a generated digraph against truth")
    ev.add_argument("--generated", required=True, help="generated digraph file")
    ev.add_argument("--truth", required=True,
                    help="truth digraph file or corpus item id")
    ev.add_argument("--corpus", help="corpus for id lookup (default: bundled)")
    ev.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    ev.add_argument("--format", choices=["json", "table"], default="table")
    ev.set_defaults(func=cmd_evaluate)

    bat = sub.add_parser("batch", help="run strategies across a corpus and report")
    bat.add_argument("--corpus", help="corpus JSON path (default: bundled goldens)")
    bat.add_argument("--strategies", default=",".join(_STRATEGY_SLUGS),
                     help="comma-separated strategy slugs")
    _add_provider_flags(bat)
    bat.add_argument("--parallelism", type=int, default=1)
    bat.add_argument("--shots", type=int, default=3)
    bat.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    bat.add_argument("--out", help="report path (default: stdout)")
    bat.set_defaults(func=cmd_batch)

    srv = sub.add_parser("serve", help="run the HTTP JSON service")
    srv.add_argument("--config", help="JSON config file (default: $CLDFORGE_CONFIG)")
    srv.add_argument("--listen", help="host:port (default 127.0.0.1:8000)")
    srv.add_argument("--provider", choices=["live", "mock"])
    srv.add_argument("--fixtures", help="mock provider fixture directory")
    srv.add_argument("--endpoint", help="live provider completion URL")
    srv.add_argument("--model", dest="model", help="live provider model id")
    srv.add_argument("--corpus", help="corpus JSON path (default: bundled goldens)")
    srv.add_argument("--threshold", type=float)
    srv.add_argument("--shots", type=int)
    srv.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (CorpusIoError, SchemaError, ValidationError, ClientError,
            BadConfig, AddressInUse, AlignmentError, NotEnoughExemplars,
            PreconditionViolation, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
