"""Command-line entry points for the whole pipeline.

Subcommands mirror the processing stages: net validation, acquisition,
batch validation, compilation, extraction, evaluation, and the HTTP
service.  Exit codes: 0 success, 1 usage, 2 data error, 3 internal.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import acquisition, artifact, corpus, evaluation, extraction, metagraph, semnet
from .acquisition import SeedPattern, TableError
from .artifact import Artifact, ArtifactError
from .corpus import LexiconError
from .metagraph import CompileError, InstantiationError, MetaGraphError
from .semnet import NetError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3

_DATA_ERRORS = (
    NetError,
    LexiconError,
    TableError,
    MetaGraphError,
    InstantiationError,
    CompileError,
    ArtifactError,
    FileNotFoundError,
    NotADirectoryError,
    ValueError,
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _read(path) -> str:
    return Path(path).read_text(encoding="utf-8")


def _parse_seed(text: str) -> SeedPattern:
    parts = text.split("/")
    if len(parts) != 4:
        raise ValueError(f"seed must be head/expansion/etq/objet, got {text!r}")
    return SeedPattern(*parts)


def _load_analysis(args) -> tuple[corpus.Lexicon, frozenset[str], dict[str, str]]:
    lexicon = corpus.load_lexicon(_read(args.lexicon))
    stopwords = corpus.load_stopwords(_read(args.stopwords)) if args.stopwords else frozenset()
    gazetteer = corpus.load_gazetteer(_read(args.gazetteer)) if args.gazetteer else {}
    return lexicon, stopwords, gazetteer


def cmd_net_validate(args) -> int:
    net = semnet.load_net_file(args.net_file)
    print(f"ok: {len(net.nodes)} nodes, {len(net.relations)} relations, "
          f"{len(net.lexicon)} lexicon entries")
    return EXIT_OK


def cmd_acquire(args) -> int:
    net = semnet.load_net_file(args.net)
    lexicon, stopwords, gazetteer = _load_analysis(args)
    seed = _parse_seed(args.seed)
    if args.threshold < 0:
        raise ValueError("threshold must be >= 0")
    sentences = corpus.analyze_corpus(args.corpus, lexicon, gazetteer, stopwords)
    table = acquisition.acquire_corpus(seed, sentences, net, args.threshold)
    acquisition.write_table(table, args.out)
    print(f"proposed {len(table)} candidate rows -> {args.out}")
    return EXIT_OK


def cmd_decide(args) -> int:
    table = acquisition.read_table(args.table)
    wanted: dict[str, str] = {}
    for row_id in args.accept or []:
        wanted[row_id] = "accepted"
    for row_id in args.reject or []:
        if row_id in wanted:
            raise ValueError(f"id {row_id} both accepted and rejected")
        wanted[row_id] = "rejected"
    if args.accept_all:
        for row in table:
            wanted.setdefault(row.row_id, "accepted")
    known = {row.row_id for row in table}
    unknown = sorted(set(wanted) - known)
    if unknown:
        raise ValueError(f"unknown candidate ids: {', '.join(unknown)}")
    rows = [
        acquisition.replace_status(row, wanted[row.row_id]) if row.row_id in wanted else row
        for row in table
    ]
    updated = acquisition.PatternTable(rows)
    acquisition.write_table(updated, args.table)
    accepted = sum(1 for r in updated if r.status == "accepted")
    rejected = sum(1 for r in updated if r.status == "rejected")
    if args.export_accepted:
        export = acquisition.PatternTable(updated.accepted())
        acquisition.write_table(export, args.export_accepted)
    print(f"table now has {accepted} accepted, {rejected} rejected rows")
    return EXIT_OK


def cmd_compile(args) -> int:
    metas = metagraph.parse_metagraphs(_read(args.metagraphs))
    table = acquisition.read_table(args.table)
    lexicon_text = _read(args.lexicon)
    lexicon = corpus.load_lexicon(lexicon_text)
    graph = metagraph.compile_graphs(metas, table, lexicon)
    art = Artifact(
        graph=graph,
        lexicon_text=lexicon_text,
        stopwords_text=_read(args.stopwords) if args.stopwords else "",
        gazetteer_text=_read(args.gazetteer) if args.gazetteer else "",
        slotmap_text=_read(args.slot_map) if args.slot_map else "",
    )
    artifact.write(art, args.out)
    if args.stats:
        n_states, n_transitions = metagraph.stats(graph)
        print(f"states={n_states} transitions={n_transitions}")
    return EXIT_OK


def cmd_extract(args) -> int:
    art = artifact.read(args.graph)
    sentences = corpus.analyze_corpus(
        args.corpus, art.lexicon(), art.gazetteer(), art.stopwords()
    )
    records = extraction.extract(art.graph, sentences, art.slot_map())
    Path(args.out).write_text(extraction.format_records(records), encoding="utf-8")
    print(f"extracted {len(records)} records -> {args.out}")
    return EXIT_OK


def cmd_eval(args) -> int:
    records = extraction.dedupe_per_document(extraction.parse_records(_read(args.records)))
    gold = evaluation.parse_gold(_read(args.gold))
    scores = evaluation.evaluate(records, gold)
    sys.stdout.write(evaluation.format_scores(scores))
    if args.classify_misses:
        for flag in ("graph", "table", "net", "corpus"):
            if getattr(args, flag) is None:
                raise ValueError(f"--classify-misses requires --{flag}")
        if args.threshold is None:
            raise ValueError("--classify-misses requires --threshold")
        art = artifact.read(args.graph)
        table = acquisition.read_table(args.table)
        net = semnet.load_net_file(args.net)
        sentences = corpus.analyze_corpus(
            args.corpus, art.lexicon(), art.gazetteer(), art.stopwords()
        )
        fn = evaluation.misses(records, gold)
        reports = evaluation.classify_misses(fn, table, net, args.threshold, art.graph, sentences)
        text = evaluation.format_miss_reports(reports)
        sys.stdout.write(text)
        if args.miss_out:
            Path(args.miss_out).write_text(text, encoding="utf-8")
    return EXIT_OK


def resolve_service_config(
    data_flag: str | None, listen_flag: str | None, env: dict[str, str]
) -> tuple[str, str, int]:
    """Flags win over PARAFACT_DATA_DIR / PARAFACT_LISTEN, then defaults."""
    from .service import DEFAULT_DATA_DIR, DEFAULT_LISTEN

    data_dir = data_flag or env.get("PARAFACT_DATA_DIR", DEFAULT_DATA_DIR)
    listen = listen_flag or env.get("PARAFACT_LISTEN", DEFAULT_LISTEN)
    host, _, port_s = listen.partition(":")
    try:
        port = int(port_s) if port_s else 8737
    except ValueError:
        raise ValueError(f"bad listen address {listen!r}") from None
    return data_dir, host or "127.0.0.1", port


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app
    from .workbench import Workbench

    net = semnet.load_net_file(args.net)
    lexicon, stopwords, gazetteer = _load_analysis(args)
    sentences = corpus.analyze_corpus(args.corpus, lexicon, gazetteer, stopwords)
    data_dir, host, port = resolve_service_config(args.data, args.listen, dict(os.environ))
    wb = Workbench(data_dir, net, sentences)
    app = create_app(wb, frontend_dir=args.frontend)
    uvicorn.run(app, host=host, port=port, log_level="warning")
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="parafact", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_net = sub.add_parser("net", help="semantic net utilities")
    net_sub = p_net.add_subparsers(dest="net_command", required=True)
    p_validate = net_sub.add_parser("validate", help="parse and validate a net file")
    p_validate.add_argument("net_file")
    p_validate.set_defaults(func=cmd_net_validate)

    p_acq = sub.add_parser("acquire", help="acquire candidate pattern rows from a corpus")
    p_acq.add_argument("--net", required=True)
    p_acq.add_argument("--corpus", required=True)
    p_acq.add_argument("--lexicon", required=True)
    p_acq.add_argument("--stopwords")
    p_acq.add_argument("--gazetteer")
    p_acq.add_argument("--seed", required=True, help="head/expansion/etq/objet")
    p_acq.add_argument("--threshold", required=True, type=float)
    p_acq.add_argument("--out", required=True)
    p_acq.set_defaults(func=cmd_acquire)

    p_dec = sub.add_parser("decide", help="accept or reject candidate rows in a table")
    p_dec.add_argument("--table", required=True)
    p_dec.add_argument("--accept", nargs="*", metavar="ID")
    p_dec.add_argument("--reject", nargs="*", metavar="ID")
    p_dec.add_argument("--accept-all", action="store_true")
    p_dec.add_argument("--export-accepted", metavar="FILE")
    p_dec.set_defaults(func=cmd_decide)

    p_comp = sub.add_parser("compile", help="compile meta-graphs against an accepted table")
    p_comp.add_argument("--metagraphs", required=True)
    p_comp.add_argument("--table", required=True)
    p_comp.add_argument("--lexicon", required=True)
    p_comp.add_argument("--stopwords")
    p_comp.add_argument("--gazetteer")
    p_comp.add_argument("--slot-map")
    p_comp.add_argument("--out", required=True)
    p_comp.add_argument("--stats", action="store_true")
    p_comp.set_defaults(func=cmd_compile)

    p_ext = sub.add_parser("extract", help="run a compiled graph over a corpus")
    p_ext.add_argument("--graph", required=True)
    p_ext.add_argument("--corpus", required=True)
    p_ext.add_argument("--out", required=True)
    p_ext.set_defaults(func=cmd_extract)

    p_eval = sub.add_parser("eval", help="score extraction records against gold annotations")
    p_eval.add_argument("--records", required=True)
    p_eval.add_argument("--gold", required=True)
    p_eval.add_argument("--classify-misses", action="store_true")
    p_eval.add_argument("--graph")
    p_eval.add_argument("--table")
    p_eval.add_argument("--net")
    p_eval.add_argument("--corpus")
    p_eval.add_argument("--threshold", type=float)
    p_eval.add_argument("--miss-out")
    p_eval.set_defaults(func=cmd_eval)

    p_serve = sub.add_parser("serve", help="start the validation workbench service")
    p_serve.add_argument("--net", required=True)
    p_serve.add_argument("--corpus", required=True)
    p_serve.add_argument("--lexicon", required=True)
    p_serve.add_argument("--stopwords")
    p_serve.add_argument("--gazetteer")
    p_serve.add_argument("--data", help="state directory (default $PARAFACT_DATA_DIR or ./data)")
    p_serve.add_argument("--listen", help="host:port (default $PARAFACT_LISTEN or 127.0.0.1:8737)")
    p_serve.add_argument("--frontend", help="directory with built UI assets to serve at /")
    p_serve.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except _DATA_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except KeyboardInterrupt:
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001  (diagnose, don't crash)
        print(f"internal error: {exc.__class__.__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
