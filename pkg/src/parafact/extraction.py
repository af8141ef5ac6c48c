"""Run a compiled graph over analyzed sentences and emit slot fillers."""

from __future__ import annotations

from dataclasses import dataclass

from . import metagraph
from .corpus import Sentence
from .metagraph import CompiledGraph

RECORDS_HEADER = ("DOC", "SENT", "SLOT", "FILLER", "PATTERN_ROW", "MATCH_START", "MATCH_END")


@dataclass(frozen=True)
class ExtractionRecord:
    doc_id: str
    sentence: int
    slot: str
    filler: str
    filler_span: tuple[int, int]
    pattern_row: str
    match_span: tuple[int, int]


def normalize_filler(sentence: Sentence, span: tuple[int, int]) -> str:
    """Lowercased filler text with determiners stripped; entities verbatim."""
    parts = []
    for token in sentence.tokens[span[0] : span[1]]:
        if token.pos == "D":
            continue
        if token.entity_class:
            parts.append(token.surface)
        else:
            parts.append(token.surface.lower())
    return " ".join(parts)


def extract(
    graph: CompiledGraph,
    sentences: list[Sentence],
    slot_map: dict[str, str] | None = None,
) -> list[ExtractionRecord]:
    """Leftmost-longest non-overlapping matches, one record per match.

    ``slot_map`` translates a row's slot label (ETQ) to a reporting slot
    such as arg1/arg2/arg3; unmapped labels pass through unchanged.
    """
    slot_map = slot_map or {}
    records: list[ExtractionRecord] = []
    for sentence in sorted(sentences, key=lambda s: (s.doc_id, s.index)):
        for match in metagraph.scan(graph, sentence.tokens):
            row_id = match.row_ids[0]
            etq = graph.rows[row_id].etq
            records.append(
                ExtractionRecord(
                    doc_id=sentence.doc_id,
                    sentence=sentence.index,
                    slot=slot_map.get(etq, etq),
                    filler=normalize_filler(sentence, match.capture),
                    filler_span=match.capture,
                    pattern_row=row_id,
                    match_span=(match.start, match.end),
                )
            )
    return records


def dedupe_per_document(records: list[ExtractionRecord]) -> list[ExtractionRecord]:
    """One record per (doc, slot, filler), keeping the earliest match."""
    ordered = sorted(records, key=lambda r: (r.doc_id, r.sentence, r.match_span[0]))
    seen: set[tuple[str, str, str]] = set()
    out = []
    for record in ordered:
        key = (record.doc_id, record.slot, record.filler)
        if key in seen:
            continue
        seen.add(key)
        out.append(record)
    return out


def format_records(records: list[ExtractionRecord]) -> str:
    lines = ["\t".join(RECORDS_HEADER)]
    for r in records:
        lines.append(
            "\t".join(
                (
                    r.doc_id,
                    str(r.sentence),
                    r.slot,
                    r.filler,
                    r.pattern_row,
                    str(r.match_span[0]),
                    str(r.match_span[1]),
                )
            )
        )
    return "\n".join(lines) + "\n"


def parse_records(text: str) -> list[ExtractionRecord]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        return []
    if tuple(lines[0].split("\t")) != RECORDS_HEADER:
        raise ValueError(f"bad records header: {lines[0]!r}")
    out = []
    for line in lines[1:]:
        doc, sent, slot, filler, row, start, end = line.split("\t")
        out.append(
            ExtractionRecord(
                doc, int(sent), slot, filler, (int(start), int(end)), row, (int(start), int(end))
            )
        )
    return out
