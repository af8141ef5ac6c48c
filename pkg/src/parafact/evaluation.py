"""Slot-level scoring against gold annotations, plus miss diagnosis.

Scoring is exact-match on normalized fillers per (document, slot).  Misses
are classified by cause: the semantic net lacks the links that would have
acquired a suitable pattern, or the pattern's words are present but none of
the compiled syntactic transformations covers the sentence.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import metagraph, semnet
from .acquisition import PatternTable
from .corpus import Sentence
from .extraction import ExtractionRecord
from .metagraph import CompiledGraph
from .semnet import SemanticNet

GOLD_HEADER = ("DOC", "SLOT", "FILLER")

CAUSE_NET_GAP = "net-gap"
CAUSE_TRANSFORMATION_GAP = "transformation-gap"
CAUSE_OTHER = "other"


@dataclass(frozen=True)
class GoldAnnotation:
    doc_id: str
    slot: str
    filler: str


@dataclass(frozen=True)
class SlotScore:
    slot: str
    tp: int
    fp: int
    fn: int

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if (self.tp + self.fp) else 0.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if (self.tp + self.fn) else 0.0

    @property
    def f(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if (p + r) else 0.0


@dataclass(frozen=True)
class MissReport:
    doc_id: str
    sentence: int
    slot: str
    filler: str
    cause: str


def parse_gold(text: str) -> list[GoldAnnotation]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        return []
    if tuple(lines[0].split("\t")) != GOLD_HEADER:
        raise ValueError(f"bad gold header: {lines[0]!r}")
    out = []
    for line in lines[1:]:
        doc, slot, filler = line.split("\t")
        out.append(GoldAnnotation(doc, slot, filler))
    return out


def evaluate(
    records: list[ExtractionRecord], gold: list[GoldAnnotation]
) -> dict[str, SlotScore]:
    """Per-slot precision/recall/F over exact (doc, slot, filler) matches."""
    predicted = {(r.doc_id, r.slot, r.filler) for r in records}
    reference = {(g.doc_id, g.slot, g.filler) for g in gold}
    slots = sorted({k[1] for k in predicted | reference})
    scores = {}
    for slot in slots:
        p = {k for k in predicted if k[1] == slot}
        g = {k for k in reference if k[1] == slot}
        scores[slot] = SlotScore(slot, tp=len(p & g), fp=len(p - g), fn=len(g - p))
    return scores


def totals(scores: dict[str, SlotScore]) -> SlotScore:
    return SlotScore(
        "ALL",
        tp=sum(s.tp for s in scores.values()),
        fp=sum(s.fp for s in scores.values()),
        fn=sum(s.fn for s in scores.values()),
    )


def misses(records: list[ExtractionRecord], gold: list[GoldAnnotation]) -> list[GoldAnnotation]:
    predicted = {(r.doc_id, r.slot, r.filler) for r in records}
    return [g for g in gold if (g.doc_id, g.slot, g.filler) not in predicted]


def _filler_in_sentence(sentence: Sentence, filler: str) -> bool:
    words = set(filler.lower().split())
    surfaces = {t.surface.lower() for t in sentence.tokens}
    return words <= surfaces


def _pair_occurs(row, sentence: Sentence) -> bool:
    lemmas = {t.semantic_lemma.lower() for t in sentence.tokens if t.plain}
    return row.elt1 in lemmas and row.elt2 in lemmas


def _row_reachable(row, sentence: Sentence, net: SemanticNet, threshold: float) -> bool:
    plains = sentence.plain_indices()
    for a, b in zip(plains, plains[1:]):
        wa = sentence.tokens[a].semantic_lemma
        wb = sentence.tokens[b].semantic_lemma
        if (
            semnet.proximity(net, row.elt1, wa) <= threshold
            and semnet.proximity(net, row.elt2, wb) <= threshold
        ):
            return True
    return False


def classify_misses(
    fn_records: list[GoldAnnotation],
    table: PatternTable,
    net: SemanticNet,
    threshold: float,
    compiled: CompiledGraph,
    sentences: list[Sentence],
) -> list[MissReport]:
    """Diagnose each false negative against the accepted patterns."""
    accepted = table.accepted()
    by_doc: dict[str, list[Sentence]] = {}
    for sentence in sentences:
        by_doc.setdefault(sentence.doc_id, []).append(sentence)

    reports = []
    for miss in fn_records:
        candidates = [
            s for s in by_doc.get(miss.doc_id, ()) if _filler_in_sentence(s, miss.filler)
        ]
        if not candidates:
            reports.append(MissReport(miss.doc_id, -1, miss.slot, miss.filler, CAUSE_OTHER))
            continue
        sentence = candidates[0]
        if any(_pair_occurs(row, sentence) for row in accepted):
            cause = CAUSE_TRANSFORMATION_GAP
        elif not any(_row_reachable(row, sentence, net, threshold) for row in accepted):
            cause = CAUSE_NET_GAP
        else:
            cause = CAUSE_OTHER
        reports.append(MissReport(miss.doc_id, sentence.index, miss.slot, miss.filler, cause))
    return reports


def format_scores(scores: dict[str, SlotScore]) -> str:
    lines = ["SLOT\tTP\tFP\tFN\tP\tR\tF"]
    for slot in sorted(scores):
        s = scores[slot]
        lines.append(
            f"{s.slot}\t{s.tp}\t{s.fp}\t{s.fn}\t{s.precision:.4f}\t{s.recall:.4f}\t{s.f:.4f}"
        )
    t = totals(scores)
    lines.append(f"{t.slot}\t{t.tp}\t{t.fp}\t{t.fn}\t{t.precision:.4f}\t{t.recall:.4f}\t{t.f:.4f}")
    return "\n".join(lines) + "\n"


def format_miss_reports(reports: list[MissReport]) -> str:
    lines = ["DOC\tSENT\tSLOT\tCAUSE"]
    for r in reports:
        lines.append(f"{r.doc_id}\t{r.sentence}\t{r.slot}\t{r.cause}")
    return "\n".join(lines) + "\n"
