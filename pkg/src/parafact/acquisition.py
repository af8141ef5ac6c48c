"""Seed-driven acquisition of paraphrastic pattern rows from a corpus.

A seed supplies a head word and an expansion word.  Scanning runs left to
right over the plain words of each sentence: when a word is close enough
to the head and the next plain word is close enough to the expansion, and
both sit inside one chunk, and the head candidate is predicative, the pair
is recorded as a scored candidate row.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace

from . import semnet
from .corpus import Lexicon, Sentence
from .semnet import SemanticNet

TABLE_HEADER = ("SCHEMA", "ELT1", "CAT1", "ELT2", "CAT2", "SCORE", "ETQ", "OBJET", "STATUS")

STATUSES = ("proposed", "accepted", "rejected")


class TableError(Exception):
    pass


@dataclass(frozen=True)
class SeedPattern:
    head: str
    expansion: str
    etq: str
    objet: str = "$2"

    def __post_init__(self):
        if not self.head or not self.expansion:
            raise ValueError("seed head and expansion must be non-empty")


@dataclass(frozen=True, order=True)
class Provenance:
    doc_id: str
    sentence: int
    head_index: int
    exp_index: int


@dataclass(frozen=True)
class PatternRow:
    schema: str  # '+' nominal predicate, '-' verbal; analyst may override
    elt1: str
    cat1: str
    elt2: str
    cat2: str
    score: float
    etq: str
    objet: str
    status: str = "proposed"
    provenance: tuple[Provenance, ...] = ()

    @property
    def key(self) -> tuple[str, str, str, str, str]:
        return (self.elt1, self.cat1, self.elt2, self.cat2, self.etq)

    @property
    def row_id(self) -> str:
        """Stable content id; identical pairs hash alike across runs."""
        blob = "\t".join(self.key).encode("utf-8")
        return hashlib.sha1(blob).hexdigest()[:12]


@dataclass
class PatternTable:
    rows: list[PatternRow] = field(default_factory=list)

    def __iter__(self):
        return iter(self.rows)

    def __len__(self):
        return len(self.rows)

    def accepted(self) -> list[PatternRow]:
        return [r for r in self.rows if r.status == "accepted"]

    def by_id(self, row_id: str) -> PatternRow | None:
        for row in self.rows:
            if row.row_id == row_id:
                return row
        return None


def default_schema(cat1: str) -> str:
    return "+" if cat1 == "N" else "-"


def replace_status(row: PatternRow, status: str) -> PatternRow:
    if status not in STATUSES:
        raise ValueError(f"bad status {status!r}")
    return replace(row, status=status)


def predicativity_check(lemma: str, pos: str, lexicon: Lexicon) -> bool:
    """Verbs are predicates; nouns only when the lexicon flags the lemma."""
    if pos == "V":
        return True
    return pos == "N" and lexicon.lemma_is_predicative(lemma)


def acquire_sentence(
    seed: SeedPattern,
    sentence: Sentence,
    net: SemanticNet,
    threshold: float,
) -> list[PatternRow]:
    """Candidate rows contributed by one sentence (may be empty)."""
    rows: list[PatternRow] = []
    plains = sentence.plain_indices()
    for pos, i in enumerate(plains):
        wi = sentence.tokens[i]
        prox1 = semnet.proximity(net, seed.head, wi.semantic_lemma)
        if prox1 > threshold:
            continue
        if pos + 1 >= len(plains):
            continue  # no expansion candidate at sentence end
        j = plains[pos + 1]
        wj = sentence.tokens[j]
        prox2 = semnet.proximity(net, seed.expansion, wj.semantic_lemma)
        if prox2 > threshold:
            continue
        chunk = sentence.chunk_of(i)
        if chunk is None or j not in chunk:
            continue
        if not wi.predicative:
            continue
        cat1 = wi.pos
        elt1 = wi.semantic_lemma.lower()
        elt2 = wj.semantic_lemma.lower()
        rows.append(
            PatternRow(
                schema=default_schema(cat1),
                elt1=elt1,
                cat1=cat1,
                elt2=elt2,
                cat2=wj.pos,
                score=prox1 + prox2,
                etq=seed.etq,
                objet=seed.objet,
                status="proposed",
                provenance=(Provenance(sentence.doc_id, sentence.index, i, j),),
            )
        )
    return rows


def merge_rows(rows: list[PatternRow]) -> PatternTable:
    """Deduplicate on the row key, keep the minimum score, merge provenance."""
    merged: dict[tuple, PatternRow] = {}
    for row in rows:
        prev = merged.get(row.key)
        if prev is None:
            merged[row.key] = row
            continue
        prov = tuple(sorted(set(prev.provenance) | set(row.provenance)))
        merged[row.key] = replace(prev, score=min(prev.score, row.score), provenance=prov)
    ordered = sorted(merged.values(), key=lambda r: (r.score, r.key))
    return PatternTable(ordered)


def acquire_corpus(
    seed: SeedPattern,
    sentences: list[Sentence],
    net: SemanticNet,
    threshold: float,
) -> PatternTable:
    rows: list[PatternRow] = []
    for sentence in sentences:
        rows.extend(acquire_sentence(seed, sentence, net, threshold))
    return merge_rows(rows)


def format_table(table: PatternTable) -> str:
    lines = ["\t".join(TABLE_HEADER)]
    for row in table:
        lines.append(
            "\t".join(
                (
                    row.schema,
                    row.elt1,
                    row.cat1,
                    row.elt2,
                    row.cat2,
                    f"{row.score:.6f}",
                    row.etq,
                    row.objet,
                    row.status,
                )
            )
        )
    return "\n".join(lines) + "\n"


def parse_table(text: str) -> PatternTable:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        return PatternTable([])
    header = tuple(lines[0].split("\t"))
    if header != TABLE_HEADER:
        raise TableError(f"bad table header: {lines[0]!r}")
    rows = []
    seen = set()
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split("\t")
        if len(parts) != len(TABLE_HEADER):
            raise TableError(f"line {lineno}: expected {len(TABLE_HEADER)} fields")
        schema, elt1, cat1, elt2, cat2, score_s, etq, objet, status = parts
        if schema not in ("+", "-"):
            raise TableError(f"line {lineno}: bad schema {schema!r}")
        if status not in STATUSES:
            raise TableError(f"line {lineno}: bad status {status!r}")
        try:
            score = float(score_s)
        except ValueError:
            raise TableError(f"line {lineno}: bad score {score_s!r}") from None
        row = PatternRow(schema, elt1, cat1, elt2, cat2, score, etq, objet, status)
        if row.key in seen:
            raise TableError(f"line {lineno}: duplicate row {row.key}")
        seen.add(row.key)
        rows.append(row)
    return PatternTable(rows)


def write_table(table: PatternTable, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_table(table))


def read_table(path) -> PatternTable:
    with open(path, encoding="utf-8") as fh:
        return parse_table(fh.read())
