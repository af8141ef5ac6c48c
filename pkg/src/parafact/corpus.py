"""Corpus ingestion: tokenization, lemmatization, entity normalization, chunks.

The analysis is deliberately shallow: a lexicon file supplies lemma/POS,
a gazetteer maps proper names to entity class variables, and chunks are
computed by a regular rule over POS tags.  Everything here is a pure
function of its inputs, so documents can be analyzed in parallel.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from pathlib import Path

POS_TAGS = ("N", "V", "A", "D", "P", "X")

#: Sentence-terminal punctuation.
_TERMINALS = {".", "!", "?", "…"}


class LexiconError(Exception):
    pass


@dataclass(frozen=True)
class LexiconEntry:
    surface: str
    lemma: str
    pos: str
    predicative: bool = False


@dataclass(frozen=True)
class Lexicon:
    """Surface-indexed lexicon; lookups are case-folded."""

    by_surface: dict[str, tuple[LexiconEntry, ...]]
    predicative_lemmas: frozenset[str]
    forms_by_lemma: dict[tuple[str, str], tuple[str, ...]]  # (lemma, pos) -> surfaces

    def lookup(self, surface: str) -> tuple[LexiconEntry, ...]:
        return self.by_surface.get(surface.lower(), ())

    def forms(self, lemma: str, pos: str) -> tuple[str, ...]:
        """All surfaces the lexicon maps to (lemma, pos), lowercased."""
        return self.forms_by_lemma.get((lemma.lower(), pos), ())

    def lemma_is_predicative(self, lemma: str) -> bool:
        return lemma.lower() in self.predicative_lemmas


def load_lexicon(text: str) -> Lexicon:
    """Parse a tab-separated lexicon: surface, lemma, POS, optional 'pred'."""
    by_surface: dict[str, list[LexiconEntry]] = {}
    pred: set[str] = set()
    forms: dict[tuple[str, str], list[str]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) not in (3, 4):
            raise LexiconError(f"line {lineno}: expected 3 or 4 tab-separated fields")
        surface, lemma, pos = parts[0].strip(), parts[1].strip(), parts[2].strip()
        if pos not in POS_TAGS:
            raise LexiconError(f"line {lineno}: unknown POS {pos!r}")
        predicative = False
        if len(parts) == 4:
            flag = parts[3].strip()
            if flag and flag != "pred":
                raise LexiconError(f"line {lineno}: unknown flag {flag!r}")
            predicative = flag == "pred"
        entry = LexiconEntry(surface, lemma.lower(), pos, predicative)
        by_surface.setdefault(surface.lower(), []).append(entry)
        if predicative:
            pred.add(lemma.lower())
        key = (lemma.lower(), pos)
        if surface.lower() not in forms.setdefault(key, []):
            forms[key].append(surface.lower())
    return Lexicon(
        {s: tuple(es) for s, es in by_surface.items()},
        frozenset(pred),
        {k: tuple(sorted(v)) for k, v in forms.items()},
    )


def load_lexicon_file(path) -> Lexicon:
    return load_lexicon(Path(path).read_text(encoding="utf-8"))


def load_stopwords(text: str) -> frozenset[str]:
    return frozenset(
        line.strip().lower()
        for line in text.splitlines()
        if line.strip() and not line.lstrip().startswith("#")
    )


def load_gazetteer(text: str) -> dict[str, str]:
    gaz: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        parts = raw.rstrip("\n").split("\t")
        if len(parts) != 2:
            raise LexiconError(f"line {lineno}: expected surface<TAB>class")
        gaz[parts[0].strip()] = parts[1].strip()
    return gaz


@dataclass(frozen=True)
class Token:
    surface: str
    lemma: str
    pos: str
    plain: bool
    entity_class: str | None = None
    predicative: bool = False
    is_word: bool = True
    raw: str = ""      # original text span (entity tokens keep the real name)
    sep: str = ""      # separator preceding the token in the source text

    @property
    def semantic_lemma(self) -> str:
        """Lemma used against the semantic net; entity class for entities."""
        return self.entity_class if self.entity_class else self.lemma


@dataclass(frozen=True)
class Chunk:
    start: int
    end: int  # half-open
    kind: str  # NP or VP

    def __contains__(self, index: int) -> bool:
        return self.start <= index < self.end


@dataclass(frozen=True)
class Sentence:
    doc_id: str
    index: int
    tokens: tuple[Token, ...]
    chunks: tuple[Chunk, ...]
    trailing: str = ""

    def plain_indices(self) -> list[int]:
        return [i for i, t in enumerate(self.tokens) if t.plain]

    def chunk_of(self, index: int) -> Chunk | None:
        for chunk in self.chunks:
            if index in chunk:
                return chunk
        return None


_ENTITY_RE = r"\*[^\s*]+\*"
_ELISION_RE = r"(?:[ldnmtsjcç]|qu|jusqu|lorsqu|puisqu)['’]"
_WORD_RE = r"[\w][\w-]*"
_TOKEN_RE = re.compile(
    f"(?P<ENT>{_ENTITY_RE})|(?P<EL>{_ELISION_RE})|(?P<W>{_WORD_RE})|(?P<P>\\S)",
    re.IGNORECASE | re.UNICODE,
)


def _scan(text: str) -> list[tuple[str, str, bool]]:
    """Raw token stream: (sep, surface, is_word)."""
    out = []
    pos = 0
    for m in _TOKEN_RE.finditer(text):
        sep = text[pos : m.start()]
        is_word = m.lastgroup != "P"
        out.append((sep, m.group(), is_word))
        pos = m.end()
    return out


def normalize_entities(tokens: list[Token], gazetteer: dict[str, str]) -> list[Token]:
    """Longest-match replacement of gazetteer names by entity-class tokens."""
    if not gazetteer:
        return list(tokens)
    keys = {tuple(k.split()): cls for k, cls in gazetteer.items()}
    max_len = max(len(k) for k in keys)
    out: list[Token] = []
    i = 0
    while i < len(tokens):
        hit = None
        for span in range(min(max_len, len(tokens) - i), 0, -1):
            cand = tuple(t.surface for t in tokens[i : i + span])
            if cand in keys:
                hit = (span, keys[cand])
                break
        if hit:
            span, cls = hit
            surface = f"*{cls}*"
            raw = "".join(
                (t.sep if j else "") + t.raw for j, t in enumerate(tokens[i : i + span])
            )
            out.append(
                Token(
                    surface=surface,
                    lemma=surface,
                    pos="N",
                    plain=True,
                    entity_class=cls,
                    is_word=True,
                    raw=raw,
                    sep=tokens[i].sep,
                )
            )
            i += span
        else:
            out.append(tokens[i])
            i += 1
    return out


def _annotate(token: Token, lexicon: Lexicon, stopwords: frozenset[str]) -> Token:
    if token.entity_class:
        return replace(token, pos="N", lemma=token.surface, plain=True)
    if not token.is_word:
        return replace(token, pos="X", lemma=token.surface, plain=False)
    entries = lexicon.lookup(token.surface)
    if entries:
        entry = entries[0]  # file order decides ambiguous surfaces
        lemma, pos = entry.lemma, entry.pos
    else:
        lemma, pos = token.surface, "X"
    plain = pos not in ("D", "P") and token.surface.lower() not in stopwords
    predicative = pos == "V" or (pos == "N" and lexicon.lemma_is_predicative(lemma))
    return replace(token, lemma=lemma, pos=pos, plain=plain, predicative=predicative)


def _noun_run(tokens, i):
    """Maximal (A|N)* run starting at i that contains at least one noun."""
    j = i
    seen_noun = False
    while j < len(tokens) and tokens[j].pos in ("A", "N"):
        seen_noun = seen_noun or tokens[j].pos == "N"
        j += 1
    return j if seen_noun else i


def _np_end(tokens, i):
    """End of the NP starting at i, or i when no NP starts here.

    Shape: D? (A|N)*N A* followed by any number of P D? (A|N)*N A* groups.
    """
    j = i
    if j < len(tokens) and tokens[j].pos == "D":
        j += 1
    k = _noun_run(tokens, j)
    if k == j:
        return i
    j = k
    while j < len(tokens) and tokens[j].pos == "P":
        k = j + 1
        if k < len(tokens) and tokens[k].pos == "D":
            k += 1
        m = _noun_run(tokens, k)
        if m == k:
            break
        j = m
    return j


def _verb_cluster_end(tokens, i):
    """End of a verb cluster: V tokens linked by at most two P tokens."""
    if i >= len(tokens) or tokens[i].pos != "V":
        return i
    j = i + 1
    while j < len(tokens):
        if tokens[j].pos == "V":
            j += 1
            continue
        k = j
        while k < len(tokens) and tokens[k].pos == "P" and k - j < 2:
            k += 1
        if k > j and k < len(tokens) and tokens[k].pos == "V":
            j = k + 1
            continue
        break
    return j


def _chunk(tokens: tuple[Token, ...]) -> tuple[Chunk, ...]:
    chunks: list[Chunk] = []
    i = 0
    n = len(tokens)
    while i < n:
        if tokens[i].pos == "V":
            j = _verb_cluster_end(tokens, i)
            # Absorb a following complement unless it opens with a determiner:
            # determiner-initial noun phrases stand alone as NP chunks.
            k = j
            if k < n and tokens[k].pos == "P":
                k += 1
            if k < n and tokens[k].pos in ("A", "N"):
                end = _np_end(tokens, k)
                if end > k:
                    chunks.append(Chunk(i, end, "VP"))
                    i = end
                    continue
            chunks.append(Chunk(i, j, "VP"))
            i = j
        else:
            end = _np_end(tokens, i)
            if end > i:
                chunks.append(Chunk(i, end, "NP"))
                i = end
            else:
                i += 1
    return tuple(chunks)


def analyze(
    text: str,
    lexicon: Lexicon,
    gazetteer: dict[str, str] | None = None,
    stopwords: frozenset[str] = frozenset(),
    doc_id: str = "",
) -> list[Sentence]:
    """Split, tokenize, normalize and chunk one document."""
    gazetteer = gazetteer or {}
    raw_tokens = []
    for sep, surface, is_word in _scan(text):
        entity = None
        if is_word and surface.startswith("*") and surface.endswith("*"):
            entity = surface[1:-1]
        raw_tokens.append(
            Token(
                surface=surface,
                lemma=surface,
                pos="X",
                plain=is_word,
                entity_class=entity,
                is_word=is_word,
                raw=surface,
                sep=sep,
            )
        )
    merged = normalize_entities(raw_tokens, gazetteer)
    annotated = [_annotate(t, lexicon, stopwords) for t in merged]

    sentences: list[Sentence] = []
    start = 0
    for i, tok in enumerate(annotated):
        if not tok.is_word and tok.surface in _TERMINALS:
            group = tuple(annotated[start : i + 1])
            sentences.append(Sentence(doc_id, len(sentences), group, _chunk(group)))
            start = i + 1
    if start < len(annotated):
        group = tuple(annotated[start:])
        sentences.append(Sentence(doc_id, len(sentences), group, _chunk(group)))

    if sentences:
        consumed = sum(len(t.sep) + len(t.raw) for s in sentences for t in s.tokens)
        sentences[-1] = replace(sentences[-1], trailing=text[consumed:])
    return sentences


def reconstruct(text_sentences: list[Sentence]) -> str:
    """Inverse of analyze at the byte level (uses raw spans and separators)."""
    parts = []
    for sentence in text_sentences:
        for tok in sentence.tokens:
            parts.append(tok.sep)
            parts.append(tok.raw)
        parts.append(sentence.trailing)
    return "".join(parts)


def load_corpus(directory) -> list[tuple[str, str]]:
    """All .txt documents in a directory as (doc_id, text), sorted by id."""
    docs = []
    for path in sorted(Path(directory).glob("*.txt")):
        docs.append((path.stem, path.read_text(encoding="utf-8")))
    return docs


def analyze_corpus(
    directory,
    lexicon: Lexicon,
    gazetteer: dict[str, str] | None = None,
    stopwords: frozenset[str] = frozenset(),
) -> list[Sentence]:
    sentences: list[Sentence] = []
    for doc_id, text in load_corpus(directory):
        sentences.extend(analyze(text, lexicon, gazetteer, stopwords, doc_id=doc_id))
    return sentences
