"""Syntactic-variation templates compiled into one token automaton.

A meta-graph is an abstract automaton over token predicates, guarded by
column tests on pattern rows.  Instantiating a meta-graph against a row
replaces the abstract slots by the row's inflected surfaces; compiling
takes the union of every instantiation, determinizes it over predicate
labels, and keeps per-state provenance so a match can be traced back to
the row that produced it.

Predicates available in templates:

``lit <word>``   literal surface (case-folded)
``pos <T>``      POS test, T in {N, V, A, D, P, X}
``mod``          modifier token (POS A); loops encode free insertion
``@ELT1``        any inflected surface of the row's first element
``@ELT2``        any inflected surface of the row's second element
``@OBJ``         slot filler: an entity token or a noun group anchored at
                 the element the row's OBJET column designates; must carry
                 a ``capture`` declaration
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .acquisition import PatternRow, PatternTable
from .corpus import POS_TAGS, Lexicon, Token

GUARD_COLUMNS = ("SCHEMA", "ELT1", "CAT1", "ELT2", "CAT2", "ETQ", "OBJET")

STRUCTURES = ("subject-verb", "verb-dobj", "verb-iobj", "noun-poss")

FORMAT_VERSION = "parafact-graph 1"


class MetaGraphError(Exception):
    """Template file or template validation problem."""


class InstantiationError(Exception):
    """A row cannot be instantiated (typically a lemma missing from the lexicon)."""


class CompileError(Exception):
    pass


@dataclass(frozen=True)
class Sym:
    """A concrete transition label; equality drives determinization."""

    kind: str  # lit | pos | mod | forms | objnp
    payload: tuple = ()
    capture: str | None = None

    def canonical(self) -> str:
        if self.kind == "lit":
            return f"lit={self.payload[0]}"
        if self.kind == "pos":
            return f"pos={self.payload[0]}"
        if self.kind == "mod":
            return "mod"
        if self.kind == "forms":
            lemma, surfaces = self.payload
            return f"forms={lemma}:{','.join(surfaces)}"
        if self.kind == "objnp":
            lemma, surfaces = self.payload
            return f"objnp={self.capture}:{lemma}:{','.join(surfaces)}"
        raise ValueError(self.kind)


def parse_sym(text: str) -> Sym:
    if text == "mod":
        return Sym("mod")
    kind, _, rest = text.partition("=")
    if kind == "lit":
        return Sym("lit", (rest,))
    if kind == "pos":
        return Sym("pos", (rest,))
    if kind == "forms":
        lemma, _, surf = rest.partition(":")
        return Sym("forms", (lemma, tuple(surf.split(","))))
    if kind == "objnp":
        objet, _, rest2 = rest.partition(":")
        lemma, _, surf = rest2.partition(":")
        return Sym("objnp", (lemma, tuple(surf.split(","))), capture=objet)
    raise ValueError(f"bad symbol {text!r}")


# --- templates -------------------------------------------------------------

@dataclass(frozen=True)
class TemplatePredicate:
    kind: str  # lit | pos | mod | elt1 | elt2 | obj
    arg: str = ""


@dataclass
class MetaGraph:
    id: str
    structure: str
    guard: dict[str, frozenset[str]]
    transitions: list[tuple[int, int, TemplatePredicate]]
    captures: dict[tuple[int, int], str]  # (src, dst) -> objet label
    accepts: frozenset[int]
    states: frozenset[int]


_HEADER_RE = re.compile(
    r"^graph\s+(\S+)\s+structure\s+(\S+)(?:\s+guard\s+(\S+))?\s*$"
)
_TRANS_RE = re.compile(r"^(\d+)\s*->\s*(\d+)\s*:\s*(.+?)\s*$")
_CAPTURE_RE = re.compile(r"^capture\s+(\S+)\s+on\s+(\d+)\s*->\s*(\d+)\s*$")
_ACCEPT_RE = re.compile(r"^accept\s+(\d+)\s*$")


def _parse_predicate(text: str, lineno: int) -> TemplatePredicate:
    parts = text.split()
    if parts == ["mod"]:
        return TemplatePredicate("mod")
    if parts == ["@ELT1"]:
        return TemplatePredicate("elt1")
    if parts == ["@ELT2"]:
        return TemplatePredicate("elt2")
    if parts == ["@OBJ"]:
        return TemplatePredicate("obj")
    if len(parts) == 2 and parts[0] == "lit":
        return TemplatePredicate("lit", parts[1].lower())
    if len(parts) == 2 and parts[0] == "pos":
        if parts[1] not in POS_TAGS:
            raise MetaGraphError(f"line {lineno}: unknown POS {parts[1]!r}")
        return TemplatePredicate("pos", parts[1])
    raise MetaGraphError(f"line {lineno}: unknown predicate {text!r}")


def _parse_guard(text: str, lineno: int) -> dict[str, frozenset[str]]:
    guard: dict[str, frozenset[str]] = {}
    for clause in text.split(","):
        col, eq, val = clause.partition("=")
        if not eq or not val:
            raise MetaGraphError(f"line {lineno}: bad guard clause {clause!r}")
        if col not in GUARD_COLUMNS:
            raise MetaGraphError(f"line {lineno}: unknown column {col!r} in guard")
        guard[col] = frozenset(val.split("|"))
    return guard


def parse_metagraphs(text: str) -> list[MetaGraph]:
    graphs: list[MetaGraph] = []
    current: dict | None = None

    def finish():
        if current is None:
            return
        graphs.append(_validate(current))

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = _HEADER_RE.match(line)
        if m:
            finish()
            gid, structure, guard_s = m.groups()
            if structure not in STRUCTURES:
                raise MetaGraphError(f"line {lineno}: unknown structure {structure!r}")
            current = {
                "id": gid,
                "structure": structure,
                "guard": _parse_guard(guard_s, lineno) if guard_s else {},
                "transitions": [],
                "captures": {},
                "accepts": set(),
                "line": lineno,
            }
            continue
        if current is None:
            raise MetaGraphError(f"line {lineno}: statement outside a graph block")
        m = _TRANS_RE.match(line)
        if m:
            src, dst = int(m.group(1)), int(m.group(2))
            pred = _parse_predicate(m.group(3), lineno)
            current["transitions"].append((src, dst, pred))
            continue
        m = _CAPTURE_RE.match(line)
        if m:
            objet, src, dst = m.group(1), int(m.group(2)), int(m.group(3))
            key = (src, dst)
            if key in current["captures"]:
                raise MetaGraphError(f"line {lineno}: duplicate capture on {src}->{dst}")
            current["captures"][key] = objet
            continue
        m = _ACCEPT_RE.match(line)
        if m:
            current["accepts"].add(int(m.group(1)))
            continue
        raise MetaGraphError(f"line {lineno}: cannot parse {raw!r}")
    finish()
    return graphs


def _validate(block: dict) -> MetaGraph:
    gid = block["id"]
    transitions = block["transitions"]
    captures = dict(block["captures"])
    accepts = frozenset(block["accepts"])
    states = {0} | {s for s, d, _ in transitions} | {d for s, d, _ in transitions} | set(accepts)

    if not accepts:
        raise MetaGraphError(f"graph {gid}: no accept state")
    obj_edges = {(s, d) for s, d, p in transitions if p.kind == "obj"}
    for key in captures:
        if key not in obj_edges:
            raise MetaGraphError(f"graph {gid}: capture on {key[0]}->{key[1]} without an @OBJ transition")
    for key in obj_edges:
        if key not in captures:
            raise MetaGraphError(f"graph {gid}: @OBJ transition {key[0]}->{key[1]} lacks a capture")

    _check_single_capture(gid, transitions, captures, accepts)

    return MetaGraph(
        id=gid,
        structure=block["structure"],
        guard=block["guard"],
        transitions=transitions,
        captures=captures,
        accepts=accepts,
        states=frozenset(states),
    )


def _check_single_capture(gid, transitions, captures, accepts) -> None:
    """Every path from state 0 to an accept state crosses exactly one capture."""
    adj: dict[int, list[tuple[int, int]]] = {}
    for src, dst, pred in transitions:
        weight = 1 if (src, dst) in captures and pred.kind == "obj" else 0
        adj.setdefault(src, []).append((dst, weight))

    # A capture inside a cycle would allow unbounded captures on one path.
    def reaches(a: int, b: int) -> bool:
        stack, seen = [a], set()
        while stack:
            cur = stack.pop()
            if cur == b:
                return True
            if cur in seen:
                continue
            seen.add(cur)
            stack.extend(d for d, _ in adj.get(cur, ()))
        return False

    for (src, dst), _objet in captures.items():
        if reaches(dst, src):
            raise MetaGraphError(f"graph {gid}: capture {src}->{dst} lies on a cycle")

    # Min/max captures along any path 0 -> accept; cycles carry weight 0.
    INF = float("inf")
    lo = {s: INF for s in {0} | set(adj) | {d for v in adj.values() for d, _ in v} | set(accepts)}
    hi = {s: -INF for s in lo}
    for a in accepts:
        lo[a], hi[a] = 0, 0
    for _ in range(len(lo) + 1):  # relaxation; capture weights are acyclic
        changed = False
        for src, edges in adj.items():
            for dst, w in edges:
                if dst not in lo:
                    continue
                if w + lo[dst] < lo[src]:
                    lo[src] = w + lo[dst]
                    changed = True
                if hi[dst] != -INF and w + hi[dst] > hi[src]:
                    hi[src] = w + hi[dst]
                    changed = True
        if not changed:
            break
    if lo.get(0, INF) is INF:
        raise MetaGraphError(f"graph {gid}: no path from the start to an accept state")
    if lo[0] != 1 or hi[0] != 1:
        raise MetaGraphError(
            f"graph {gid}: accepting paths must carry exactly one capture "
            f"(found between {lo[0]} and {hi[0]})"
        )


# --- instantiation ----------------------------------------------------------

@dataclass(frozen=True)
class RowMeta:
    row_id: str
    schema: str
    elt1: str
    cat1: str
    elt2: str
    cat2: str
    etq: str
    objet: str


def _row_meta(row: PatternRow) -> RowMeta:
    return RowMeta(row.row_id, row.schema, row.elt1, row.cat1, row.elt2, row.cat2, row.etq, row.objet)


@dataclass
class InstantiatedGraph:
    meta_id: str
    row: RowMeta
    transitions: list[tuple[int, Sym, int]]
    accepts: frozenset[int]
    start: int = 0

    @property
    def out(self) -> dict[int, list[tuple[Sym, int]]]:
        table: dict[int, list[tuple[Sym, int]]] = {}
        for src, sym, dst in self.transitions:
            table.setdefault(src, []).append((sym, dst))
        return table


def _guard_passes(meta: MetaGraph, row: PatternRow) -> bool:
    values = {
        "SCHEMA": row.schema,
        "ELT1": row.elt1,
        "CAT1": row.cat1,
        "ELT2": row.elt2,
        "CAT2": row.cat2,
        "ETQ": row.etq,
        "OBJET": row.objet,
    }
    return all(values[col] in allowed for col, allowed in meta.guard.items())


def _element(row: PatternRow, objet: str) -> tuple[str, str]:
    return (row.elt1, row.cat1) if objet == "$1" else (row.elt2, row.cat2)


def instantiate(meta: MetaGraph, row: PatternRow, lexicon: Lexicon) -> InstantiatedGraph | None:
    """Concrete automaton for one row, or None when a guard rejects it."""
    if not _guard_passes(meta, row):
        return None
    if meta.captures and any(objet != row.objet for objet in meta.captures.values()):
        return None

    def forms_of(lemma: str, cat: str) -> tuple[str, ...]:
        surfaces = lexicon.forms(lemma, cat)
        if not surfaces:
            raise InstantiationError(f"lemma {lemma!r} ({cat}) absent from lexicon")
        return surfaces

    transitions: list[tuple[int, Sym, int]] = []
    for src, dst, pred in meta.transitions:
        if pred.kind == "lit":
            sym = Sym("lit", (pred.arg,))
        elif pred.kind == "pos":
            sym = Sym("pos", (pred.arg,))
        elif pred.kind == "mod":
            sym = Sym("mod")
        elif pred.kind == "elt1":
            sym = Sym("forms", (row.elt1, forms_of(row.elt1, row.cat1)))
        elif pred.kind == "elt2":
            sym = Sym("forms", (row.elt2, forms_of(row.elt2, row.cat2)))
        elif pred.kind == "obj":
            lemma, cat = _element(row, meta.captures[(src, dst)])
            sym = Sym("objnp", (lemma, forms_of(lemma, cat)), capture=meta.captures[(src, dst)])
        else:  # pragma: no cover
            raise MetaGraphError(f"unknown predicate kind {pred.kind}")
        transitions.append((src, sym, dst))
    return InstantiatedGraph(meta.id, _row_meta(row), transitions, meta.accepts)


# --- compilation ------------------------------------------------------------

@dataclass(frozen=True)
class CompiledGraph:
    n_states: int
    start: int
    accepts: frozenset[int]
    transitions: tuple[tuple[int, Sym, int], ...]
    accept_rows: dict[int, tuple[str, ...]]
    rows: dict[str, RowMeta]
    out: dict[int, tuple[tuple[Sym, int], ...]] = field(repr=False, default_factory=dict)


def compile_graphs(
    metas: list[MetaGraph], table: PatternTable, lexicon: Lexicon
) -> CompiledGraph:
    """Union of all instantiations, determinized over predicate labels.

    The construction order is fixed, so two compilations of the same inputs
    produce identical graphs (and identical serializations).
    """
    accepted = table.accepted()
    if not accepted:
        raise CompileError("pattern table has no accepted rows")

    fragments: list[InstantiatedGraph] = []
    for meta in metas:
        for row in accepted:
            frag = instantiate(meta, row, lexicon)
            if frag is not None:
                fragments.append(frag)

    # Global NFA: offset each fragment's states; epsilon from a virtual
    # start only to fragment starts, realized by seeding the start subset.
    nfa_out: dict[int, dict[Sym, set[int]]] = {}
    nfa_accepts: dict[int, str] = {}  # nfa accept state -> row id
    rows_meta: dict[str, RowMeta] = {}
    starts: list[int] = []
    offset = 0
    for frag in fragments:
        max_state = max(
            [frag.start] + [s for s, _, _ in frag.transitions] + [d for _, _, d in frag.transitions]
            + list(frag.accepts)
        )
        starts.append(offset + frag.start)
        for src, sym, dst in frag.transitions:
            nfa_out.setdefault(offset + src, {}).setdefault(sym, set()).add(offset + dst)
        for acc in frag.accepts:
            nfa_accepts[offset + acc] = frag.row.row_id
        rows_meta[frag.row.row_id] = frag.row
        offset += max_state + 1

    start_set = frozenset(starts)
    subset_ids: dict[frozenset[int], int] = {start_set: 0}
    order = [start_set]
    dfa_transitions: list[tuple[int, Sym, int]] = []
    queue = [start_set]
    while queue:
        subset = queue.pop(0)
        sid = subset_ids[subset]
        moves: dict[Sym, set[int]] = {}
        for state in subset:
            for sym, dsts in nfa_out.get(state, {}).items():
                moves.setdefault(sym, set()).update(dsts)
        for sym in sorted(moves, key=lambda s: s.canonical()):
            target = frozenset(moves[sym])
            if target not in subset_ids:
                subset_ids[target] = len(order)
                order.append(target)
                queue.append(target)
            dfa_transitions.append((sid, sym, subset_ids[target]))

    accepts = set()
    accept_rows: dict[int, tuple[str, ...]] = {}
    for subset, sid in subset_ids.items():
        row_ids = sorted({nfa_accepts[s] for s in subset if s in nfa_accepts})
        if row_ids:
            accepts.add(sid)
            accept_rows[sid] = tuple(row_ids)

    dfa_transitions.sort(key=lambda t: (t[0], t[1].canonical(), t[2]))
    out: dict[int, list[tuple[Sym, int]]] = {}
    for src, sym, dst in dfa_transitions:
        out.setdefault(src, []).append((sym, dst))
    return CompiledGraph(
        n_states=len(order),
        start=0,
        accepts=frozenset(accepts),
        transitions=tuple(dfa_transitions),
        accept_rows=accept_rows,
        rows=rows_meta,
        out={src: tuple(edges) for src, edges in out.items()},
    )


def stats(graph: CompiledGraph) -> tuple[int, int]:
    return graph.n_states, len(graph.transitions)


# --- serialization ----------------------------------------------------------

def serialize(graph: CompiledGraph) -> str:
    lines = [FORMAT_VERSION]
    lines.append(f"states\t{graph.n_states}")
    lines.append(f"start\t{graph.start}")
    for row_id in sorted(graph.rows):
        r = graph.rows[row_id]
        lines.append(
            "row\t" + "\t".join((row_id, r.schema, r.elt1, r.cat1, r.elt2, r.cat2, r.etq, r.objet))
        )
    for state in sorted(graph.accepts):
        lines.append(f"accept\t{state}\t{','.join(graph.accept_rows[state])}")
    for src, sym, dst in graph.transitions:
        lines.append(f"trans\t{src}\t{dst}\t{sym.canonical()}")
    lines.append("end")
    return "\n".join(lines) + "\n"


def deserialize(text: str) -> CompiledGraph:
    lines = text.splitlines()
    if not lines or lines[0] != FORMAT_VERSION:
        raise MetaGraphError("unknown graph format version")
    n_states = 0
    start = 0
    rows: dict[str, RowMeta] = {}
    accepts: set[int] = set()
    accept_rows: dict[int, tuple[str, ...]] = {}
    transitions: list[tuple[int, Sym, int]] = []
    for line in lines[1:]:
        if not line or line == "end":
            continue
        parts = line.split("\t")
        if parts[0] == "states":
            n_states = int(parts[1])
        elif parts[0] == "start":
            start = int(parts[1])
        elif parts[0] == "row":
            _, row_id, schema, elt1, cat1, elt2, cat2, etq, objet = parts
            rows[row_id] = RowMeta(row_id, schema, elt1, cat1, elt2, cat2, etq, objet)
        elif parts[0] == "accept":
            state = int(parts[1])
            accepts.add(state)
            accept_rows[state] = tuple(parts[2].split(","))
        elif parts[0] == "trans":
            transitions.append((int(parts[1]), parse_sym(parts[3]), int(parts[2])))
        else:
            raise MetaGraphError(f"bad graph line {line!r}")
    out: dict[int, list[tuple[Sym, int]]] = {}
    for src, sym, dst in transitions:
        out.setdefault(src, []).append((sym, dst))
    return CompiledGraph(
        n_states=n_states,
        start=start,
        accepts=frozenset(accepts),
        transitions=tuple(transitions),
        accept_rows=accept_rows,
        rows=rows,
        out={src: tuple(edges) for src, edges in out.items()},
    )


# --- matching ---------------------------------------------------------------

def _token_matches(sym: Sym, token: Token) -> bool:
    if sym.kind == "lit":
        return token.surface.lower() == sym.payload[0]
    if sym.kind == "pos":
        return token.pos == sym.payload[0]
    if sym.kind == "mod":
        return token.pos == "A"
    if sym.kind == "forms":
        return token.surface.lower() in sym.payload[1]
    return False


def _objnp_span(sym: Sym, tokens, pos: int) -> int | None:
    """End of the slot-filler span at ``pos``, or None if it does not anchor."""
    token = tokens[pos]
    if token.surface.lower() not in sym.payload[1]:
        return None
    if token.entity_class:
        return pos + 1
    j = pos + 1
    while j < len(tokens) and tokens[j].pos == "A":
        j += 1
    while j < len(tokens) and tokens[j].pos == "P":
        k = j + 1
        if k < len(tokens) and tokens[k].pos == "D":
            k += 1
        m = k
        seen_noun = False
        while m < len(tokens) and tokens[m].pos in ("A", "N"):
            seen_noun = seen_noun or tokens[m].pos == "N"
            m += 1
        if not seen_noun:
            break
        j = m
    return j


@dataclass(frozen=True)
class Match:
    start: int
    end: int
    capture: tuple[int, int]
    objet: str
    row_ids: tuple[str, ...]


def match_at(graph, tokens, start_pos: int) -> Match | None:
    """Longest match beginning exactly at ``start_pos`` (None when absent)."""
    results: list[tuple[int, tuple[int, int], str, int]] = []
    seen = set()
    stack = [(graph.start, start_pos, None, None)]
    while stack:
        state, pos, cap, objet = stack.pop()
        key = (state, pos, cap)
        if key in seen:
            continue
        seen.add(key)
        if state in graph.accepts and cap is not None:
            results.append((pos, cap, objet, state))
        if pos >= len(tokens):
            continue
        for sym, dst in graph.out.get(state, ()):
            if sym.kind == "objnp":
                if cap is not None:
                    continue
                end = _objnp_span(sym, tokens, pos)
                if end is not None:
                    stack.append((dst, end, (pos, end), sym.capture))
            elif _token_matches(sym, tokens[pos]):
                stack.append((dst, pos + 1, cap, objet))
    if not results:
        return None
    best_end = max(r[0] for r in results)
    finals = [r for r in results if r[0] == best_end]
    best_cap = min(r[1] for r in finals)
    states = [r[3] for r in finals if r[1] == best_cap]
    objet = next(r[2] for r in finals if r[1] == best_cap)
    row_ids: set[str] = set()
    accept_rows = getattr(graph, "accept_rows", None)
    if accept_rows:
        for state in states:
            row_ids.update(accept_rows.get(state, ()))
    else:
        row_ids.add(graph.row.row_id)
    return Match(start_pos, best_end, best_cap, objet, tuple(sorted(row_ids)))


def scan(graph, tokens) -> list[Match]:
    """Leftmost-longest, non-overlapping matches over a token sequence."""
    matches: list[Match] = []
    i = 0
    while i < len(tokens):
        m = match_at(graph, tokens, i)
        if m is not None and m.end > i:
            matches.append(m)
            i = m.end
        else:
            i += 1
    return matches


def accepts_sequence(graph, tokens) -> bool:
    return any(match_at(graph, tokens, i) is not None for i in range(len(tokens)))
