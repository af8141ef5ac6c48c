"""Weighted semantic network and the word-to-word activation proximity.

The network is a sense-level graph whose edges all point from the more
specific node to the more general one.  Word-level queries (nearest common
ancestors, proximity) fold polysemy by taking minima over senses.
"""

from __future__ import annotations

import heapq
import math
import re
from dataclasses import dataclass, field

RELATION_KINDS = ("hypernym", "synonym", "meronym", "association")

#: Default edge cost per relation kind; a net file may override per edge.
DEFAULT_COSTS = {
    "hypernym": 1.0,
    "synonym": 0.0,
    "meronym": 1.5,
    "association": 2.0,
}

#: Proximity value for word pairs with no common ancestor (or unknown words).
#: Compares greater than every finite value and every finite threshold.
UNRELATED = math.inf


class NetError(Exception):
    """Base class for semantic-net loading problems."""


class NetParseError(NetError):
    """Malformed net file; message carries the line number."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class NetCycleError(NetError):
    """The upward graph is cyclic; names one node on a cycle."""

    def __init__(self, node: str):
        super().__init__(f"cycle through node {node!r}")
        self.node = node


class NetReferenceError(NetError):
    """A relation or lexicon entry names an undeclared node."""


@dataclass(frozen=True)
class SenseNode:
    id: str
    label: str


@dataclass(frozen=True)
class Relation:
    source: str
    target: str
    kind: str
    cost: float


@dataclass(frozen=True)
class SemanticNet:
    """Immutable net: safe to share across threads after loading."""

    nodes: dict[str, SenseNode]
    relations: tuple[Relation, ...]
    lexicon: dict[str, tuple[str, ...]]  # word (lowercased) -> sense node ids
    _out: dict[str, tuple[tuple[str, float], ...]] = field(repr=False, default_factory=dict)

    def senses(self, word: str) -> tuple[str, ...]:
        return self.lexicon.get(word.lower(), ())

    def __contains__(self, word: str) -> bool:
        return word.lower() in self.lexicon


_NODE_RE = re.compile(r'^node\s+(\S+)\s+"([^"]*)"\s*$')
_REL_RE = re.compile(r"^rel\s+(\S+)\s+(\S+)\s+(\S+)(?:\s+cost\s+(\S+))?\s*$")
_WORD_RE = re.compile(r'^word\s+"([^"]+)"\s+(\S+)\s*$')


def load_net(text: str) -> SemanticNet:
    """Parse and validate a net file (see the net file format in README)."""
    nodes: dict[str, SenseNode] = {}
    relations: list[Relation] = []
    lexicon: dict[str, set[str]] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("node"):
            m = _NODE_RE.match(line)
            if not m:
                raise NetParseError(lineno, f"bad node record: {raw!r}")
            node_id, label = m.group(1), m.group(2)
            if node_id in nodes:
                raise NetParseError(lineno, f"duplicate node id {node_id!r}")
            nodes[node_id] = SenseNode(node_id, label)
        elif line.startswith("rel"):
            m = _REL_RE.match(line)
            if not m:
                raise NetParseError(lineno, f"bad rel record: {raw!r}")
            src, kind, dst, cost_s = m.groups()
            if kind not in RELATION_KINDS:
                raise NetParseError(lineno, f"unknown relation kind {kind!r}")
            if cost_s is None:
                cost = DEFAULT_COSTS[kind]
            else:
                try:
                    cost = float(cost_s)
                except ValueError:
                    raise NetParseError(lineno, f"bad cost {cost_s!r}") from None
            if cost < 0:
                raise NetParseError(lineno, f"negative cost {cost}")
            if kind == "synonym" and cost != 0.0:
                raise NetParseError(lineno, "synonym edges must have cost 0")
            relations.append(Relation(src, dst, kind, cost))
        elif line.startswith("word"):
            m = _WORD_RE.match(line)
            if not m:
                raise NetParseError(lineno, f"bad word record: {raw!r}")
            surface, node_id = m.group(1), m.group(2)
            lexicon.setdefault(surface.lower(), set()).add(node_id)
        else:
            raise NetParseError(lineno, f"unknown record: {raw!r}")

    for rel in relations:
        for end in (rel.source, rel.target):
            if end not in nodes:
                raise NetReferenceError(f"relation references unknown node {end!r}")
    for word, ids in lexicon.items():
        for node_id in ids:
            if node_id not in nodes:
                raise NetReferenceError(f"word {word!r} references unknown node {node_id!r}")

    _check_acyclic(nodes, relations)

    out: dict[str, list[tuple[str, float]]] = {nid: [] for nid in nodes}
    for rel in relations:
        out[rel.source].append((rel.target, rel.cost))
    frozen_out = {nid: tuple(sorted(edges)) for nid, edges in out.items()}
    frozen_lex = {w: tuple(sorted(ids)) for w, ids in lexicon.items()}
    return SemanticNet(nodes, tuple(relations), frozen_lex, frozen_out)


def load_net_file(path) -> SemanticNet:
    with open(path, encoding="utf-8") as fh:
        return load_net(fh.read())


def _check_acyclic(nodes, relations) -> None:
    # Zero-cost synonym edges form equivalence classes; acyclicity is
    # required of the quotient graph (a self-loop there counts as a cycle).
    parent = {nid: nid for nid in nodes}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for rel in relations:
        if rel.kind == "synonym":
            ra, rb = find(rel.source), find(rel.target)
            if ra != rb:
                parent[ra] = rb

    adj: dict[str, set[str]] = {}
    for rel in relations:
        if rel.kind == "synonym":
            continue
        a, b = find(rel.source), find(rel.target)
        if a == b:
            raise NetCycleError(rel.source)
        adj.setdefault(a, set()).add(b)

    WHITE, GRAY, BLACK = 0, 1, 2
    color = {find(nid): WHITE for nid in nodes}
    rep_name = {}
    for nid in sorted(nodes):
        rep_name.setdefault(find(nid), nid)

    for root in sorted(color):
        if color[root] != WHITE:
            continue
        stack = [(root, iter(sorted(adj.get(root, ()))))]
        color[root] = GRAY
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                if color[nxt] == GRAY:
                    raise NetCycleError(rep_name[nxt])
                if color[nxt] == WHITE:
                    color[nxt] = GRAY
                    stack.append((nxt, iter(sorted(adj.get(nxt, ())))))
                    advanced = True
                    break
            if not advanced:
                color[node] = BLACK
                stack.pop()


def ancestor_cone(net: SemanticNet, node: str) -> dict[str, float]:
    """All nodes reachable upward from ``node`` with minimal cumulative cost.

    The node itself is included at cost 0.  Ties are resolved by processing
    node ids in sorted order, so the traversal is deterministic.
    """
    if node not in net.nodes:
        raise KeyError(f"unknown node id {node!r}")
    dist = {node: 0.0}
    heap = [(0.0, node)]
    while heap:
        d, cur = heapq.heappop(heap)
        if d > dist.get(cur, UNRELATED):
            continue
        for target, cost in net._out.get(cur, ()):
            nd = d + cost
            if nd < dist.get(target, UNRELATED):
                dist[target] = nd
                heapq.heappush(heap, (nd, target))
    return dist


def _word_cone(net: SemanticNet, word: str) -> dict[str, float]:
    """Merged cone over all senses of a word (minimum cost per node)."""
    merged: dict[str, float] = {}
    for sense in net.senses(word):
        for node, cost in ancestor_cone(net, sense).items():
            if cost < merged.get(node, UNRELATED):
                merged[node] = cost
    return merged


def nearest_common_ancestors(net: SemanticNet, a: str, b: str) -> set[tuple[str, float, float]]:
    """Minimal elements of the common-ancestor set of two words.

    Each result carries the minimal upward cost from either word.  Raises
    ``KeyError`` for words missing from the net lexicon.
    """
    for word in (a, b):
        if word not in net:
            raise KeyError(f"unknown word {word!r}")
    cone_a = _word_cone(net, a)
    cone_b = _word_cone(net, b)
    common = sorted(set(cone_a) & set(cone_b))
    if not common:
        return set()
    # n is minimal iff no other common ancestor lies strictly below it.
    ancestors_of = {n: set(ancestor_cone(net, n)) for n in common}
    result = set()
    for n in common:
        if any(m != n and n in ancestors_of[m] for m in common):
            continue
        result.add((n, cone_a[n], cone_b[n]))
    return result


def proximity(net: SemanticNet, a: str, b: str) -> float:
    """Activation proximity between two words; lower means closer.

    Mean over the nearest common ancestors of the summed upward costs from
    both words.  Total: unknown words or a disjoint pair give ``UNRELATED``.
    """
    if a not in net or b not in net:
        return UNRELATED
    ncas = nearest_common_ancestors(net, a, b)
    if not ncas:
        return UNRELATED
    total = 0.0
    for _, da, db in sorted(ncas):
        total += da + db
    return total / len(ncas)


def related_under(value: float, threshold: float) -> bool:
    """True when a proximity value passes a finite threshold."""
    return value <= threshold
