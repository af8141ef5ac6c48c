"""Self-contained compiled-graph file.

The matcher needs the same analysis resources that were used at compile
time (lexicon, stopwords, gazetteer, slot mapping), so the artifact embeds
them next to the automaton.  The format is a versioned, line-oriented text
dump; sections are delimited by ``%%`` headers and the automaton section is
sorted, so artifacts diff cleanly and compile deterministically.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from . import corpus, metagraph
from .corpus import Lexicon
from .metagraph import CompiledGraph

ARTIFACT_VERSION = "parafact-artifact 1"

_SECTIONS = ("automaton", "lexicon", "stopwords", "gazetteer", "slotmap")


class ArtifactError(Exception):
    pass


def parse_slot_map(text: str) -> dict[str, str]:
    mapping: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        parts = raw.rstrip("\n").split("\t")
        if len(parts) != 2:
            raise ArtifactError(f"slot map line {lineno}: expected etq<TAB>slot")
        mapping[parts[0].strip()] = parts[1].strip()
    return mapping


@dataclass(frozen=True)
class Artifact:
    graph: CompiledGraph
    lexicon_text: str
    stopwords_text: str = ""
    gazetteer_text: str = ""
    slotmap_text: str = ""

    def lexicon(self) -> Lexicon:
        return corpus.load_lexicon(self.lexicon_text)

    def stopwords(self) -> frozenset[str]:
        return corpus.load_stopwords(self.stopwords_text)

    def gazetteer(self) -> dict[str, str]:
        return corpus.load_gazetteer(self.gazetteer_text)

    def slot_map(self) -> dict[str, str]:
        return parse_slot_map(self.slotmap_text)


def serialize(artifact: Artifact) -> str:
    sections = {
        "automaton": metagraph.serialize(artifact.graph),
        "lexicon": artifact.lexicon_text,
        "stopwords": artifact.stopwords_text,
        "gazetteer": artifact.gazetteer_text,
        "slotmap": artifact.slotmap_text,
    }
    parts = [ARTIFACT_VERSION + "\n"]
    for name in _SECTIONS:
        body = sections[name]
        for line in body.splitlines():
            if line.startswith("%%"):
                raise ArtifactError(f"section {name} contains a reserved %% line")
        parts.append(f"%%{name}\n")
        parts.append(body if body.endswith("\n") or not body else body + "\n")
    parts.append("%%end\n")
    return "".join(parts)


def deserialize(text: str) -> Artifact:
    lines = text.splitlines(keepends=True)
    if not lines or lines[0].rstrip("\n") != ARTIFACT_VERSION:
        raise ArtifactError("unknown artifact version")
    sections: dict[str, list[str]] = {}
    current: str | None = None
    for line in lines[1:]:
        stripped = line.rstrip("\n")
        if stripped.startswith("%%"):
            name = stripped[2:]
            if name == "end":
                current = None
                continue
            if name not in _SECTIONS:
                raise ArtifactError(f"unknown section {name!r}")
            current = name
            sections[current] = []
            continue
        if current is not None:
            sections[current].append(line)
    if "automaton" not in sections:
        raise ArtifactError("artifact has no automaton section")
    text_of = {name: "".join(body) for name, body in sections.items()}
    return Artifact(
        graph=metagraph.deserialize(text_of["automaton"]),
        lexicon_text=text_of.get("lexicon", ""),
        stopwords_text=text_of.get("stopwords", ""),
        gazetteer_text=text_of.get("gazetteer", ""),
        slotmap_text=text_of.get("slotmap", ""),
    )


def write(artifact: Artifact, path) -> None:
    Path(path).write_text(serialize(artifact), encoding="utf-8")


def read(path) -> Artifact:
    return deserialize(Path(path).read_text(encoding="utf-8"))
