"""Analyst validation loop: rounds, candidate decisions, concordance.

State lives in three append-only JSON-lines files under a data directory
(rounds, proposals, decisions).  Replaying the logs reconstructs the exact
state; a truncated final line (interrupted write) is detected and ignored.
All mutations serialize through one lock; reads see consistent snapshots.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import acquisition
from .acquisition import PatternRow, PatternTable, Provenance, SeedPattern
from .corpus import Sentence
from .semnet import SemanticNet


class UnknownIdError(KeyError):
    pass


class ClosedRoundError(Exception):
    pass


class NoAcceptedRowsError(Exception):
    pass


class MissingResourcesError(Exception):
    pass


@dataclass(frozen=True)
class Snippet:
    doc_id: str
    sentence: int
    head_index: int
    exp_index: int
    tokens: tuple[str, ...]


@dataclass
class Candidate:
    row: PatternRow
    round_id: int
    snippets: tuple[Snippet, ...]
    status: str = "proposed"

    @property
    def id(self) -> str:
        return self.row.row_id


@dataclass
class Decision:
    candidate_id: str
    verdict: str  # accept | reject
    annotator: str
    at: float


@dataclass
class Round:
    id: int
    seeds: tuple[SeedPattern, ...]
    threshold: float
    created_at: float


@dataclass
class RoundStats:
    proposed: int
    accepted: int
    rejected: int
    new_patterns_per_seed: float
    acceptance_rate: float


def _read_log(path: Path) -> list[dict]:
    """Parse a JSON-lines log, dropping a truncated final line."""
    if not path.exists():
        return []
    data = path.read_text(encoding="utf-8")
    if not data:
        return []
    lines = data.split("\n")
    complete = lines[:-1]  # a well-formed log ends with a newline
    tail = lines[-1]
    records = []
    for i, line in enumerate(complete):
        if not line.strip():
            continue
        try:
            records.append(json.loads(line))
        except json.JSONDecodeError:
            if i == len(complete) - 1 and not tail:
                continue  # final line corrupt: treat as torn write
            raise
    if tail.strip():
        try:
            records.append(json.loads(tail))
        except json.JSONDecodeError:
            pass  # no trailing newline: torn write, ignore
    return records


class Workbench:
    """Bookkeeping for acquisition rounds over one corpus and net."""

    def __init__(
        self,
        data_dir,
        net: SemanticNet | None = None,
        sentences: list[Sentence] | None = None,
    ):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.net = net
        self.sentences = sentences
        self._lock = threading.RLock()
        self._rounds: dict[int, Round] = {}
        self._candidates: dict[str, Candidate] = {}
        self._decisions: list[Decision] = []
        self._replay()

    # -- persistence ---------------------------------------------------------

    @property
    def _rounds_path(self) -> Path:
        return self.data_dir / "rounds.jsonl"

    @property
    def _proposals_path(self) -> Path:
        return self.data_dir / "proposals.jsonl"

    @property
    def _decisions_path(self) -> Path:
        return self.data_dir / "decisions.jsonl"

    def _append(self, path: Path, record: dict) -> None:
        with open(path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")
            fh.flush()

    def _replay(self) -> None:
        for rec in _read_log(self._rounds_path):
            seeds = tuple(SeedPattern(**s) for s in rec["seeds"])
            self._rounds[rec["id"]] = Round(rec["id"], seeds, rec["threshold"], rec["at"])
        for rec in _read_log(self._proposals_path):
            row = PatternRow(
                schema=rec["schema"],
                elt1=rec["elt1"],
                cat1=rec["cat1"],
                elt2=rec["elt2"],
                cat2=rec["cat2"],
                score=rec["score"],
                etq=rec["etq"],
                objet=rec["objet"],
                provenance=tuple(Provenance(*p) for p in rec["provenance"]),
            )
            snippets = tuple(
                Snippet(s["doc"], s["sent"], s["head"], s["exp"], tuple(s["tokens"]))
                for s in rec["snippets"]
            )
            cand = Candidate(row, rec["round"], snippets)
            self._candidates[cand.id] = cand
        for rec in _read_log(self._decisions_path):
            self._apply_decision(
                Decision(rec["candidate_id"], rec["verdict"], rec["annotator"], rec["at"]),
                persist=False,
            )

    def _apply_decision(self, decision: Decision, persist: bool) -> Candidate:
        cand = self._candidates.get(decision.candidate_id)
        if cand is None:
            raise UnknownIdError(decision.candidate_id)
        self._decisions.append(decision)
        cand.status = "accepted" if decision.verdict == "accept" else "rejected"
        if persist:
            self._append(
                self._decisions_path,
                {
                    "candidate_id": decision.candidate_id,
                    "verdict": decision.verdict,
                    "annotator": decision.annotator,
                    "at": decision.at,
                },
            )
        return cand

    # -- queries ---------------------------------------------------------------

    def rounds(self) -> list[Round]:
        with self._lock:
            return [self._rounds[i] for i in sorted(self._rounds)]

    def round(self, round_id: int) -> Round:
        if round_id not in self._rounds:
            raise UnknownIdError(round_id)
        return self._rounds[round_id]

    def latest_round_id(self) -> int | None:
        return max(self._rounds) if self._rounds else None

    def candidates(self, status: str | None = None, round_id: int | None = None) -> list[Candidate]:
        with self._lock:
            out = [
                c
                for c in self._candidates.values()
                if (status is None or c.status == status)
                and (round_id is None or c.round_id == round_id)
            ]
        out.sort(key=lambda c: (c.row.score, c.row.key))
        return out

    def candidate(self, candidate_id: str) -> Candidate:
        if candidate_id not in self._candidates:
            raise UnknownIdError(candidate_id)
        return self._candidates[candidate_id]

    def stats(self, round_id: int) -> RoundStats:
        with self._lock:
            rnd = self.round(round_id)
            cands = [c for c in self._candidates.values() if c.round_id == round_id]
        accepted = sum(1 for c in cands if c.status == "accepted")
        rejected = sum(1 for c in cands if c.status == "rejected")
        return RoundStats(
            proposed=len(cands),
            accepted=accepted,
            rejected=rejected,
            new_patterns_per_seed=accepted / len(rnd.seeds) if rnd.seeds else 0.0,
            acceptance_rate=accepted / len(cands) if cands else 0.0,
        )

    def accepted_table(self) -> PatternTable:
        with self._lock:
            rows = [c.row for c in self._candidates.values() if c.status == "accepted"]
        rows = [acquisition.replace_status(r, "accepted") for r in rows]
        rows.sort(key=lambda r: (r.score, r.key))
        return PatternTable(rows)

    # -- mutations ---------------------------------------------------------------

    def start_round(self, seeds: list[SeedPattern], threshold: float) -> Round:
        if not seeds:
            raise ValueError("at least one seed is required")
        if self.net is None or self.sentences is None:
            raise MissingResourcesError("corpus and net must be loaded before starting rounds")
        with self._lock:
            round_id = (self.latest_round_id() or 0) + 1
            rows: list[PatternRow] = []
            for seed in seeds:
                rows.extend(acquisition.acquire_corpus(seed, self.sentences, self.net, threshold))
            merged = acquisition.merge_rows(rows)
            fresh = [r for r in merged if r.row_id not in self._candidates]

            rnd = Round(round_id, tuple(seeds), threshold, time.time())
            self._rounds[round_id] = rnd
            self._append(
                self._rounds_path,
                {
                    "id": round_id,
                    "seeds": [s.__dict__ for s in seeds],
                    "threshold": threshold,
                    "at": rnd.created_at,
                },
            )
            sentence_index = {(s.doc_id, s.index): s for s in self.sentences}
            for row in fresh:
                snippets = tuple(
                    Snippet(
                        p.doc_id,
                        p.sentence,
                        p.head_index,
                        p.exp_index,
                        tuple(t.surface for t in sentence_index[(p.doc_id, p.sentence)].tokens),
                    )
                    for p in sorted(row.provenance)
                )
                cand = Candidate(row, round_id, snippets)
                self._candidates[cand.id] = cand
                self._append(
                    self._proposals_path,
                    {
                        "id": cand.id,
                        "round": round_id,
                        "schema": row.schema,
                        "elt1": row.elt1,
                        "cat1": row.cat1,
                        "elt2": row.elt2,
                        "cat2": row.cat2,
                        "score": row.score,
                        "etq": row.etq,
                        "objet": row.objet,
                        "provenance": [list(p.__dict__.values()) for p in row.provenance],
                        "snippets": [
                            {
                                "doc": s.doc_id,
                                "sent": s.sentence,
                                "head": s.head_index,
                                "exp": s.exp_index,
                                "tokens": list(s.tokens),
                            }
                            for s in snippets
                        ],
                    },
                )
            return rnd

    def record_decision(self, candidate_id: str, verdict: str, annotator: str) -> Candidate:
        if verdict not in ("accept", "reject"):
            raise ValueError(f"bad verdict {verdict!r}")
        with self._lock:
            cand = self._candidates.get(candidate_id)
            if cand is None:
                raise UnknownIdError(candidate_id)
            if cand.round_id != self.latest_round_id():
                raise ClosedRoundError(f"round {cand.round_id} is closed")
            wanted = "accepted" if verdict == "accept" else "rejected"
            if cand.status == wanted:
                return cand  # idempotent
            return self._apply_decision(
                Decision(candidate_id, verdict, annotator, time.time()), persist=True
            )

    def concordance(self, candidate_id: str, k: int = 10) -> list[Snippet]:
        cand = self.candidate(candidate_id)
        ordered = sorted(cand.snippets, key=lambda s: (s.doc_id, s.sentence))
        return ordered[: max(k, 0)]

    def promote_accepted(self, round_id: int) -> tuple[PatternTable, list[SeedPattern]]:
        with self._lock:
            self.round(round_id)  # existence check
            accepted = [
                c.row for c in self._candidates.values()
                if c.round_id == round_id and c.status == "accepted"
            ]
        if not accepted:
            raise NoAcceptedRowsError(f"round {round_id} has no accepted rows")
        rows = sorted(
            (acquisition.replace_status(r, "accepted") for r in accepted),
            key=lambda r: (r.score, r.key),
        )
        seeds = [SeedPattern(r.elt1, r.elt2, r.etq, r.objet) for r in rows]
        return PatternTable(rows), seeds
