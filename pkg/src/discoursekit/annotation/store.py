"""Adjudication sessions: blind two-annotator labeling with an audit log.

Each session lives in its own directory: ``session.json`` (immutable
candidate list, fixed order) plus ``labels.log``, an append-only event
log that is fsynced before any acknowledgment and replayed on startup,
so a crash never loses an acknowledged label.  Labels are immutable
within a round; starting a new round preserves history.
"""

from __future__ import annotations

import json
import os
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import DiscourseKitError, NotFoundError, PreconditionError
from ..variants.candidates import (
    VariantCandidate,
    candidate_from_json,
    candidate_to_json,
)
from ..variants.metrics import cohen_kappa

__all__ = [
    "ConflictError",
    "InsufficientDataError",
    "IncompleteAdjudicationError",
    "AgreementReport",
    "Session",
    "SessionStore",
    "EXPORT_POLICIES",
]

EXPORT_POLICIES = ("both_agree", "either", "discussion_resolved")

LABELS = ("include", "exclude")


class ConflictError(DiscourseKitError):
    """A label already exists for this (candidate, annotator, round)."""


class InsufficientDataError(DiscourseKitError):
    """No candidate has been labeled by both annotators yet."""


class IncompleteAdjudicationError(DiscourseKitError):
    def __init__(self, unresolved: list[str]) -> None:
        super().__init__(
            "unresolved disagreements need tiebreaks: " + ", ".join(unresolved)
        )
        self.unresolved = unresolved


@dataclass
class AgreementReport:
    kappa: float
    both_include: int
    a_only: int
    b_only: int
    both_exclude: int
    doubly_labeled: int
    total: int
    complete: bool
    disagreements: list[str] = field(default_factory=list)


@dataclass
class Session:
    session_id: str
    keyword: str
    annotators: tuple[str, str]
    candidates: list[VariantCandidate]
    examples: dict[str, list[str]]
    round: int = 1
    # (round, annotator, surface) -> label
    labels: dict[tuple[int, str, str], str] = field(default_factory=dict)
    # (round, surface) -> tiebreak label
    tiebreaks: dict[tuple[int, str], str] = field(default_factory=dict)

    def candidate(self, surface: str) -> VariantCandidate:
        for cand in self.candidates:
            if cand.surface == surface:
                return cand
        raise NotFoundError(f"candidate {surface!r} not in session {self.session_id}")

    def progress(self, annotator: str) -> tuple[int, int]:
        labeled = sum(
            1 for (rnd, ann, _), _ in self.labels.items()
            if rnd == self.round and ann == annotator
        )
        return labeled, len(self.candidates)

    def is_complete(self, annotator: str) -> bool:
        labeled, total = self.progress(annotator)
        return labeled == total


class SessionStore:
    def __init__(self, root: str | Path) -> None:
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._sessions: dict[str, Session] = {}
        for entry in sorted(self.root.iterdir()):
            if (entry / "session.json").exists():
                self._sessions[entry.name] = self._replay(entry)

    # -- construction and persistence -------------------------------------

    def create_session(
        self,
        candidates: list[VariantCandidate],
        annotators: list[str],
        keyword: str,
        examples: dict[str, list[str]] | None = None,
    ) -> str:
        if not candidates:
            raise PreconditionError("a session needs at least one candidate")
        if len(annotators) != 2 or len(set(annotators)) != 2:
            raise PreconditionError("exactly two distinct annotators required")
        ordered = sorted(
            candidates, key=lambda c: (-c.cosine_to_keyword, c.surface)
        )
        if len({c.surface for c in ordered}) != len(ordered):
            raise PreconditionError("candidate surfaces must be unique")
        session_id = uuid.uuid4().hex[:12]
        session = Session(
            session_id=session_id,
            keyword=keyword,
            annotators=(annotators[0], annotators[1]),
            candidates=ordered,
            examples={
                surface: texts[:3] for surface, texts in (examples or {}).items()
            },
        )
        directory = self.root / session_id
        directory.mkdir()
        payload = {
            "session_id": session_id,
            "keyword": keyword,
            "annotators": list(session.annotators),
            "candidates": [candidate_to_json(c) for c in ordered],
            "examples": session.examples,
        }
        (directory / "session.json").write_text(
            json.dumps(payload, ensure_ascii=False, sort_keys=True, indent=1),
            encoding="utf-8",
        )
        (directory / "labels.log").touch()
        self._sessions[session_id] = session
        return session_id

    def _replay(self, directory: Path) -> Session:
        raw = json.loads((directory / "session.json").read_text(encoding="utf-8"))
        session = Session(
            session_id=raw["session_id"],
            keyword=raw["keyword"],
            annotators=tuple(raw["annotators"]),
            candidates=[candidate_from_json(line) for line in raw["candidates"]],
            examples={k: list(v) for k, v in raw.get("examples", {}).items()},
        )
        log_path = directory / "labels.log"
        if log_path.exists():
            for line in log_path.read_text(encoding="utf-8").splitlines():
                if line.strip():
                    self._apply(session, json.loads(line))
        return session

    @staticmethod
    def _apply(session: Session, event: dict) -> None:
        kind = event["type"]
        if kind == "label":
            key = (event["round"], event["annotator"], event["candidate"])
            session.labels[key] = event["label"]
        elif kind == "tiebreak":
            session.tiebreaks[(event["round"], event["candidate"])] = event["label"]
        elif kind == "round":
            session.round = event["round"]
        else:
            raise PreconditionError(f"unknown log event type {kind!r}")

    def _append(self, session_id: str, event: dict) -> None:
        path = self.root / session_id / "labels.log"
        with open(path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(event, ensure_ascii=False, sort_keys=True) + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    # -- session operations ------------------------------------------------

    def session_ids(self) -> list[str]:
        return sorted(self._sessions)

    def get(self, session_id: str) -> Session:
        session = self._sessions.get(session_id)
        if session is None:
            raise NotFoundError(f"no session {session_id!r}")
        return session

    def _check_annotator(self, session: Session, annotator: str) -> None:
        if annotator not in session.annotators:
            raise NotFoundError(
                f"annotator {annotator!r} not in session {session.session_id}"
            )

    def next_candidate(self, session_id: str, annotator: str) -> VariantCandidate | None:
        """First candidate this annotator has not labeled this round."""
        session = self.get(session_id)
        self._check_annotator(session, annotator)
        for cand in session.candidates:
            if (session.round, annotator, cand.surface) not in session.labels:
                return cand
        return None

    def submit_label(
        self, session_id: str, annotator: str, candidate_id: str, label: str
    ) -> dict[str, tuple[int, int]]:
        """Durably record one label; returns per-annotator progress."""
        session = self.get(session_id)
        self._check_annotator(session, annotator)
        session.candidate(candidate_id)  # raises NotFoundError when absent
        if label not in LABELS:
            raise PreconditionError(f"label must be one of {LABELS}, got {label!r}")
        key = (session.round, annotator, candidate_id)
        if key in session.labels:
            raise ConflictError(
                f"{annotator!r} already labeled {candidate_id!r} in round {session.round}"
            )
        self._append(
            session_id,
            {
                "type": "label",
                "round": session.round,
                "annotator": annotator,
                "candidate": candidate_id,
                "label": label,
            },
        )
        session.labels[key] = label
        return {ann: session.progress(ann) for ann in session.annotators}

    def start_new_round(self, session_id: str) -> int:
        session = self.get(session_id)
        session.round += 1
        self._append(session_id, {"type": "round", "round": session.round})
        return session.round

    def record_tiebreak(self, session_id: str, candidate_id: str, label: str) -> None:
        session = self.get(session_id)
        session.candidate(candidate_id)
        if label not in LABELS:
            raise PreconditionError(f"label must be one of {LABELS}, got {label!r}")
        self._append(
            session_id,
            {
                "type": "tiebreak",
                "round": session.round,
                "candidate": candidate_id,
                "label": label,
            },
        )
        session.tiebreaks[(session.round, candidate_id)] = label

    # -- statistics and export ----------------------------------------------

    def _pair_labels(self, session: Session) -> list[tuple[str, str, str]]:
        """(surface, label_a, label_b) for candidates labeled by both."""
        a, b = session.annotators
        pairs = []
        for cand in session.candidates:
            la = session.labels.get((session.round, a, cand.surface))
            lb = session.labels.get((session.round, b, cand.surface))
            if la is not None and lb is not None:
                pairs.append((cand.surface, la, lb))
        return pairs

    def agreement(self, session_id: str) -> AgreementReport:
        session = self.get(session_id)
        pairs = self._pair_labels(session)
        if not pairs:
            raise InsufficientDataError(
                "no candidate has been labeled by both annotators"
            )
        bits_a = [1 if la == "include" else 0 for _, la, _ in pairs]
        bits_b = [1 if lb == "include" else 0 for _, _, lb in pairs]
        kappa = cohen_kappa(bits_a, bits_b)
        both_inc = sum(1 for x, y in zip(bits_a, bits_b) if x == 1 and y == 1)
        a_only = sum(1 for x, y in zip(bits_a, bits_b) if x == 1 and y == 0)
        b_only = sum(1 for x, y in zip(bits_a, bits_b) if x == 0 and y == 1)
        both_exc = sum(1 for x, y in zip(bits_a, bits_b) if x == 0 and y == 0)
        complete = all(session.is_complete(ann) for ann in session.annotators)
        # Disagreement surfaces reveal the other rater's choices, so they
        # are withheld until both annotators have finished (blind coding).
        disagreements = (
            [surface for surface, la, lb in pairs if la != lb] if complete else []
        )
        return AgreementReport(
            kappa=kappa,
            both_include=both_inc,
            a_only=a_only,
            b_only=b_only,
            both_exclude=both_exc,
            doubly_labeled=len(pairs),
            total=len(session.candidates),
            complete=complete,
            disagreements=disagreements,
        )

    def export(self, session_id: str, policy: str = "discussion_resolved") -> str:
        """Adjudicated candidates as JSONL; byte-identical per (session, policy)."""
        session = self.get(session_id)
        if policy not in EXPORT_POLICIES:
            raise PreconditionError(f"policy must be one of {EXPORT_POLICIES}")
        if not session.labels:
            raise PreconditionError("session has no labels to export")
        a, b = session.annotators
        unresolved: list[str] = []
        lines: list[str] = []
        for cand in session.candidates:
            la = session.labels.get((session.round, a, cand.surface))
            lb = session.labels.get((session.round, b, cand.surface))
            label = self._adjudicate(session, cand.surface, la, lb, policy, unresolved)
            lines.append(candidate_to_json(cand.with_label(label)))
        if unresolved:
            raise IncompleteAdjudicationError(unresolved)
        return "\n".join(lines) + "\n"

    @staticmethod
    def _adjudicate(
        session: Session,
        surface: str,
        la: str | None,
        lb: str | None,
        policy: str,
        unresolved: list[str],
    ) -> str:
        votes = [lab for lab in (la, lb) if lab is not None]
        if policy == "either":
            return "include" if "include" in votes else "exclude"
        if policy == "both_agree":
            return "include" if votes and all(v == "include" for v in votes) else "exclude"
        # discussion_resolved: unanimity stands, anything else needs an
        # explicit recorded tiebreak.
        if len(votes) == 2 and la == lb:
            return la  # type: ignore[return-value]
        tiebreak = session.tiebreaks.get((session.round, surface))
        if tiebreak is None:
            unresolved.append(surface)
            return "exclude"
        return tiebreak
