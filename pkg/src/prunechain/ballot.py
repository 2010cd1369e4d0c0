"""Majority ballots used for marker shifts and deletion approval."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Union

from .core import EntryRef


@dataclass(frozen=True)
class MarkerShift:
    new_marker: int

    def to_json(self) -> dict:
        return {"marker_shift": self.new_marker}


@dataclass(frozen=True)
class ApproveDeletion:
    target: EntryRef
    request: EntryRef

    def to_json(self) -> dict:
        return {"approve_deletion": [self.target.block, self.target.entry],
                "request": [self.request.block, self.request.entry]}


Subject = Union[MarkerShift, ApproveDeletion]


@dataclass(frozen=True)
class Ballot:
    subject: Subject
    votes: Mapping[int, bool] = field(default_factory=dict)

    @property
    def yes(self) -> int:
        return sum(1 for v in self.votes.values() if v)

    @property
    def approved(self) -> bool:
        # Strict majority: a tie is a rejection.
        return 2 * self.yes > len(self.votes)

    def to_json(self) -> dict:
        return {"subject": self.subject.to_json(),
                "votes": {str(k): v for k, v in sorted(self.votes.items())},
                "approved": self.approved}


BallotFn = Callable[[Subject], Ballot]


def approve_all(subject: Subject) -> Ballot:
    """Single-node stand-in for the quorum: always approves."""
    return Ballot(subject, {0: True})
