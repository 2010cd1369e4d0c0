"""Block production for a single node: admission, commits, summaries, heartbeat."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .ballot import BallotFn, approve_all
from .chain import is_summary_position, make_block
from .core import Block, BlockKind, Chain, Entry, EntryKind, EntryRef
from .deletion import DeletionDecision, Outcome, admit_transaction, process_delete_request, signature_ok
from .summarize import PruneReport, close_sequence


def admit(chain: Chain, entry: Entry) -> Outcome:
    if entry.kind is EntryKind.DELETE:
        return signature_ok(chain.roles, entry)
    return admit_transaction(chain, entry)


def validate_proposal(chain: Chain, block: Block) -> Outcome:
    """Follower-side checks on a proposed normal or empty block."""
    head = chain.head
    if block.kind is BlockKind.SUMMARY:
        return Outcome("summary-not-propagated")
    if block.number != head.number + 1 or is_summary_position(block.number, chain.config.delta_l):
        return Outcome("wrong-height")
    if block.previous_hash != head.own_hash:
        return Outcome("link-broken")
    if block.own_hash != block.sealed().own_hash:
        return Outcome("hash-mismatch")
    if block.timestamp < head.timestamp:
        return Outcome("time-regression")
    for entry in block.entries:
        verdict = admit(chain, entry)
        if not verdict:
            return verdict
    return Outcome()


def commit_block(chain: Chain, block: Block,
                 ballot: BallotFn = approve_all) -> tuple[Chain, list[DeletionDecision]]:
    """Append an accepted block and act on the deletion requests it carries."""
    return process_requests(chain.append(block), block, ballot)


def process_requests(chain: Chain, block: Block,
                     ballot: BallotFn = approve_all) -> tuple[Chain, list[DeletionDecision]]:
    """Decide the deletion requests of ``block``, already appended to ``chain``."""
    decisions = []
    if block.kind is BlockKind.NORMAL:
        for n, entry in enumerate(block.entries, start=1):
            if entry.kind is EntryKind.DELETE:
                chain, decision = process_delete_request(chain, EntryRef(block.number, n), ballot=ballot)
                decisions.append(decision)
    return chain, decisions


def heartbeat_due(chain: Chain, now: int, has_pending: bool) -> bool:
    return not has_pending and now - chain.head.timestamp >= chain.config.heartbeat_interval


@dataclass
class StepResult:
    blocks: list[Block] = field(default_factory=list)
    reports: list[PruneReport] = field(default_factory=list)
    decisions: list[DeletionDecision] = field(default_factory=list)
    rejected: list[tuple[Entry, str]] = field(default_factory=list)


class Ledger:
    """A node's chain plus its queue of not-yet-sealed entries."""

    def __init__(self, chain: Chain, now: int | None = None):
        self.chain = chain
        self.now = chain.head.timestamp if now is None else now
        self.mempool: list[Entry] = []

    def submit(self, entry: Entry) -> Outcome:
        verdict = admit(self.chain, entry)
        if verdict:
            self.mempool.append(entry)
        return verdict

    def close_if_due(self, ballot: BallotFn = approve_all) -> PruneReport | None:
        if not is_summary_position(self.chain.head.number + 1, self.chain.config.delta_l):
            return None
        self.chain, report = close_sequence(self.chain, ballot=ballot)
        return report

    def seal(self, entries: Iterable[Entry], timestamp: int,
             ballot: BallotFn = approve_all) -> tuple[Block, list[DeletionDecision]]:
        block = make_block(self.chain, tuple(entries), timestamp)
        self.chain, decisions = commit_block(self.chain, block, ballot)
        return block, decisions

    def step(self, now: int | None = None, ballot: BallotFn = approve_all) -> StepResult:
        """Advance to ``now``: close a due sequence, then seal queued entries or
        emit an empty heartbeat block when idle long enough."""
        if now is not None:
            self.now = now
        result = StepResult()
        report = self.close_if_due(ballot)
        if report is not None:
            result.reports.append(report)
            result.blocks.append(self.chain.head)
        if self.mempool:
            admitted = []
            for entry in self.mempool:
                verdict = admit(self.chain, entry)
                if verdict:
                    admitted.append(entry)
                else:
                    result.rejected.append((entry, verdict.reason))
            self.mempool = []
            if admitted:
                block, decisions = self.seal(admitted, self.now, ballot)
                result.blocks.append(block)
                result.decisions.extend(decisions)
        elif heartbeat_due(self.chain, self.now, False):
            block = make_block(self.chain, (), self.now, BlockKind.EMPTY)
            self.chain = self.chain.append(block)
            result.blocks.append(block)
        return result
