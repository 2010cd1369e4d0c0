"""Sequences, summary blocks and pruning of the oldest sequences.

The chain is cut into sequences of ``delta_l`` blocks, each closed by a
summary block that every node builds locally.  When the chain outgrows
``l_max`` the oldest sequences are merged into the next summary block,
leaving out deleted, expired and deletion-request entries, and the Genesis
marker moves to the block after the last merged summary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple

from .ballot import Ballot, BallotFn, MarkerShift, approve_all
from .chain import (
    is_sequence_start,
    is_summary_position,
    lookup_entry,
    make_block,
    verify_chain,
)
from .core import (
    Block,
    BlockKind,
    Chain,
    Entry,
    EntryRef,
    RedundancyRef,
    SummaryEntry,
    compute_merkle_root,
)
from .errors import GuardViolation, InvalidChain, InvalidMarker, NotEnoughSequences, VoteRejected

DELETED = "deleted-on-request"
EXPIRED_TIME = "expired-by-time"
EXPIRED_BLOCK = "expired-by-block"
DELETION_REQUEST = "deletion-request-never-copied"
DROP_REASONS = (DELETED, EXPIRED_TIME, EXPIRED_BLOCK, DELETION_REQUEST)


@dataclass(frozen=True)
class Sequence:
    index: int  # 1-based among live sequences, oldest first
    first_block: int
    last_block: int
    complete: bool  # closed by a summary block
    ordinal: int  # absolute 1-based sequence number; survives marker shifts

    @property
    def length(self) -> int:
        return self.last_block - self.first_block + 1

    def to_json(self) -> dict:
        return {"index": self.index, "ordinal": self.ordinal, "first_block": self.first_block,
                "last_block": self.last_block, "length": self.length, "complete": self.complete}


def needs_summary(chain: Chain, next_block_number: int) -> bool:
    return is_summary_position(next_block_number, chain.config.delta_l)


def sequence_boundaries(chain: Chain, check: bool = True) -> list[Sequence]:
    if check:
        verdict = verify_chain(chain)
        if not verdict:
            raise InvalidChain(str(verdict), code=verdict.reason)
    delta = chain.config.delta_l
    head = chain.head.number
    out = []
    first = chain.marker
    while first <= head:
        last = min(head, first + delta - 1)
        ordinal = first // delta + 1
        out.append(Sequence(len(out) + 1, first, last, is_summary_position(last, delta), ordinal))
        first = last + 1
    return out


def complete_sequences(chain: Chain) -> list[Sequence]:
    return [s for s in sequence_boundaries(chain, check=False) if s.complete]


def apply_expiry(entry: Entry, now: int, head: int) -> str | None:
    """Drop reason for a temporary entry whose bound is exceeded, else ``None``.

    The comparison is strict: an entry expiring at tick ``now`` is kept.
    """
    if entry.expiry is None:
        return None
    if entry.expiry.kind == "time":
        return EXPIRED_TIME if entry.expiry.value < now else None
    return EXPIRED_BLOCK if entry.expiry.value < head else None


@dataclass(frozen=True)
class GuardResult:
    reason: str | None = None

    @property
    def passed(self) -> bool:
        return self.reason is None

    def __bool__(self) -> bool:
        return self.passed


def prune_guards(chain: Chain, merge_count: int = 1, extra_blocks: int = 0) -> GuardResult:
    """Would cutting the ``merge_count`` oldest sequences leave enough chain?

    ``extra_blocks`` counts blocks about to be appended after the cut (the new
    summary during a prune); they carry the head timestamp.
    """
    cfg = chain.config
    seqs = complete_sequences(chain)
    if merge_count < 1 or merge_count > len(seqs):
        return GuardResult("no-sequence")
    cut = seqs[merge_count - 1].last_block
    remaining = [b for b in chain.blocks if b.number > cut]
    if len(remaining) + extra_blocks < cfg.l_min:
        return GuardResult("length")
    summaries = sum(1 for b in remaining if b.kind is BlockKind.SUMMARY) + extra_blocks
    if summaries < cfg.min_summary_blocks:
        return GuardResult("summary-blocks")
    span = chain.head.timestamp - remaining[0].timestamp if remaining else 0
    if span < cfg.min_time_coverage:
        return GuardResult("time")
    return GuardResult()


class MergeResult(NamedTuple):
    carry: list[SummaryEntry]
    merged: list[Sequence]
    dropped: list[tuple[EntryRef, str]]


def _choose_merge_count(chain: Chain) -> tuple[int, str | None]:
    """Fewest oldest sequences that bring the chain to l_max, within the guards."""
    cfg = chain.config
    seqs = complete_sequences(chain)
    first = prune_guards(chain, 1, extra_blocks=1)
    if not first:
        return 0, first.reason
    k, total = 1, seqs[0].length
    while chain.length + 1 - total > cfg.l_max:
        if k == len(seqs):
            return k, "no-sequence"
        nxt = prune_guards(chain, k + 1, extra_blocks=1)
        if not nxt:
            return k, nxt.reason
        total += seqs[k].length
        k += 1
    return k, None


def merge_oldest(chain: Chain, count: int | None = None, now: int | None = None) -> MergeResult:
    """Collect the surviving content of the oldest sequences for the next summary."""
    if count is None:
        count, reason = _choose_merge_count(chain)
        if count == 0:
            raise GuardViolation(f"pruning blocked by guard: {reason}", code=reason)
    else:
        guard = prune_guards(chain, count, extra_blocks=1)
        if not guard:
            raise GuardViolation(f"pruning blocked by guard: {guard.reason}", code=guard.reason)
    now = chain.head.timestamp if now is None else now
    head = chain.head.number
    merged = complete_sequences(chain)[:count]
    carry: list[SummaryEntry] = []
    dropped: list[tuple[EntryRef, str]] = []
    for seq in merged:
        for number in range(seq.first_block, seq.last_block + 1):
            block = chain.block(number)
            if block.kind is BlockKind.NORMAL:
                for n, e in enumerate(block.entries, start=1):
                    if not e.is_data:
                        dropped.append((EntryRef(number, n), DELETION_REQUEST))
            for s in block.as_summary_entries():
                if s.origin in chain.pending_deletions:
                    dropped.append((s.origin, DELETED))
                    continue
                reason = apply_expiry(s.inner, now, head)
                if reason:
                    dropped.append((s.origin, reason))
                else:
                    carry.append(s)
    return MergeResult(carry, merged, dropped)


def embed_redundancy(chain: Chain, summary: Block, survivors_from: int | None = None) -> Block:
    """Reference the middle surviving sequence by its Merkle root.

    The live sequences counted are those starting at or after
    ``survivors_from`` (the marker a prune is moving to), including the one
    ``summary`` closes.  The middle is the ceil(n/2)-th oldest, which for
    n >= 2 is always an older, complete sequence.
    """
    start = chain.marker if survivors_from is None else survivors_from
    seqs = [s for s in complete_sequences(chain) if s.first_block >= start]
    n = len(seqs) + 1
    if n < 2:
        raise NotEnoughSequences(f"{n} live sequence(s)")
    middle = seqs[math.ceil(n / 2) - 1]
    root = compute_merkle_root(sequence_content(chain, middle))
    return replace(summary, redundancy_ref=RedundancyRef(middle.ordinal, root)).sealed()


def sequence_content(chain: Chain, seq: Sequence) -> list[SummaryEntry]:
    out: list[SummaryEntry] = []
    for number in range(seq.first_block, seq.last_block + 1):
        out.extend(chain.block(number).as_summary_entries())
    return out


def build_summary_block(chain: Chain, carry: list[SummaryEntry],
                        survivors_from: int | None = None) -> Block:
    nxt = chain.head.number + 1
    if not needs_summary(chain, nxt):
        raise InvalidChain(f"block {nxt} is not a summary position", code="summary-position")
    summary = make_block(chain, carry, chain.head.timestamp, BlockKind.SUMMARY)
    if chain.config.redundancy_enabled:
        try:
            summary = embed_redundancy(chain, summary, survivors_from)
        except NotEnoughSequences:
            pass
    return summary


@dataclass
class PruneReport:
    old_marker: int
    new_marker: int
    old_length: int
    new_length: int
    merged_sequences: list[Sequence] = field(default_factory=list)
    dropped_entries: list[tuple[EntryRef, str]] = field(default_factory=list)
    summary_block: int | None = None
    guard: str | None = None  # reason when a guard stopped the prune short
    ballot: Ballot | None = None

    @property
    def merged_length(self) -> int:
        return sum(s.length for s in self.merged_sequences)

    def to_json(self) -> dict:
        return {
            "old_marker": self.old_marker,
            "new_marker": self.new_marker,
            "old_length": self.old_length,
            "new_length": self.new_length,
            "merged_sequences": [s.to_json() for s in self.merged_sequences],
            "dropped_entries": [{"ref": [r.block, r.entry], "reason": why} for r, why in self.dropped_entries],
            "summary_block": self.summary_block,
            "guard": self.guard,
            "ballot": self.ballot.to_json() if self.ballot else None,
        }


def _live_pending(chain: Chain) -> frozenset[EntryRef]:
    return frozenset(r for r in chain.pending_deletions if lookup_entry(chain, r) is not None)


def shift_marker(chain: Chain, new_marker: int, ballot: Ballot) -> Chain:
    if ballot.subject != MarkerShift(new_marker) or not ballot.approved:
        raise VoteRejected(f"marker shift to {new_marker} not approved")
    if not (chain.marker < new_marker <= chain.head.number) or not is_sequence_start(new_marker, chain.config.delta_l):
        raise InvalidMarker(f"{new_marker} is not a live sequence start")
    shifted = replace(chain, blocks=chain.blocks[new_marker - chain.marker:])
    return replace(shifted, pending_deletions=_live_pending(shifted))


def close_sequence(chain: Chain, now: int | None = None,
                   ballot: BallotFn = approve_all) -> tuple[Chain, PruneReport]:
    """Append the summary block due at the next position, pruning if the chain
    is longer than ``l_max``.  Guard stops and rejected votes are reported,
    not raised; the summary is appended either way."""
    old_len, old_marker = chain.length, chain.marker
    report = PruneReport(old_marker, old_marker, old_len, old_len)
    count = 0
    if chain.length > chain.config.l_max:
        count, report.guard = _choose_merge_count(chain)
    if count:
        result = merge_oldest(chain, count, now)
        new_marker = result.merged[-1].last_block + 1
        report.ballot = ballot(MarkerShift(new_marker))
        if report.ballot.approved:
            summary = build_summary_block(chain, result.carry, survivors_from=new_marker)
            chain = shift_marker(chain.append(summary), new_marker, report.ballot)
            report.merged_sequences = result.merged
            report.dropped_entries = result.dropped
            report.new_marker = new_marker
            report.summary_block = summary.number
            report.new_length = chain.length
            return chain, report
    summary = build_summary_block(chain, [])
    chain = chain.append(summary)
    report.summary_block = summary.number
    report.new_length = chain.length
    return chain, report


def prune(chain: Chain, now: int | None = None,
          ballot: BallotFn = approve_all) -> tuple[Chain, PruneReport]:
    """Shrink a chain longer than ``l_max`` by merging its oldest sequences.

    No-op when the chain is within ``l_max`` or the next block is not a
    summary position (the merge waits for the next periodic summary).
    """
    if chain.length <= chain.config.l_max or not needs_summary(chain, chain.head.number + 1):
        return chain, PruneReport(chain.marker, chain.marker, chain.length, chain.length)
    verdict = verify_chain(chain)
    if not verdict:
        raise InvalidChain(str(verdict), code=verdict.reason)
    count, reason = _choose_merge_count(chain)
    if count == 0:
        raise GuardViolation(f"pruning blocked by guard: {reason}", code=reason)
    new_chain, report = close_sequence(chain, now, ballot)
    if report.ballot is not None and not report.ballot.approved:
        raise VoteRejected(f"marker shift to {report.ballot.subject.new_marker} not approved")
    return new_chain, report


def audit_redundancy(chain: Chain) -> list[tuple[int, str]]:
    """Recheck every redundancy reference whose sequence is still live."""
    seqs = {s.ordinal: s for s in complete_sequences(chain)}
    problems = []
    for block in chain.blocks:
        ref = block.redundancy_ref
        if ref is None:
            continue
        seq = seqs.get(ref.sequence_index)
        if seq is None:
            continue  # pruned since; nothing left to compare against
        if seq.last_block >= block.number:
            problems.append((block.number, "reference-not-older"))
        elif compute_merkle_root(sequence_content(chain, seq)) != ref.merkle_root:
            problems.append((block.number, "merkle-mismatch"))
    return problems
