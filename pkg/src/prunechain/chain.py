"""Chain verification, entry lookup and block construction helpers."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .core import (
    AnyEntry,
    Block,
    BlockKind,
    Chain,
    Entry,
    EntryRef,
    SummaryEntry,
    ZERO_NONCE,
)
from .crypto import verify


def is_summary_position(number: int, delta_l: int) -> bool:
    """Summary blocks sit at every block number n with (n + 1) % delta_l == 0.

    Block numbers never reset, so every node derives the same positions no
    matter where its Genesis marker currently is.
    """
    return (number + 1) % delta_l == 0


def is_sequence_start(number: int, delta_l: int) -> bool:
    return number % delta_l == 0


@dataclass(frozen=True)
class Verdict:
    at: int | None = None
    reason: str | None = None
    detail: str = ""

    @property
    def valid(self) -> bool:
        return self.reason is None

    def __bool__(self) -> bool:
        return self.valid

    def __str__(self) -> str:
        return "Valid" if self.valid else f"Broken(at={self.at}, reason={self.reason})"


VALID = Verdict()


def _broken(block: Block, reason: str, detail: str = "") -> Verdict:
    return Verdict(block.number, reason, detail)


def _check_signature(chain: Chain, entry: Entry) -> str | None:
    key = chain.roles.key_for(entry.user)
    if key is None:
        return "unknown-user"
    if not verify(key, entry.signing_bytes, entry.signature):
        return "bad-signature"
    return None


def verify_chain(chain: Chain) -> Verdict:
    """Check the live chain from the Genesis marker to the head.

    Returns the first offending block number and a reason code, checking in
    order: own hash, numbering, hash link, timestamps, summary placement and
    entry signatures.
    """
    delta = chain.config.delta_l
    prev: Block | None = None
    for block in chain.blocks:
        if block.own_hash != block.sealed().own_hash:
            return _broken(block, "hash-mismatch")
        if prev is None:
            if not is_sequence_start(block.number, delta):
                return _broken(block, "marker-position")
        else:
            if block.number != prev.number + 1:
                return _broken(block, "number-gap")
            if block.previous_hash != prev.own_hash:
                return _broken(block, "link-broken")
            if block.timestamp < prev.timestamp:
                return _broken(block, "time-regression")
            if block.kind is BlockKind.SUMMARY and block.timestamp != prev.timestamp:
                return _broken(block, "summary-timestamp")
        if (block.kind is BlockKind.SUMMARY) != is_summary_position(block.number, delta):
            return _broken(block, "summary-position")
        for entry in block.entries:
            inner = entry.inner if isinstance(entry, SummaryEntry) else entry
            problem = _check_signature(chain, inner)
            if problem:
                return _broken(block, problem, inner.user)
        prev = block
    return VALID


@dataclass(frozen=True)
class Found:
    ref: EntryRef
    entry: Entry
    in_summary: bool
    resident_block: int

    @property
    def location(self) -> str:
        return "in-summary" if self.in_summary else "live"


def lookup_entry(chain: Chain, ref: EntryRef) -> Found | None:
    """Find an entry by its original coordinates, in live blocks or summaries.

    ``None`` means not found (never stored, already dropped, or pruned).
    """
    block = chain.block(ref.block)
    if block is not None and block.kind is BlockKind.NORMAL:
        if 1 <= ref.entry <= len(block.entries):
            return Found(ref, block.entries[ref.entry - 1], False, block.number)
        return None
    hit = chain.summary_index.get(ref)
    if hit is not None:
        summary_entry, resident = hit
        return Found(ref, summary_entry.inner, True, resident)
    return None


def iter_entries(chain: Chain) -> Iterable[tuple[EntryRef, Entry, int]]:
    """Every live entry as (original ref, entry, resident block number)."""
    for block in chain.blocks:
        if block.kind is BlockKind.SUMMARY:
            for s in block.entries:
                yield s.origin, s.inner, block.number
        else:
            for n, e in enumerate(block.entries, start=1):
                yield EntryRef(block.number, n), e, block.number


def make_block(chain: Chain, entries: Iterable[AnyEntry], timestamp: int,
               kind: BlockKind = BlockKind.NORMAL, **extra) -> Block:
    head = chain.head
    if kind is BlockKind.NORMAL:
        extra.setdefault("nonce", ZERO_NONCE)
    return Block(kind, head.number + 1, timestamp, head.own_hash, tuple(entries), **extra).sealed()
