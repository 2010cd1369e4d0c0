"""Deletion requests: authorization, semantic cohesion and delayed deletion.

An approved request only marks its target; the entry disappears when its
sequence is merged into a summary block without it.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, replace
from typing import Iterable

from .ballot import ApproveDeletion, BallotFn, approve_all
from .chain import iter_entries, lookup_entry
from .core import (
    BlockKind,
    Chain,
    Cosignature,
    Entry,
    EntryKind,
    EntryRef,
    Roles,
    cosign_message,
)
from .crypto import KeyPair, verify

FOREIGN_ENTRY = "foreign-entry"
NOT_FOUND = "not-found"
NEEDS_COSIGN = "needs-cosign"
DEPENDS_ON_MARKED = "depends-on-marked"
DEPENDS_ON_MISSING = "depends-on-missing"
BLOCKED = "blocked"
NOT_TARGETABLE = "not-targetable"
ALREADY_MARKED = "already-marked"
VOTE_REJECTED = "vote-rejected"
BAD_SIGNATURE = "bad-signature"
UNKNOWN_USER = "unknown-user"


@dataclass(frozen=True)
class Outcome:
    """Pass/fail verdict; ``reason`` is ``None`` on success."""

    reason: str | None = None

    @property
    def ok(self) -> bool:
        return self.reason is None

    def __bool__(self) -> bool:
        return self.ok


def make_delete_request(key: KeyPair, user: str, target: EntryRef,
                        cosignatures: Iterable[Cosignature] = ()) -> Entry:
    return Entry.delete_request(key, user, target, cosignatures)


def cosign(key: KeyPair, user: str, target: EntryRef) -> Cosignature:
    """Consent of a dependent party to deleting ``target``."""
    return Cosignature(user, key.sign(cosign_message(target)))


def signature_ok(roles: Roles, entry: Entry) -> Outcome:
    key = roles.key_for(entry.user)
    if key is None:
        return Outcome(UNKNOWN_USER)
    if not verify(key, entry.signing_bytes, entry.signature):
        return Outcome(BAD_SIGNATURE)
    return Outcome()


def authorize(chain: Chain, request: Entry, roles: Roles | None = None) -> Outcome:
    """Own entries (same key) may be deleted by their user; admins may delete any."""
    roles = roles or chain.roles
    if roles.is_admin(request.user):
        return Outcome()
    found = lookup_entry(chain, request.target)
    if found is None:
        return Outcome(NOT_FOUND)
    if not found.entry.is_data:
        return Outcome(NOT_TARGETABLE)
    mine, theirs = roles.key_for(request.user), roles.key_for(found.entry.user)
    if mine is None or mine != theirs:
        return Outcome(FOREIGN_ENTRY)
    return Outcome()


@dataclass(frozen=True)
class Cohesion:
    status: str  # "coherent" | "needs-cosign" | "blocked"
    parties: frozenset[str] = frozenset()

    @property
    def coherent(self) -> bool:
        return self.status == "coherent"


def dependents(chain: Chain, target: EntryRef) -> dict[EntryRef, Entry]:
    """Live data entries that build on ``target``, directly or transitively."""
    reverse: dict[EntryRef, list[tuple[EntryRef, Entry]]] = defaultdict(list)
    for ref, entry, _ in iter_entries(chain):
        if entry.is_data:
            for dep in entry.depends_on:
                reverse[dep].append((ref, entry))
    found: dict[EntryRef, Entry] = {}
    stack = [target]
    while stack:
        for ref, entry in reverse.get(stack.pop(), ()):
            if ref not in found and ref != target:
                found[ref] = entry
                stack.append(ref)
    return found


def check_cohesion(chain: Chain, target: EntryRef, cosignatures: Iterable[Cosignature] = (),
                   requester: str | None = None, roles: Roles | None = None) -> Cohesion:
    roles = roles or chain.roles
    deps = dependents(chain, target)
    parties = {e.user for ref, e in deps.items() if ref not in chain.pending_deletions}
    parties.discard(requester)
    if not parties:
        return Cohesion("coherent")
    if any(roles.key_for(p) is None for p in parties):
        return Cohesion("blocked", frozenset(parties))
    message = cosign_message(target)
    signed = {c.user for c in cosignatures
              if c.user in parties and verify(roles.key_for(c.user), message, c.signature)}
    if signed != parties:
        return Cohesion("needs-cosign", frozenset(parties))
    return Cohesion("coherent", frozenset(parties))


@dataclass(frozen=True)
class DeletionDecision:
    request: EntryRef
    target: EntryRef | None
    verdict: str  # "approved" | "no-effect"
    reason: str | None = None
    required_cosigners: frozenset[str] = frozenset()

    @property
    def approved(self) -> bool:
        return self.verdict == "approved"

    def to_json(self) -> dict:
        return {
            "request": [self.request.block, self.request.entry],
            "target": [self.target.block, self.target.entry] if self.target else None,
            "verdict": self.verdict,
            "reason": self.reason,
            "required_cosigners": sorted(self.required_cosigners),
        }


def evaluate_delete_request(chain: Chain, request: Entry, roles: Roles | None = None,
                            cosignatures: Iterable[Cosignature] | None = None) -> tuple[str | None, frozenset[str]]:
    """Local checks a quorum member runs before voting: (reason or None, cosigners)."""
    roles = roles or chain.roles
    sig = signature_ok(roles, request)
    if not sig:
        return sig.reason, frozenset()
    auth = authorize(chain, request, roles)
    if not auth:
        return auth.reason, frozenset()
    if request.target in chain.pending_deletions:
        return ALREADY_MARKED, frozenset()
    if lookup_entry(chain, request.target) is None:
        return NOT_FOUND, frozenset()
    cosigs = request.cosignatures if cosignatures is None else tuple(cosignatures)
    cohesion = check_cohesion(chain, request.target, cosigs, requester=request.user, roles=roles)
    if cohesion.status == "needs-cosign":
        return NEEDS_COSIGN, cohesion.parties
    if cohesion.status == "blocked":
        return BLOCKED, cohesion.parties
    return None, cohesion.parties


def process_delete_request(chain: Chain, request_location: EntryRef, roles: Roles | None = None,
                           cosignatures: Iterable[Cosignature] | None = None,
                           ballot: BallotFn = approve_all) -> tuple[Chain, DeletionDecision]:
    """Mark the target of an in-chain deletion request, or record it as having no effect.

    Block contents are never touched; only ``pending_deletions`` changes.
    """
    block = chain.block(request_location.block)
    if block is None or block.kind is not BlockKind.NORMAL or not 1 <= request_location.entry <= len(block.entries):
        raise ValueError(f"no entry at {request_location}")
    request = block.entries[request_location.entry - 1]
    if request.kind is not EntryKind.DELETE:
        raise ValueError(f"entry at {request_location} is not a deletion request")
    reason, parties = evaluate_delete_request(chain, request, roles, cosignatures)
    if reason is None:
        vote = ballot(ApproveDeletion(request.target, request_location))
        if not vote.approved:
            reason = VOTE_REJECTED
    if reason is not None:
        return chain, DeletionDecision(request_location, request.target, "no-effect", reason, parties)
    marked = replace(chain, pending_deletions=chain.pending_deletions | {request.target})
    return marked, DeletionDecision(request_location, request.target, "approved", None, parties)


def admit_transaction(chain: Chain, entry: Entry, roles: Roles | None = None) -> Outcome:
    """Gate for new entries: valid signature, and no dependency on marked or vanished data."""
    roles = roles or chain.roles
    sig = signature_ok(roles, entry)
    if not sig:
        return sig
    for dep in entry.depends_on:
        if dep in chain.pending_deletions:
            return Outcome(DEPENDS_ON_MARKED)
        if lookup_entry(chain, dep) is None:
            return Outcome(DEPENDS_ON_MISSING)
    return Outcome()


def replay_pending(chain: Chain, ballot: BallotFn = approve_all) -> frozenset[EntryRef]:
    """Rebuild ``pending_deletions`` from the deletion requests in the live chain.

    Each request is judged against the chain prefix ending at its own block,
    as it was when the block was appended.
    """
    state = replace(chain, blocks=chain.blocks[:1], pending_deletions=frozenset())
    for i, block in enumerate(chain.blocks):
        if i:
            state = replace(state, blocks=chain.blocks[: i + 1])
        if block.kind is not BlockKind.NORMAL:
            continue
        for n, e in enumerate(block.entries, start=1):
            if e.kind is EntryKind.DELETE:
                state, _ = process_delete_request(state, EntryRef(block.number, n), ballot=ballot)
    return frozenset(r for r in state.pending_deletions if lookup_entry(chain, r) is not None)
