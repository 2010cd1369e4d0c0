"""Deterministic discrete-event simulation of a quorum of anchor nodes.

Blocks are produced by a round-robin proposer and acknowledged by majority
vote.  Summary blocks are never sent over the wire: every node builds them
locally and the hashes are compared to detect forks.  All randomness comes
from one seeded generator and messages are processed in
(deliver_at, sender, arrival index) order, so a configuration always yields
the same trace.
"""

from __future__ import annotations

import hashlib
import heapq
import itertools
import json
import random
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Iterable, Sequence

from ..ballot import Ballot, MarkerShift, Subject
from ..chain import is_sequence_start, iter_entries, make_block, verify_chain
from ..core import (
    Block,
    BlockKind,
    Chain,
    ChainConfig,
    Entry,
    EntryRef,
    Expiry,
    RedundancyRef,
    Roles,
    new_chain,
)
from ..crypto import KeyPair
from ..deletion import cosign, evaluate_delete_request
from ..errors import HeightMismatch, NotProposer, ScriptError
from ..ledger import Ledger, admit, heartbeat_due, process_requests, validate_proposal
from ..schema import encode_payload

TRACE_VERSION = 1
ADMIN = "QUORUM"
ACTIONS = ("submit", "delete", "corrupt", "partition", "idle")
FAULTS = ("summary", "vote", "unfiltered")


class MessageKind(str, Enum):
    SUBMIT_ENTRY = "SubmitEntry"
    PROPOSE_BLOCK = "ProposeBlock"
    SUMMARY_HASH_ANNOUNCE = "SummaryHashAnnounce"
    BALLOT_VOTE = "BallotVote"
    SYNC_REQUEST = "SyncRequest"
    SYNC_RESPONSE = "SyncResponse"


CLIENT = -1


@dataclass(order=True)
class Message:
    deliver_at: int
    sender: int
    seq: int
    kind: MessageKind = field(compare=False)
    recipient: int = field(compare=False)
    payload: Any = field(compare=False, default=None)


@dataclass(frozen=True)
class ScriptEvent:
    at: int
    action: str
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SimConfig:
    n_nodes: int = 4
    seed: int = 0
    latency: tuple[int, int] = (1, 3)
    script: tuple[ScriptEvent, ...] = ()
    heartbeat_interval: int = 2
    chain: ChainConfig = field(default_factory=ChainConfig)
    users: tuple[str, ...] = ("ALPHA", "BRAVO", "CHARLIE")
    duration: int | None = None
    view_timeout: int | None = None

    def __post_init__(self):
        if self.n_nodes < 1:
            raise ScriptError("need at least one node")
        lo, hi = self.latency
        if not 1 <= lo <= hi:
            raise ScriptError("latency bounds must satisfy 1 <= min <= max")
        object.__setattr__(self, "latency", (int(lo), int(hi)))
        object.__setattr__(self, "script", tuple(sorted(self.script, key=lambda e: e.at)))
        object.__setattr__(self, "users", tuple(self.users))
        if self.chain.heartbeat_interval != self.heartbeat_interval:
            object.__setattr__(self, "chain", replace(self.chain, heartbeat_interval=self.heartbeat_interval))
        for ev in self.script:
            _check_event(ev, self)

    @property
    def timeout(self) -> int:
        """Ticks after the head's timestamp before the next proposer takes over."""
        if self.view_timeout is not None:
            return self.view_timeout
        return 2 * (self.latency[1] + self.heartbeat_interval) + 2

    @property
    def end(self) -> int:
        if self.duration is not None:
            return self.duration
        last = self.script[-1].at if self.script else 0
        settle = 3 * self.chain.delta_l * (self.heartbeat_interval + self.latency[1]) + 2 * self.timeout
        return last + settle


def _check_event(ev: ScriptEvent, cfg: SimConfig) -> None:
    if not isinstance(ev.at, int) or ev.at < 0:
        raise ScriptError(f"event time must be a non-negative integer: {ev!r}")
    if ev.action not in ACTIONS:
        raise ScriptError(f"unknown action {ev.action!r}")
    p = ev.params
    if ev.action in ("submit", "delete"):
        if p.get("user") not in cfg.users and p.get("user") != ADMIN:
            raise ScriptError(f"unknown user in {ev!r}")
        if ev.action == "delete":
            target = p.get("target")
            if not (isinstance(target, dict) and "user" in target) and len(target or ()) != 2:
                raise ScriptError(f"delete needs target [block, entry] or {{user: name}}: {ev!r}")
    if ev.action == "corrupt":
        if not 0 <= int(p.get("node", -1)) < cfg.n_nodes:
            raise ScriptError(f"corrupt needs a valid node: {ev!r}")
        if p.get("mode", "summary") not in FAULTS:
            raise ScriptError(f"unknown fault mode in {ev!r}")
    if ev.action == "partition":
        groups = p.get("groups", [])
        members = [n for g in groups for n in g]
        if groups and sorted(members) != list(range(cfg.n_nodes)):
            raise ScriptError(f"partition groups must cover every node exactly once: {ev!r}")


# -- nodes --------------------------------------------------------------------

@dataclass
class AnchorNode:
    node_id: int
    ledger: Ledger
    group: tuple[int, ...] = ()
    faulty: bool = False
    fault: str | None = None
    future: dict[int, tuple[int | None, Block, tuple[int, ...]]] = field(default_factory=dict)
    summary_hashes: dict[int, bytes] = field(default_factory=dict)
    peer_summaries: dict[int, dict[int, bytes]] = field(default_factory=dict)
    seen: set[bytes] = field(default_factory=set)
    unchecked: set[bytes] = field(default_factory=set)
    proposals: dict[tuple[int, bytes], dict] = field(default_factory=dict)

    @property
    def chain(self) -> Chain:
        return self.ledger.chain

    def latest_summary(self) -> Block | None:
        for b in reversed(self.chain.blocks):
            if b.kind is BlockKind.SUMMARY:
                return b
        return None


def proposer_for(group: Sequence[int], height: int, round_: int) -> int:
    members = sorted(group)
    return members[(height + round_) % len(members)]


def view_round(head: Block, timestamp: int, timeout: int) -> int:
    return max(0, timestamp - head.timestamp) // timeout


def traceable(evidence: Chain, mine: Chain) -> bool:
    """Do two chains agree on the newest block number both still hold?"""
    k = min(evidence.head.number, mine.head.number)
    a, b = evidence.block(k), mine.block(k)
    return a is not None and b is not None and a.own_hash == b.own_hash


def node_vote(node: AnchorNode, subject: Subject, evidence: Chain | None = None) -> bool:
    """A quorum member's yes/no on a subject, judged on the presented chain."""
    if node.fault == "vote":
        return False
    evidence = node.chain if evidence is None else evidence
    if not traceable(evidence, node.chain):
        return False
    if isinstance(subject, MarkerShift):
        m = subject.new_marker
        return (evidence.length > evidence.config.l_max
                and evidence.marker < m <= evidence.head.number
                and is_sequence_start(m, evidence.config.delta_l))
    block = evidence.block(subject.request.block)
    if block is None or not 1 <= subject.request.entry <= len(block.entries):
        return False
    request = block.entries[subject.request.entry - 1]
    if request.target != subject.target:
        return False
    prefix = replace(evidence, blocks=evidence.blocks[: subject.request.block - evidence.marker + 1])
    reason, _ = evaluate_delete_request(prefix, request)
    return reason is None


def hold_ballot(nodes: Iterable[AnchorNode], subject: Subject, evidence: Chain | None = None,
                quorum_size: int | None = None) -> Ballot:
    """Collect votes; members outside ``nodes`` (unreachable) count as no."""
    nodes = list(nodes)
    votes = {n.node_id: node_vote(n, subject, evidence) for n in nodes}
    if quorum_size is not None:
        for i in range(quorum_size):
            votes.setdefault(i, False)
    return Ballot(subject, votes)


def produce_block(node: AnchorNode, pending: Sequence[Entry], now: int, timeout: int,
                  filtered: bool = True) -> Block:
    chain = node.chain
    height = chain.head.number + 1
    if node.node_id != proposer_for(node.group, height, view_round(chain.head, now, timeout)):
        raise NotProposer(f"node {node.node_id} is not the proposer for height {height}")
    entries = [e for e in pending if not filtered or admit(chain, e)]
    if entries:
        return make_block(chain, entries, now)
    return make_block(chain, (), now, BlockKind.EMPTY)


def heartbeat(node: AnchorNode, now: int) -> Block | None:
    """Empty block proposal when the node has been idle for a heartbeat interval."""
    if heartbeat_due(node.chain, now, bool(node.ledger.mempool)):
        return make_block(node.chain, (), now, BlockKind.EMPTY)
    return None


@dataclass(frozen=True)
class SyncResult:
    height: int
    partitions: tuple[frozenset[int], ...]

    @property
    def in_sync(self) -> bool:
        return len(self.partitions) == 1

    def to_json(self) -> dict:
        return {"height": self.height, "status": "in-sync" if self.in_sync else "fork",
                "partitions": [sorted(p) for p in self.partitions]}


def _partition(hashes: dict[int, bytes], height: int) -> SyncResult:
    groups: dict[bytes, set[int]] = {}
    for node_id, h in sorted(hashes.items()):
        groups.setdefault(h, set()).add(node_id)
    parts = sorted((frozenset(g) for g in groups.values()), key=lambda g: (-len(g), min(g)))
    return SyncResult(height, tuple(parts))


def sync_check(nodes: Iterable[AnchorNode], height: int | None = None) -> SyncResult:
    """Compare the summary block each node built at one summary height."""
    nodes = list(nodes)
    if height is None:
        latest = {n.node_id: max(n.summary_hashes, default=None) for n in nodes}
        if len(set(latest.values())) != 1 or None in latest.values():
            raise HeightMismatch(f"latest summary heights differ: {latest}")
        height = next(iter(latest.values()))
    hashes = {}
    for n in nodes:
        if height not in n.summary_hashes:
            raise HeightMismatch(f"node {n.node_id} has no summary at {height}")
        hashes[n.node_id] = n.summary_hashes[height]
    return _partition(hashes, height)


@dataclass(frozen=True)
class ClientSync:
    accepted: bool
    chain: Chain | None = None
    reason: str | None = None


def status_quo(anchors: Iterable[AnchorNode]) -> tuple[int, bytes] | None:
    """Newest (number, hash) held by a strict majority of the trusted anchors."""
    anchors = list(anchors)
    counts: dict[tuple[int, bytes], int] = {}
    for a in anchors:
        for b in a.chain.blocks:
            key = (b.number, b.own_hash)
            counts[key] = counts.get(key, 0) + 1
    attested = [k for k, c in counts.items() if 2 * c > len(anchors)]
    return max(attested, default=None)


def client_sync(trusted_anchors: Iterable[AnchorNode], untrusted: AnchorNode | Chain) -> ClientSync:
    """Accept a chain only if it is valid and contains the anchors' status quo.

    Length and block index play no role.
    """
    chain = untrusted.chain if isinstance(untrusted, AnchorNode) else untrusted
    quo = status_quo(trusted_anchors)
    if quo is None:
        return ClientSync(False, reason="no-status-quo")
    if not verify_chain(chain):
        return ClientSync(False, reason="invalid-chain")
    block = chain.block(quo[0])
    if block is None or block.own_hash != quo[1]:
        return ClientSync(False, reason="not-traceable")
    return ClientSync(True, chain)


# -- trace --------------------------------------------------------------------

@dataclass
class Trace:
    events: list[dict] = field(default_factory=list)
    summary_hashes: dict[int, dict[int, bytes]] = field(default_factory=dict)
    nodes: list[AnchorNode] = field(default_factory=list)

    def record(self, now: int, event: str, **data) -> None:
        self.events.append({"t": now, "event": event, **data})

    def sync_results(self) -> list[SyncResult]:
        """Fork check at every summary height that all nodes reached."""
        n = len(self.nodes)
        return [_partition(h, height) for height, h in sorted(self.summary_hashes.items()) if len(h) == n]

    def first_fork(self) -> SyncResult | None:
        return next((r for r in self.sync_results() if not r.in_sync), None)

    def to_jsonl(self) -> str:
        header = {"format": "prunechain-trace", "version": TRACE_VERSION}
        lines = [json.dumps(header)] + [json.dumps(e, sort_keys=True) for e in self.events]
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        return hashlib.sha256(self.to_jsonl().encode()).hexdigest()


# -- simulator ------------------------------------------------------------------

class Simulator:
    def __init__(self, config: SimConfig):
        self.config = config
        self.rng = random.Random(config.seed)
        self.keys = {u: KeyPair.derive(config.seed, u) for u in (*config.users, ADMIN)}
        roles = Roles({u: k.public for u, k in self.keys.items()}, admins={ADMIN})
        everyone = tuple(range(config.n_nodes))
        self.nodes = [AnchorNode(i, Ledger(new_chain(config.chain, roles)), group=everyone)
                      for i in range(config.n_nodes)]
        self.queue: list[Message] = []
        self.counter = itertools.count()
        self.trace = Trace(nodes=self.nodes)

    # messaging
    def send(self, now: int, kind: MessageKind, sender: int, recipient: int, payload: Any) -> None:
        # A partition cuts links for messages sent after it; those in flight still arrive.
        if sender != CLIENT and recipient not in self.nodes[sender].group:
            self.trace.record(now, "dropped", kind=kind.value, sender=sender, recipient=recipient)
            return
        lo, hi = self.config.latency
        at = now + self.rng.randint(lo, hi) if sender != CLIENT else now
        heapq.heappush(self.queue, Message(at, sender, next(self.counter), kind, recipient, payload))

    def broadcast(self, now: int, kind: MessageKind, node: AnchorNode, payload: Any) -> None:
        for peer in node.group:
            if peer != node.node_id:
                self.send(now, kind, node.node_id, peer, payload)

    # script
    def apply(self, ev: ScriptEvent, now: int) -> None:
        p = ev.params
        self.trace.record(now, "script", action=ev.action, params=_jsonable(p))
        if ev.action in ("submit", "delete"):
            user = p["user"]
            key = self.keys[user]
            if ev.action == "submit":
                expiry = None
                if "expiry" in p:
                    (kind, value), = dict(p["expiry"]).items()
                    expiry = Expiry(kind, int(value))
                deps = [EntryRef(int(b), int(e)) for b, e in p.get("depends_on", ())]
                entry = Entry.data(key, user, encode_payload(p.get("payload", "")), expiry=expiry, depends_on=deps)
            else:
                target = self.resolve_target(p["target"], self.nodes[int(p.get("via", 0))])
                if target is None:
                    self.trace.record(now, "script-skipped", reason="no-target", params=_jsonable(p))
                    return
                cosigs = [cosign(self.keys[c], c, target) for c in p.get("cosigners", ())]
                entry = Entry.delete_request(key, user, target, cosigs)
            via = self.nodes[int(p.get("via", 0))]
            if p.get("unchecked"):
                via.unchecked.add(entry.signature)
            self.send(now, MessageKind.SUBMIT_ENTRY, CLIENT, via.node_id, entry)
        elif ev.action == "corrupt":
            node = self.nodes[int(p["node"])]
            node.faulty, node.fault = True, p.get("mode", "summary")
        elif ev.action == "partition":
            groups = p.get("groups") or [list(range(self.config.n_nodes))]
            for g in groups:
                for n in g:
                    self.nodes[n].group = tuple(sorted(g))

    @staticmethod
    def resolve_target(target, node: AnchorNode) -> EntryRef | None:
        """``[block, entry]``, or ``{user: NAME}`` for that user's newest live data entry."""
        if not isinstance(target, dict):
            return EntryRef(*map(int, target))
        refs = [ref for ref, e, _ in iter_entries(node.chain) if e.is_data and e.user == target["user"]]
        return max(refs, default=None)

    # handlers
    def deliver(self, msg: Message, now: int) -> None:
        node = self.nodes[msg.recipient]
        self.trace.record(now, "message", kind=msg.kind.value, sender=msg.sender, recipient=node.node_id,
                          payload=_describe(msg.payload))
        if msg.kind is MessageKind.SUBMIT_ENTRY:
            self.on_submit(node, msg.payload, msg.sender, now)
        elif msg.kind is MessageKind.PROPOSE_BLOCK:
            block, group = msg.payload
            if block.number > node.chain.head.number:
                node.future[block.number] = (msg.sender, block, group)
            self.drain(node, now)
            if node.future and min(node.future) > node.chain.head.number + 1:
                self.send(now, MessageKind.SYNC_REQUEST, node.node_id, msg.sender, node.chain.head.number + 1)
        elif msg.kind is MessageKind.SYNC_REQUEST:
            missing = [b for b in node.chain.blocks
                       if b.number >= msg.payload and b.kind is not BlockKind.SUMMARY]
            if missing:
                self.send(now, MessageKind.SYNC_RESPONSE, node.node_id, msg.sender, tuple(missing))
        elif msg.kind is MessageKind.SYNC_RESPONSE:
            for block in msg.payload:
                if block.number > node.chain.head.number and block.number not in node.future:
                    node.future[block.number] = (None, block, ())
            self.drain(node, now)
        elif msg.kind is MessageKind.BALLOT_VOTE:
            self.on_ack(node, msg.sender, msg.payload, now)
        elif msg.kind is MessageKind.SUMMARY_HASH_ANNOUNCE:
            height, digest = msg.payload
            node.peer_summaries.setdefault(height, {})[msg.sender] = digest
            own = node.summary_hashes.get(height)
            if own is not None and own != digest:
                self.trace.record(now, "fork-suspected", node=node.node_id, peer=msg.sender, height=height)

    def on_submit(self, node: AnchorNode, entry: Entry, sender: int, now: int) -> None:
        if entry.signature in node.seen:
            return
        node.seen.add(entry.signature)
        if entry.signature in node.unchecked or admit(node.chain, entry):
            node.ledger.mempool.append(entry)
        else:
            self.trace.record(now, "entry-rejected", node=node.node_id, reason=admit(node.chain, entry).reason)
        for peer in node.group:
            if peer not in (node.node_id, sender):
                self.send(now, MessageKind.SUBMIT_ENTRY, node.node_id, peer, entry)

    def drain(self, node: AnchorNode, now: int) -> None:
        while node.chain.head.number + 1 in node.future:
            sender, block, group = node.future.pop(node.chain.head.number + 1)
            rnd = view_round(node.chain.head, block.timestamp, self.config.timeout)
            # Judge the proposer by the group it belonged to when it sent the block.
            if sender is not None and sender != proposer_for(group, block.number, rnd):
                verdict_reason = "not-proposer"
            else:
                verdict_reason = validate_proposal(node.chain, block).reason
            if sender is not None:  # blocks fetched by sync were already voted on
                ack = {"height": block.number, "hash": block.own_hash, "vote": verdict_reason is None}
                self.send(now, MessageKind.BALLOT_VOTE, node.node_id, sender, ack)
            if verdict_reason is not None:
                self.trace.record(now, "block-refused", node=node.node_id, number=block.number,
                                  sender=sender, reason=verdict_reason)
                continue
            self.commit(node, block, now)

    def on_ack(self, node: AnchorNode, sender: int, ack: dict, now: int) -> None:
        state = node.proposals.get((ack["height"], ack["hash"]))
        if state is None:
            return
        state["votes"][sender] = ack["vote"]
        n = self.config.n_nodes
        no = sum(1 for v in state["votes"].values() if not v)
        if not state["done"] and 2 * (n - no) <= n:
            # A majority refused: revert and re-propose with admission applied.
            state["done"] = True
            node.ledger.chain = state["chain"]
            node.ledger.mempool = [e for e in state["mempool"] if admit(node.chain, e)]
            node.unchecked.clear()
            node.fault = None if node.fault == "unfiltered" else node.fault
            self.trace.record(now, "proposal-withdrawn", node=node.node_id, number=ack["height"])
        elif not state["done"] and 2 * sum(1 for v in state["votes"].values() if v) > n:
            state["done"] = True
            self.trace.record(now, "block-acknowledged", node=node.node_id, number=ack["height"])

    def ballot_fn(self, node: AnchorNode):
        def fn(subject: Subject) -> Ballot:
            voters = [self.nodes[i] for i in node.group]
            ballot = hold_ballot(voters, subject, evidence=node.chain, quorum_size=self.config.n_nodes)
            self.trace.record(self.now, "ballot", node=node.node_id, **ballot.to_json())
            return ballot
        return fn

    def commit(self, node: AnchorNode, block: Block, now: int) -> None:
        # Append first so ballots on this block's deletion requests see it as evidence.
        node.ledger.chain = node.chain.append(block)
        node.ledger.chain, decisions = process_requests(node.chain, block, self.ballot_fn(node))
        included = {e.signature for e in block.entries}
        node.ledger.mempool = [e for e in node.ledger.mempool if e.signature not in included]
        node.seen |= included
        self.trace.record(now, "block", node=node.node_id, number=block.number, kind=block.kind.value,
                          hash=block.own_hash.hex(), entries=len(block.entries))
        for d in decisions:
            self.trace.record(now, "deletion", node=node.node_id, **d.to_json())
        self.after_commit(node, now)

    def after_commit(self, node: AnchorNode, now: int) -> None:
        report = node.ledger.close_if_due(self.ballot_fn(node))
        if report is None:
            return
        if node.fault == "summary":
            node.ledger.chain = _corrupt_head(node.chain)
        summary = node.chain.head
        node.summary_hashes[summary.number] = summary.own_hash
        self.trace.summary_hashes.setdefault(summary.number, {})[node.node_id] = summary.own_hash
        self.trace.record(now, "summary", node=node.node_id, number=summary.number,
                          hash=summary.own_hash.hex(), entries=len(summary.entries))
        if report.merged_sequences or report.guard:
            self.trace.record(now, "prune", node=node.node_id, **report.to_json())
        self.broadcast(now, MessageKind.SUMMARY_HASH_ANNOUNCE, node, (summary.number, summary.own_hash))

    def try_propose(self, node: AnchorNode, now: int) -> None:
        head = node.chain.head
        height = head.number + 1
        if node.node_id != proposer_for(node.group, height, view_round(head, now, self.config.timeout)):
            return
        filtered = node.fault != "unfiltered"
        pending = [e for e in node.ledger.mempool
                   if not filtered or e.signature in node.unchecked or admit(node.chain, e)]
        if not pending and heartbeat(node, now) is None:
            return
        snapshot = {"chain": node.chain, "mempool": list(node.ledger.mempool), "votes": {node.node_id: True},
                    "done": False}
        block = produce_block(node, pending, now, self.config.timeout, filtered=False)
        node.proposals[(block.number, block.own_hash)] = snapshot
        self.trace.record(now, "propose", node=node.node_id, number=block.number, hash=block.own_hash.hex())
        self.broadcast(now, MessageKind.PROPOSE_BLOCK, node, (block, node.group))
        self.commit(node, block, now)

    def run(self) -> Trace:
        script = list(self.config.script)
        for now in range(self.config.end + 1):
            self.now = now
            while script and script[0].at == now:
                self.apply(script.pop(0), now)
            while self.queue and self.queue[0].deliver_at <= now:
                self.deliver(heapq.heappop(self.queue), now)
            for node in self.nodes:
                self.try_propose(node, now)
        self.quiesce()
        for node in self.nodes:
            self.trace.record(self.now, "final", node=node.node_id, marker=node.chain.marker,
                              head=node.chain.head.number, head_hash=node.chain.head.own_hash.hex(),
                              digest=node.chain.digest.hex())
        for result in self.trace.sync_results():
            self.trace.record(self.now, "sync", **result.to_json())
        return self.trace

    def quiesce(self) -> None:
        """Deliver everything still in flight, with no new proposals."""
        while self.queue:
            msg = heapq.heappop(self.queue)
            self.now = msg.deliver_at
            self.deliver(msg, msg.deliver_at)


def run_simulation(config: SimConfig) -> Trace:
    return Simulator(config).run()


def _corrupt_head(chain: Chain) -> Chain:
    """Faulty summary construction: perturb a carried entry, or the redundancy field."""
    head = chain.head
    if head.entries:
        first = replace(head.entries[0], origin_timestamp=head.entries[0].origin_timestamp + 1)
        bad = replace(head, entries=(first,) + head.entries[1:])
    else:
        bad = replace(head, redundancy_ref=RedundancyRef(0, bytes(32)))
    return replace(chain, blocks=chain.blocks[:-1] + (bad.sealed(),))


def _describe(payload: Any) -> Any:
    if isinstance(payload, Block):
        return {"number": payload.number, "hash": payload.own_hash.hex()}
    if isinstance(payload, Entry):
        return {"user": payload.user, "kind": payload.kind.value, "signature": payload.signature.hex()[:16]}
    if isinstance(payload, dict):
        return _jsonable(payload)
    if isinstance(payload, tuple):
        return [_describe(p) for p in payload]
    if isinstance(payload, bytes):
        return payload.hex()
    return payload


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, bytes):
        return value.hex()
    return value


__all__ = [
    "AnchorNode", "ClientSync", "Message", "MessageKind", "ScriptEvent", "SimConfig", "Simulator",
    "SyncResult", "Trace", "client_sync", "heartbeat", "hold_ballot", "node_vote", "produce_block",
    "proposer_for", "run_simulation", "status_quo", "sync_check", "traceable",
]
