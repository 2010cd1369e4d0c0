"""Block, entry and chain data model with canonical serialization and hashing.

Canonical encoding of a record::

    [tag:1][field count:u16][name-len:u16][name][value-len:u32][value] ...

Fields appear in fixed schema order, integers are unsigned big-endian 64-bit,
strings are UTF-8, nested records and lists are embedded as their own
encoding.  Lists are records tagged ``L`` whose field names are the decimal
positions.  Optional fields that are absent are omitted entirely.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass, field, fields, replace
from enum import Enum
from functools import cached_property
from typing import Any, Iterable, Iterator, Mapping, Sequence, Union

from .crypto import KeyPair
from .errors import ConfigError, InvalidChain

DIGEST_SIZE = 32
NONCE_SIZE = 8
ZERO_NONCE = bytes(NONCE_SIZE)
# 0xDEADB as the leading nibbles of the digest, so the 5-hex display reads "deadb".
DEADB = bytes.fromhex("deadb".ljust(2 * DIGEST_SIZE, "0"))


class EntryKind(str, Enum):
    DATA = "data"
    DELETE = "delete"


class BlockKind(str, Enum):
    NORMAL = "normal"
    SUMMARY = "summary"
    EMPTY = "empty"


def sha256(data: bytes) -> bytes:
    return hashlib.sha256(data).digest()


# -- canonical encoding primitives -------------------------------------------

def _u64(n: int) -> bytes:
    return int(n).to_bytes(8, "big", signed=False)


def _record(tag: bytes, items: Sequence[tuple[str, bytes]]) -> bytes:
    out = [tag, struct.pack(">H", len(items))]
    for name, value in items:
        raw = name.encode()
        out.append(struct.pack(">H", len(raw)))
        out.append(raw)
        out.append(struct.pack(">I", len(value)))
        out.append(value)
    return b"".join(out)


def _list(values: Iterable[bytes]) -> bytes:
    return _record(b"L", [(str(i), v) for i, v in enumerate(values)])


# -- domain types -------------------------------------------------------------

@dataclass(frozen=True, order=True)
class EntryRef:
    """Address of an entry: block number and 1-based position in that block."""

    block: int
    entry: int

    def __str__(self) -> str:
        return f"({self.block},{self.entry})"

    def encode(self) -> bytes:
        return _record(b"R", [("block", _u64(self.block)), ("entry", _u64(self.entry))])


@dataclass(frozen=True)
class Expiry:
    kind: str  # "time" | "block"
    value: int

    def __post_init__(self):
        if self.kind not in ("time", "block"):
            raise ValueError(f"unknown expiry kind {self.kind!r}")

    @classmethod
    def by_time(cls, tau: int) -> "Expiry":
        return cls("time", tau)

    @classmethod
    def by_block(cls, alpha: int) -> "Expiry":
        return cls("block", alpha)

    def __str__(self) -> str:
        return ("τ" if self.kind == "time" else "α") + str(self.value)

    def encode(self) -> bytes:
        return _record(b"X", [("kind", self.kind.encode()), ("value", _u64(self.value))])


@dataclass(frozen=True)
class Cosignature:
    """A dependent party's consent to deleting a target it builds on."""

    user: str
    signature: bytes

    def encode(self) -> bytes:
        return _record(b"C", [("user", self.user.encode()), ("signature", self.signature)])


def cosign_message(target: EntryRef) -> bytes:
    return _record(b"c", [("target", target.encode())])


@dataclass(frozen=True)
class Entry:
    kind: EntryKind
    user: str
    payload: bytes = b""
    signature: bytes = b""
    expiry: Expiry | None = None
    target: EntryRef | None = None
    depends_on: tuple[EntryRef, ...] = ()
    # Carried with a deletion request, outside the requester's signature.
    cosignatures: tuple[Cosignature, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "kind", EntryKind(self.kind))
        object.__setattr__(self, "depends_on", tuple(self.depends_on))
        object.__setattr__(self, "cosignatures", tuple(self.cosignatures))
        if self.kind is EntryKind.DELETE:
            if self.payload or self.expiry is not None or self.depends_on:
                raise ValueError("deletion request carries only user and target")
            if self.target is None:
                raise ValueError("deletion request needs a target")
        else:
            if self.target is not None or self.cosignatures:
                raise ValueError("data entry cannot carry a target")

    @classmethod
    def data(cls, key: KeyPair, user: str, payload: bytes, *,
             expiry: Expiry | None = None, depends_on: Iterable[EntryRef] = ()) -> "Entry":
        unsigned = cls(EntryKind.DATA, user, payload, expiry=expiry, depends_on=tuple(depends_on))
        return replace(unsigned, signature=key.sign(unsigned.signing_bytes))

    @classmethod
    def delete_request(cls, key: KeyPair, user: str, target: EntryRef,
                       cosignatures: Iterable[Cosignature] = ()) -> "Entry":
        unsigned = cls(EntryKind.DELETE, user, target=target, cosignatures=tuple(cosignatures))
        return replace(unsigned, signature=key.sign(unsigned.signing_bytes))

    @property
    def is_data(self) -> bool:
        return self.kind is EntryKind.DATA

    def _fields(self) -> list[tuple[str, bytes]]:
        items = [("kind", self.kind.value.encode()), ("user", self.user.encode())]
        if self.kind is EntryKind.DATA:
            items.append(("payload", self.payload))
            if self.expiry is not None:
                items.append(("expiry", self.expiry.encode()))
            items.append(("depends_on", _list(r.encode() for r in self.depends_on)))
        else:
            items.append(("target", self.target.encode()))
        return items

    @cached_property
    def signing_bytes(self) -> bytes:
        return _record(b"E", self._fields())

    @cached_property
    def encoded(self) -> bytes:
        items = self._fields()
        if self.cosignatures:
            items.append(("cosignatures", _list(c.encode() for c in self.cosignatures)))
        items.append(("signature", self.signature))
        return _record(b"E", items)

    def encode(self) -> bytes:
        return self.encoded


@dataclass(frozen=True)
class SummaryEntry:
    """An entry copied into a summary block, keeping its original coordinates."""

    origin_block: int
    origin_timestamp: int
    origin_entry: int
    inner: Entry

    def __post_init__(self):
        if not self.inner.is_data:
            raise ValueError("only data entries are summarized")

    @property
    def origin(self) -> EntryRef:
        return EntryRef(self.origin_block, self.origin_entry)

    @cached_property
    def encoded(self) -> bytes:
        return _record(b"S", [
            ("origin_block", _u64(self.origin_block)),
            ("origin_timestamp", _u64(self.origin_timestamp)),
            ("origin_entry", _u64(self.origin_entry)),
            ("inner", self.inner.encode()),
        ])

    def encode(self) -> bytes:
        return self.encoded


@dataclass(frozen=True)
class RedundancyRef:
    sequence_index: int
    merkle_root: bytes

    def encode(self) -> bytes:
        return _record(b"M", [("sequence_index", _u64(self.sequence_index)),
                              ("merkle_root", self.merkle_root)])


AnyEntry = Union[Entry, SummaryEntry]


@dataclass(frozen=True)
class Block:
    kind: BlockKind
    number: int
    timestamp: int
    previous_hash: bytes
    entries: tuple[AnyEntry, ...] = ()
    nonce: bytes | None = None
    redundancy_ref: RedundancyRef | None = None
    own_hash: bytes = b""

    def __post_init__(self):
        object.__setattr__(self, "kind", BlockKind(self.kind))
        object.__setattr__(self, "entries", tuple(self.entries))
        if self.kind is BlockKind.NORMAL:
            if self.nonce is None:
                object.__setattr__(self, "nonce", ZERO_NONCE)
            if not all(isinstance(e, Entry) for e in self.entries):
                raise ValueError("normal blocks hold plain entries")
        elif self.nonce is not None:
            raise ValueError(f"{self.kind.value} blocks carry no nonce")
        if self.kind is BlockKind.SUMMARY:
            if not all(isinstance(e, SummaryEntry) for e in self.entries):
                raise ValueError("summary blocks hold summary entries")
        elif self.redundancy_ref is not None:
            raise ValueError("only summary blocks carry a redundancy reference")
        if self.kind is BlockKind.EMPTY and self.entries:
            raise ValueError("empty blocks hold no entries")

    def _fields(self) -> list[tuple[str, bytes]]:
        items = [
            ("kind", self.kind.value.encode()),
            ("number", _u64(self.number)),
            ("timestamp", _u64(self.timestamp)),
            ("previous_hash", self.previous_hash),
        ]
        if self.nonce is not None:
            items.append(("nonce", self.nonce))
        items.append(("entries", _list(e.encode() for e in self.entries)))
        if self.redundancy_ref is not None:
            items.append(("redundancy_ref", self.redundancy_ref.encode()))
        return items

    @cached_property
    def header_bytes(self) -> bytes:
        """Encoding of every field except ``own_hash``; the hash input."""
        return _record(b"B", self._fields())

    def sealed(self) -> "Block":
        return replace(self, own_hash=hash_block(self))

    def data_entries(self) -> Iterator[tuple[int, Entry]]:
        """(1-based entry number, entry) pairs of a normal block's data entries."""
        if self.kind is BlockKind.NORMAL:
            for n, e in enumerate(self.entries, start=1):
                if e.is_data:
                    yield n, e

    def as_summary_entries(self) -> list[SummaryEntry]:
        """Data content of this block in summary form (origin coordinates kept)."""
        if self.kind is BlockKind.SUMMARY:
            return list(self.entries)
        return [SummaryEntry(self.number, self.timestamp, n, e) for n, e in self.data_entries()]


def canonical_serialize(obj: Block | Entry | SummaryEntry | EntryRef) -> bytes:
    """Deterministic byte encoding; blocks include their ``own_hash`` as the last field."""
    if isinstance(obj, Block):
        return _record(b"B", obj._fields() + [("own_hash", obj.own_hash)])
    return obj.encode()


def hash_block(block: Block) -> bytes:
    return sha256(block.header_bytes)


def compute_merkle_root(entries: Sequence[SummaryEntry]) -> bytes:
    """Binary Merkle root; leaves are domain-separated from inner nodes and an
    odd level duplicates its last node."""
    if not entries:
        return sha256(b"")
    level = [sha256(b"\x00" + e.encode()) for e in entries]
    while True:
        if len(level) % 2:
            level.append(level[-1])
        level = [sha256(b"\x01" + level[i] + level[i + 1]) for i in range(0, len(level), 2)]
        if len(level) == 1:
            return level[0]


# -- configuration, roles, chain ----------------------------------------------

@dataclass(frozen=True)
class ChainConfig:
    delta_l: int = 3
    l_max: int = 5
    l_min: int = 3
    min_summary_blocks: int = 1
    min_time_coverage: int = 0
    heartbeat_interval: int = 2
    redundancy_enabled: bool = False

    def __post_init__(self):
        if self.delta_l < 2:
            raise ConfigError("delta_l must be at least 2")
        if self.l_min < self.delta_l:
            raise ConfigError("l_min must be at least delta_l")
        # The first prune fires at l_max + 1 blocks, appends one summary and
        # removes delta_l; it must be able to leave l_min behind.
        if self.l_max + 2 < self.l_min + self.delta_l:
            raise ConfigError("l_max too small: no sequence could ever be pruned")
        if self.min_summary_blocks < 0 or self.min_time_coverage < 0 or self.heartbeat_interval < 1:
            raise ConfigError("guards must be non-negative and heartbeat_interval positive")

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "ChainConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**dict(data))

    def to_dict(self) -> dict[str, Any]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class Roles:
    """Registered identities. Admin identities hold the quorum's master key."""

    keys: Mapping[str, bytes] = field(default_factory=dict)
    admins: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "keys", dict(self.keys))
        object.__setattr__(self, "admins", frozenset(self.admins))
        if not self.admins <= set(self.keys):
            raise ValueError("admin identity without a key")
        admin_keys = {self.keys[a] for a in self.admins}
        user_keys = [k for u, k in self.keys.items() if u not in self.admins]
        if admin_keys & set(user_keys):
            raise ValueError("admin key must differ from every user key")
        if len(set(user_keys)) != len(user_keys):
            raise ValueError("each user needs a distinct key")

    def register(self, user: str, public: bytes, admin: bool = False) -> "Roles":
        keys = dict(self.keys)
        keys[user] = public
        admins = self.admins | {user} if admin else self.admins - {user}
        return Roles(keys, admins)

    def key_for(self, user: str) -> bytes | None:
        return self.keys.get(user)

    def is_admin(self, user: str) -> bool:
        return user in self.admins


@dataclass(frozen=True)
class Chain:
    blocks: tuple[Block, ...]
    config: ChainConfig = field(default_factory=ChainConfig)
    roles: Roles = field(default_factory=Roles)
    pending_deletions: frozenset[EntryRef] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))
        object.__setattr__(self, "pending_deletions", frozenset(self.pending_deletions))
        if not self.blocks:
            raise InvalidChain("a chain holds at least its genesis block")

    @property
    def marker(self) -> int:
        return self.blocks[0].number

    @property
    def head(self) -> Block:
        return self.blocks[-1]

    @property
    def length(self) -> int:
        return len(self.blocks)

    def block(self, number: int) -> Block | None:
        i = number - self.marker
        if 0 <= i < len(self.blocks) and self.blocks[i].number == number:
            return self.blocks[i]
        return None

    def append(self, block: Block) -> "Chain":
        return replace(self, blocks=self.blocks + (block,))

    @cached_property
    def summary_index(self) -> dict[EntryRef, tuple[SummaryEntry, int]]:
        """Origin coordinates of every summarized entry -> (entry, resident block)."""
        index = {}
        for b in self.blocks:
            if b.kind is BlockKind.SUMMARY:
                for s in b.entries:
                    index[s.origin] = (s, b.number)
        return index

    @cached_property
    def digest(self) -> bytes:
        """Hash over all live block hashes plus the marker."""
        return sha256(_u64(self.marker) + b"".join(b.own_hash for b in self.blocks))


def genesis_block(previous_hash: bytes = DEADB, timestamp: int = 0, number: int = 0) -> Block:
    return Block(BlockKind.NORMAL, number, timestamp, previous_hash).sealed()


def new_chain(config: ChainConfig | None = None, roles: Roles | None = None, *,
              previous_hash: bytes = DEADB, timestamp: int = 0) -> Chain:
    return Chain((genesis_block(previous_hash, timestamp),), config or ChainConfig(), roles or Roles())


# -- JSON mapping (chain file and trace payloads) -------------------------------

def ref_to_json(ref: EntryRef) -> list[int]:
    return [ref.block, ref.entry]


def ref_from_json(data: Sequence[int]) -> EntryRef:
    block, entry = data
    return EntryRef(int(block), int(entry))


def entry_to_json(e: Entry) -> dict[str, Any]:
    out: dict[str, Any] = {"kind": e.kind.value, "user": e.user}
    if e.is_data:
        out["payload"] = e.payload.hex()
        if e.expiry is not None:
            out["expiry"] = {"kind": e.expiry.kind, "value": e.expiry.value}
        out["depends_on"] = [ref_to_json(r) for r in e.depends_on]
    else:
        out["target"] = ref_to_json(e.target)
        if e.cosignatures:
            out["cosignatures"] = [{"user": c.user, "signature": c.signature.hex()} for c in e.cosignatures]
    out["signature"] = e.signature.hex()
    return out


def entry_from_json(d: Mapping[str, Any]) -> Entry:
    expiry = d.get("expiry")
    target = d.get("target")
    return Entry(
        kind=EntryKind(d["kind"]),
        user=d["user"],
        payload=bytes.fromhex(d.get("payload", "")),
        signature=bytes.fromhex(d["signature"]),
        expiry=Expiry(expiry["kind"], int(expiry["value"])) if expiry else None,
        target=ref_from_json(target) if target is not None else None,
        depends_on=tuple(ref_from_json(r) for r in d.get("depends_on", ())),
        cosignatures=tuple(Cosignature(c["user"], bytes.fromhex(c["signature"]))
                           for c in d.get("cosignatures", ())),
    )


def block_to_json(b: Block) -> dict[str, Any]:
    out: dict[str, Any] = {
        "kind": b.kind.value,
        "number": b.number,
        "timestamp": b.timestamp,
        "previous_hash": b.previous_hash.hex(),
    }
    if b.nonce is not None:
        out["nonce"] = b.nonce.hex()
    if b.kind is BlockKind.SUMMARY:
        out["entries"] = [
            {"origin_block": s.origin_block, "origin_timestamp": s.origin_timestamp,
             "origin_entry": s.origin_entry, "inner": entry_to_json(s.inner)}
            for s in b.entries
        ]
    else:
        out["entries"] = [entry_to_json(e) for e in b.entries]
    if b.redundancy_ref is not None:
        out["redundancy_ref"] = {"sequence_index": b.redundancy_ref.sequence_index,
                                 "merkle_root": b.redundancy_ref.merkle_root.hex()}
    out["own_hash"] = b.own_hash.hex()
    return out


def block_from_json(d: Mapping[str, Any]) -> Block:
    kind = BlockKind(d["kind"])
    if kind is BlockKind.SUMMARY:
        entries = tuple(SummaryEntry(int(s["origin_block"]), int(s["origin_timestamp"]),
                                     int(s["origin_entry"]), entry_from_json(s["inner"]))
                        for s in d["entries"])
    else:
        entries = tuple(entry_from_json(e) for e in d["entries"])
    rr = d.get("redundancy_ref")
    return Block(
        kind=kind,
        number=int(d["number"]),
        timestamp=int(d["timestamp"]),
        previous_hash=bytes.fromhex(d["previous_hash"]),
        entries=entries,
        nonce=bytes.fromhex(d["nonce"]) if "nonce" in d else None,
        redundancy_ref=RedundancyRef(int(rr["sequence_index"]), bytes.fromhex(rr["merkle_root"])) if rr else None,
        own_hash=bytes.fromhex(d["own_hash"]),
    )
