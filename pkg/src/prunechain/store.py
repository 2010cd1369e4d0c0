"""Chain files: JSON-Lines, a header line followed by one block per line.

The header carries everything that is not in the blocks themselves: the
configuration, registered keys, pending deletion marks, the current tick and
entries queued for the next block.
"""

from __future__ import annotations

import fcntl
import json
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

from .core import (
    Chain,
    ChainConfig,
    Entry,
    Roles,
    block_from_json,
    block_to_json,
    entry_from_json,
    entry_to_json,
    ref_from_json,
    ref_to_json,
)
from .errors import ConfigError, InvalidChain

FORMAT = "prunechain"
VERSION = 1


@dataclass
class ChainState:
    chain: Chain
    now: int = 0
    mempool: list[Entry] = field(default_factory=list)


def dumps(state: ChainState) -> str:
    chain = state.chain
    header = {
        "format": FORMAT,
        "version": VERSION,
        "config": chain.config.to_dict(),
        "roles": {"keys": {u: k.hex() for u, k in sorted(chain.roles.keys.items())},
                  "admins": sorted(chain.roles.admins)},
        "pending": [ref_to_json(r) for r in sorted(chain.pending_deletions)],
        "now": state.now,
        "mempool": [entry_to_json(e) for e in state.mempool],
    }
    lines = [json.dumps(header)] + [json.dumps(block_to_json(b)) for b in chain.blocks]
    return "\n".join(lines) + "\n"


def loads(text: str) -> ChainState:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise InvalidChain("empty chain file", "empty-file")
    try:
        header = json.loads(lines[0])
        if header.get("format") != FORMAT:
            raise InvalidChain("not a chain file", "bad-format")
        if header.get("version") != VERSION:
            raise InvalidChain(f"unsupported version {header.get('version')}", "bad-version")
        roles = header.get("roles", {})
        chain = Chain(
            blocks=tuple(block_from_json(json.loads(ln)) for ln in lines[1:]),
            config=ChainConfig.from_mapping(header.get("config", {})),
            roles=Roles({u: bytes.fromhex(k) for u, k in roles.get("keys", {}).items()},
                        roles.get("admins", ())),
            pending_deletions=frozenset(ref_from_json(r) for r in header.get("pending", ())),
        )
        mempool = [entry_from_json(e) for e in header.get("mempool", ())]
    except ConfigError:
        raise
    except (ValueError, KeyError, TypeError) as exc:
        raise InvalidChain(f"malformed chain file: {exc}", "malformed") from exc
    return ChainState(chain, int(header.get("now", chain.head.timestamp)), mempool)


def dump_chain(chain: Chain, path: str | Path, now: int | None = None, mempool=()) -> None:
    save(ChainState(chain, chain.head.timestamp if now is None else now, list(mempool)), path)


def load_chain(path: str | Path) -> Chain:
    return load(path).chain


def save(state: ChainState, path: str | Path) -> None:
    path = Path(path)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(dumps(state), newline="\n")
    tmp.replace(path)


def load(path: str | Path) -> ChainState:
    return loads(Path(path).read_text())


@contextmanager
def locked(path: str | Path) -> Iterator[None]:
    """Advisory lock on ``<path>.lock`` for the duration of one invocation."""
    lock = Path(str(path) + ".lock")
    with open(lock, "w") as fh:
        fcntl.flock(fh, fcntl.LOCK_EX)
        try:
            yield
        finally:
            fcntl.flock(fh, fcntl.LOCK_UN)
