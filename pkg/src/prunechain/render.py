"""Console rendering of a chain, one line per block.

    <number>; <timestamp>; <prev-hash>; <own-hash>; <entries>

Hashes are cut to five lowercase hex digits.  Summary lines start with ``S``
and, when colored, are blue.  Summarized entries show their origin as
``<block>,<entry>,τ<timestamp>``.
"""

from __future__ import annotations

from .core import Block, BlockKind, Chain, Entry, SummaryEntry

HASH_CHARS = 5
BLUE, RESET = "\x1b[34m", "\x1b[0m"


def short(digest: bytes) -> str:
    return digest.hex()[:HASH_CHARS]


def _payload(data: bytes) -> str:
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError:
        return "0x" + data.hex()
    return text if text.isprintable() else "0x" + data.hex()


def render_entry(entry: Entry) -> str:
    if entry.is_data:
        body = f"D:{_payload(entry.payload)}"
    else:
        body = f"DEL:{entry.target.block},{entry.target.entry}"
    out = f"{body} K:{entry.user} S:{short(entry.signature)}"
    if entry.expiry is not None:
        out += f" T:{entry.expiry}"
    return out


def render_summary_entry(s: SummaryEntry) -> str:
    return f"{s.origin_block},{s.origin_entry},τ{s.origin_timestamp}: {render_entry(s.inner)}"


def render_block(block: Block, color: bool = False) -> str:
    if block.kind is BlockKind.SUMMARY:
        parts = [render_summary_entry(s) for s in block.entries]
        if block.redundancy_ref is not None:
            parts.append(f"R:{block.redundancy_ref.sequence_index}:{short(block.redundancy_ref.merkle_root)}")
    else:
        parts = [f"{n}: {render_entry(e)}" for n, e in enumerate(block.entries, start=1)]
    prefix = "S" if block.kind is BlockKind.SUMMARY else ""
    line = f"{prefix}{block.number}; {block.timestamp}; {short(block.previous_hash)}; {short(block.own_hash)}; "
    line += " | ".join(parts)
    line = line.rstrip()
    if color and block.kind is BlockKind.SUMMARY:
        return f"{BLUE}{line}{RESET}"
    return line


def golden_render(chain: Chain, color: bool = False) -> str:
    return "".join(render_block(b, color) + "\n" for b in chain.blocks)
