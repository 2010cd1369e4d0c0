"""Deletable blockchain: summary blocks, sequence pruning and deletion requests."""

from .ballot import ApproveDeletion, Ballot, MarkerShift, approve_all
from .chain import Found, Verdict, iter_entries, lookup_entry, make_block, verify_chain
from .core import (
    DEADB,
    Block,
    BlockKind,
    Chain,
    ChainConfig,
    Cosignature,
    Entry,
    EntryKind,
    EntryRef,
    Expiry,
    RedundancyRef,
    Roles,
    SummaryEntry,
    canonical_serialize,
    compute_merkle_root,
    genesis_block,
    hash_block,
    new_chain,
)
from .crypto import KeyPair
from .deletion import (
    authorize,
    check_cohesion,
    cosign,
    make_delete_request,
    process_delete_request,
    replay_pending,
)
from .ledger import Ledger
from .render import golden_render
from .store import dump_chain, load_chain
from .summarize import (
    PruneReport,
    Sequence,
    close_sequence,
    merge_oldest,
    prune,
    prune_guards,
    sequence_boundaries,
    shift_marker,
)

__version__ = "0.1.0"

__all__ = [
    "ApproveDeletion", "Ballot", "MarkerShift", "approve_all", "Found", "Verdict", "iter_entries",
    "lookup_entry", "make_block", "verify_chain", "DEADB", "Block", "BlockKind", "Chain",
    "ChainConfig", "Cosignature", "Entry", "EntryKind", "EntryRef", "Expiry", "RedundancyRef",
    "Roles", "SummaryEntry", "canonical_serialize", "compute_merkle_root", "genesis_block",
    "hash_block", "new_chain", "KeyPair", "authorize", "check_cohesion", "cosign",
    "make_delete_request", "process_delete_request", "replay_pending", "Ledger", "golden_render",
    "dump_chain", "load_chain", "PruneReport", "Sequence", "close_sequence", "merge_oldest",
    "prune", "prune_guards", "sequence_boundaries", "shift_marker",
]
