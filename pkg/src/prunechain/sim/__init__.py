from .quorum import (
    AnchorNode,
    ClientSync,
    Message,
    MessageKind,
    ScriptEvent,
    SimConfig,
    Simulator,
    SyncResult,
    Trace,
    client_sync,
    heartbeat,
    hold_ballot,
    produce_block,
    run_simulation,
    status_quo,
    sync_check,
)
from .scenario import load_scenario

__all__ = [
    "AnchorNode", "ClientSync", "Message", "MessageKind", "ScriptEvent", "SimConfig", "Simulator",
    "SyncResult", "Trace", "client_sync", "heartbeat", "hold_ballot", "load_scenario", "produce_block",
    "run_simulation", "status_quo", "sync_check",
]
