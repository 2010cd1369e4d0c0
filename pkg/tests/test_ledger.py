from dataclasses import replace

from conftest import login
from prunechain import BlockKind, ChainConfig, EntryRef, make_block, new_chain
from prunechain.ledger import Ledger, heartbeat_due, validate_proposal


def test_heartbeat_empty_block(ledger):
    ledger.step(1)
    assert ledger.chain.head.number == 0
    ledger.step(2)
    assert ledger.chain.head.kind is BlockKind.EMPTY and ledger.chain.head.timestamp == 2


def test_no_heartbeat_with_pending(ledger, keys):
    assert not heartbeat_due(ledger.chain, 10, has_pending=True)
    assert heartbeat_due(ledger.chain, 10, has_pending=False)


def test_rejected_entries_are_reported(ledger, keys):
    from prunechain import Entry
    bad = Entry.data(keys["CHARLIE"], "ALPHA", b"forged")
    ledger.mempool.append(bad)
    result = ledger.step(1)
    assert result.rejected == [(bad, "bad-signature")] and ledger.chain.head.number == 0


def test_validate_proposal(ledger, keys):
    chain = ledger.chain
    good = make_block(chain, [login(keys["ALPHA"], "ALPHA")], 1)
    assert validate_proposal(chain, good).ok
    assert validate_proposal(chain, replace(good, timestamp=5)).reason == "hash-mismatch"
    later = make_block(chain.append(good), [], 2, BlockKind.EMPTY)
    assert validate_proposal(chain, later).reason == "wrong-height"
    dep = login(keys["BRAVO"], "BRAVO", depends_on=[EntryRef(7, 1)])
    assert validate_proposal(chain, make_block(chain, [dep], 1)).reason == "depends-on-missing"


def test_marked_entry_drains_within_bound(roles, keys):
    """Idle chain: a marked entry disappears after at most l_max heartbeats."""
    from prunechain import make_delete_request, lookup_entry
    cfg = ChainConfig()
    led = Ledger(new_chain(cfg, roles))
    led.submit(login(keys["ALPHA"], "ALPHA"))
    led.step(1)
    led.submit(make_delete_request(keys["ALPHA"], "ALPHA", EntryRef(1, 1)))
    led.step(2)
    marked_at = led.now
    t = marked_at
    while lookup_entry(led.chain, EntryRef(1, 1)) is not None:
        t += 1
        led.step(t)
        assert t - marked_at <= 3 * cfg.l_max * cfg.heartbeat_interval
    assert t - marked_at <= cfg.l_max * cfg.heartbeat_interval + cfg.delta_l * cfg.heartbeat_interval
