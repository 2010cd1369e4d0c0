from dataclasses import replace

from prunechain import BlockKind, EntryRef, lookup_entry, verify_chain
from prunechain.chain import is_summary_position, iter_entries


def test_after_logins_chain_is_valid(checkpoints):
    chain = checkpoints["after_logins"]
    assert [b.number for b in chain.blocks] == list(range(8))
    assert verify_chain(chain).valid
    assert str(verify_chain(chain)) == "Valid"


def test_tampered_payload_breaks_at_block_3(checkpoints):
    chain = checkpoints["after_logins"]
    b3 = chain.blocks[3]
    forged = replace(b3.entries[0], payload=b"logout")
    bad = replace(chain, blocks=chain.blocks[:3] + (replace(b3, entries=(forged,)),) + chain.blocks[4:])
    v = verify_chain(bad)
    assert (v.at, v.reason) == (3, "hash-mismatch")


def test_resealed_tamper_breaks_link_or_signature(checkpoints):
    chain = checkpoints["after_logins"]
    b3 = chain.blocks[3]
    forged = replace(b3, entries=(replace(b3.entries[0], payload=b"logout"),)).sealed()
    bad = replace(chain, blocks=chain.blocks[:3] + (forged,) + chain.blocks[4:])
    v = verify_chain(bad)
    assert (v.at, v.reason) == (3, "bad-signature")
    fully = replace(chain, blocks=chain.blocks[:3] + (replace(b3, timestamp=99).sealed(),) + chain.blocks[4:])
    assert verify_chain(fully).reason == "link-broken"


def test_summary_timestamp_rule(checkpoints):
    chain = checkpoints["after_logins"]
    for prev, b in zip(chain.blocks, chain.blocks[1:]):
        if b.kind is BlockKind.SUMMARY:
            assert b.timestamp == prev.timestamp
    s2 = replace(chain.blocks[2], timestamp=chain.blocks[1].timestamp + 1).sealed()
    bad = replace(chain, blocks=chain.blocks[:2] + (s2,))
    assert verify_chain(bad).reason == "summary-timestamp"


def test_summary_positions(checkpoints):
    chain = checkpoints["after_logins"]
    assert [b.number for b in chain.blocks if b.kind is BlockKind.SUMMARY] == [2, 5]
    assert is_summary_position(9, 10) and not is_summary_position(3, 3)


def test_unknown_user_detected(checkpoints, roles):
    from prunechain import Roles
    stripped = Roles({u: k for u, k in roles.keys.items() if u != "BRAVO"}, roles.admins)
    v = verify_chain(replace(checkpoints["after_logins"], roles=stripped))
    assert (v.at, v.reason) == (3, "unknown-user")


def test_lookup_live_entry(checkpoints):
    found = lookup_entry(checkpoints["after_logins"], EntryRef(3, 1))
    assert found.entry.user == "BRAVO" and found.location == "live"


def test_lookup_in_summary_after_prune(checkpoints):
    chain = checkpoints["first_prune"]
    found = lookup_entry(chain, EntryRef(1, 1))
    assert found.entry.user == "ALPHA" and found.location == "in-summary" and found.resident_block == 8
    assert lookup_entry(chain, EntryRef(3, 1)) is None
    assert lookup_entry(chain, EntryRef(42, 1)) is None


def test_marker_soundness(checkpoints):
    for name in ("after_logins", "first_prune", "second_prune"):
        chain = checkpoints[name]
        assert chain.blocks[0].number == chain.marker
        assert chain.block(chain.marker - 1) is None


def test_iter_entries_reports_origin(checkpoints):
    refs = {ref for ref, _, _ in iter_entries(checkpoints["first_prune"])}
    assert {EntryRef(1, 1), EntryRef(4, 1), EntryRef(6, 1)} <= refs
