from dataclasses import replace

import pytest

from conftest import login
from prunechain import (
    Ballot,
    BlockKind,
    ChainConfig,
    EntryRef,
    Expiry,
    MarkerShift,
    compute_merkle_root,
    new_chain,
    prune,
    prune_guards,
    sequence_boundaries,
    shift_marker,
    verify_chain,
)
from prunechain.errors import GuardViolation, InvalidChain, InvalidMarker, NotEnoughSequences, VoteRejected
from prunechain.ledger import Ledger
from prunechain.summarize import (
    DELETED,
    DELETION_REQUEST,
    EXPIRED_BLOCK,
    EXPIRED_TIME,
    apply_expiry,
    build_summary_block,
    embed_redundancy,
    merge_oldest,
    needs_summary,
    sequence_content,
)


def grow(roles, keys, cfg, blocks, user="ALPHA"):
    led = Ledger(new_chain(cfg, roles))
    t = 0
    while led.chain.head.number < blocks - 1:
        t += 1
        led.submit(login(keys[user], user, f"{t}".encode()))
        led.step(t)
    return led


def test_after_logins_boundaries(checkpoints):
    seqs = sequence_boundaries(checkpoints["after_logins"])
    assert [(s.first_block, s.last_block, s.complete) for s in seqs] == [(0, 2, True), (3, 5, True), (6, 7, False)]
    assert [s.index for s in seqs] == [1, 2, 3]


def test_genesis_only_is_one_partial_sequence():
    seqs = sequence_boundaries(new_chain())
    assert len(seqs) == 1 and not seqs[0].complete


def test_boundaries_survive_pruning(checkpoints):
    before = {(s.first_block, s.last_block) for s in sequence_boundaries(checkpoints["after_logins"])}
    after = [(s.first_block, s.last_block) for s in sequence_boundaries(checkpoints["first_prune"])]
    assert after == [(6, 8)]
    assert (6, 7) in before  # the then-partial sequence is the one now closed


def test_boundaries_need_a_valid_chain(checkpoints):
    chain = checkpoints["after_logins"]
    broken = replace(chain, blocks=chain.blocks[:3] + chain.blocks[4:])
    with pytest.raises(InvalidChain):
        sequence_boundaries(broken)


@pytest.mark.parametrize("delta,nxt,expected", [(3, 2, True), (3, 3, False), (10, 9, True)])
def test_needs_summary(delta, nxt, expected):
    cfg = ChainConfig(delta_l=delta, l_min=delta, l_max=2 * delta)
    assert needs_summary(new_chain(cfg), nxt) is expected


def test_first_summaries_are_empty(checkpoints):
    chain = checkpoints["after_logins"]
    assert chain.block(2).entries == () and chain.block(5).entries == ()


def test_first_prune_prune(checkpoints):
    chain, report = checkpoints["first_prune"], checkpoints["first_prune_report"]
    assert chain.marker == 6 and [b.number for b in chain.blocks] == [6, 7, 8]
    summary = chain.block(8)
    assert [(s.origin_block, s.origin_entry, s.inner.user) for s in summary.entries] == [(1, 1, "ALPHA"), (4, 1, "CHARLIE")]
    assert (report.old_length, report.new_length, report.merged_length) == (8, 3, 6)
    assert report.new_length == report.old_length + 1 - report.merged_length
    assert (EntryRef(3, 1), DELETED) in report.dropped_entries
    assert verify_chain(chain).valid


def test_second_prune_no_deletion_request_left(checkpoints):
    chain, report = checkpoints["second_prune"], checkpoints["second_prune_report"]
    assert chain.marker == 12
    assert all(e.is_data for b in chain.blocks if b.kind is not BlockKind.SUMMARY for e in b.entries)
    assert (EntryRef(6, 1), DELETION_REQUEST) in report.dropped_entries
    origins = [(s.origin_block, s.inner.user) for s in chain.block(14).entries]
    assert origins == [(1, "ALPHA"), (4, "CHARLIE"), (9, "ALPHA"), (10, "CHARLIE")]
    assert chain.block(12).entries[0].user == "BRAVO"


def test_origin_fields_survive_repeated_merges(checkpoints):
    first = {s.origin: s for s in checkpoints["first_prune"].block(8).entries}
    second = {s.origin: s for s in checkpoints["second_prune"].block(14).entries}
    for ref, s in first.items():
        assert second[ref] == s


def test_prune_noop_at_l_max(checkpoints):
    chain = checkpoints["first_prune"]
    assert chain.length <= chain.config.l_max
    same, report = prune(chain)
    assert same is chain and report.merged_sequences == []


def test_prune_raises_on_guard(roles, keys):
    cfg = ChainConfig(l_max=5, l_min=3, min_time_coverage=1000)
    led = grow(roles, keys, cfg, 8)
    with pytest.raises(GuardViolation) as err:
        prune(led.chain)
    assert err.value.code == "time"


def test_prune_raises_on_rejected_vote(checkpoints):
    chain = checkpoints["after_logins"]
    with pytest.raises(VoteRejected):
        prune(chain, ballot=lambda s: Ballot(s, {0: True, 1: False}))


def test_prune_on_after_logins(checkpoints):
    new, report = prune(checkpoints["after_logins"])
    assert new == checkpoints["first_prune"] and report.new_marker == 6


def test_guard_length_boundary(roles, keys):
    cfg = ChainConfig(delta_l=3, l_min=6, l_max=9)
    # l_min + delta_l - 1 = 8 blocks: cutting one sequence leaves 5 < l_min
    led = grow(roles, keys, cfg, 8)
    assert led.chain.length == 8
    assert prune_guards(led.chain).reason == "length"
    longer = grow(roles, keys, cfg, 9).chain
    assert prune_guards(longer).passed


def test_guard_time_and_summary_count(roles, keys):
    led = grow(roles, keys, ChainConfig(min_time_coverage=3), 8)
    span = led.chain.head.timestamp - led.chain.block(3).timestamp
    cfg = replace(led.chain.config, min_time_coverage=span + 1)
    assert prune_guards(replace(led.chain, config=cfg)).reason == "time"
    cfg = replace(led.chain.config, min_time_coverage=0, min_summary_blocks=5)
    assert prune_guards(replace(led.chain, config=cfg)).reason == "summary-blocks"
    assert prune_guards(new_chain()).reason == "no-sequence"


def test_expiry_rules(keys):
    e_t = login(keys["ALPHA"], "ALPHA", expiry=Expiry.by_time(8888))
    e_b = login(keys["ALPHA"], "ALPHA", expiry=Expiry.by_block(4711))
    assert apply_expiry(e_t, now=9000, head=0) == EXPIRED_TIME
    assert apply_expiry(e_t, now=8888, head=0) is None
    assert apply_expiry(e_b, now=0, head=4000) is None
    assert apply_expiry(e_b, now=0, head=4712) == EXPIRED_BLOCK
    assert apply_expiry(login(keys["ALPHA"], "ALPHA"), 10**9, 10**9) is None


def test_merge_without_marks_carries_everything(roles, keys):
    led = grow(roles, keys, ChainConfig(), 8)
    result = merge_oldest(led.chain)
    flat = [s for seq in result.merged for s in sequence_content(led.chain, seq)]
    assert result.carry == flat and result.dropped == []


def test_sequence_with_only_a_deletion_request(roles, keys):
    from prunechain import make_delete_request
    led = Ledger(new_chain(ChainConfig(), roles))
    led.submit(make_delete_request(keys["ALPHA"], "ALPHA", EntryRef(0, 1)))
    t = 0
    while led.chain.head.number < 7:
        t += 1
        led.step(t)
    result = merge_oldest(led.chain, count=1)
    assert result.carry == [] and result.dropped == [(EntryRef(1, 1), DELETION_REQUEST)]


def test_build_summary_is_deterministic(checkpoints):
    chain = checkpoints["after_logins"]
    carry = merge_oldest(chain).carry
    a = build_summary_block(chain, carry)
    b = build_summary_block(replace(chain), list(carry))
    assert a == b and a.timestamp == chain.head.timestamp and a.kind is BlockKind.SUMMARY
    with pytest.raises(InvalidChain):
        build_summary_block(chain.append(a), [])


def test_shift_marker(checkpoints):
    chain = checkpoints["after_logins"]
    ok = Ballot(MarkerShift(6), {0: True})
    shifted = shift_marker(chain, 6, ok)
    assert shifted.marker == 6 and shifted.head == chain.head
    with pytest.raises(VoteRejected):
        shift_marker(chain, 6, Ballot(MarkerShift(6), {0: True, 1: False}))
    with pytest.raises(InvalidMarker):
        shift_marker(chain, 4, Ballot(MarkerShift(4), {0: True}))


def test_redundancy_middle_sequence(roles, keys):
    cfg = ChainConfig(l_max=100, redundancy_enabled=True)
    led = grow(roles, keys, cfg, 11)  # 3 complete sequences, head closes none
    chain = led.chain
    assert chain.head.number == 10
    summary = build_summary_block(chain, [])  # closes the 4th live sequence
    ref = summary.redundancy_ref
    assert ref.sequence_index == 2
    seq = sequence_boundaries(chain)[1]
    assert ref.merkle_root == compute_merkle_root(sequence_content(chain, seq))


def test_redundancy_needs_two_sequences(roles, keys):
    led = grow(roles, keys, ChainConfig(redundancy_enabled=True), 2)
    summary = build_summary_block(led.chain, [])
    assert summary.redundancy_ref is None
    with pytest.raises(NotEnoughSequences):
        embed_redundancy(led.chain, summary)
