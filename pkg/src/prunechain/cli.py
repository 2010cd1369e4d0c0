"""Command-line front end for a single-node audit chain.

Time only moves through ``tick``; entries queued by ``append`` and
``delete-request`` are sealed into a block at the next tick.

Exit codes: 0 ok, 2 validation, 3 authorization, 4 guard, 5 broken chain.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import yaml

from .chain import verify_chain
from .core import DEADB, ChainConfig, Entry, EntryRef, Expiry, Roles, block_to_json, new_chain
from .crypto import KeyPair
from .deletion import cosign, make_delete_request, signature_ok
from .errors import ConfigError, InvalidChain, PruneChainError, SchemaViolation, ScriptError
from .ledger import Ledger, admit
from .render import golden_render
from .schema import EntrySchema, encode_payload, parse_payload
from .store import ChainState, dumps, load, loads, locked, save
from .summarize import audit_redundancy

OK, VALIDATION, AUTHORIZATION, GUARD, BROKEN = 0, 2, 3, 4, 5

AUTH_REASONS = {"bad-signature", "unknown-user", "foreign-entry"}


class CliError(Exception):
    def __init__(self, status: int, reason: str, message: str = ""):
        super().__init__(message or reason)
        self.status, self.reason = status, reason


def _emit(args, payload: dict, text: str | None = None) -> None:
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    elif text is not None:
        print(text, end="" if text.endswith("\n") else "\n")


def _load_config(path: str | None) -> ChainConfig:
    if path is None:
        return ChainConfig()
    data = yaml.safe_load(Path(path).read_text()) or {}
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping")
    return ChainConfig.from_mapping(data)


def _read_key(path: str | None) -> tuple[str, KeyPair]:
    if path is None:
        raise CliError(VALIDATION, "missing-key", "--key is required")
    data = json.loads(Path(path).read_text())
    return data["user"], KeyPair.from_secret(bytes.fromhex(data["secret"]))


def _parse_ref(text: str) -> EntryRef:
    try:
        block, entry = (int(x) for x in text.replace(" ", "").split(","))
    except ValueError:
        raise CliError(VALIDATION, "bad-ref", f"expected <block>,<entry>, got {text!r}") from None
    return EntryRef(block, entry)


def _state(args) -> ChainState:
    try:
        return load(args.chain)
    except FileNotFoundError:
        raise CliError(VALIDATION, "no-chain", f"no chain file at {args.chain}; run init first") from None


# -- subcommands --------------------------------------------------------------

def cmd_init(args) -> int:
    if Path(args.chain).exists() and not args.force:
        raise CliError(VALIDATION, "exists", f"{args.chain} already exists (use --force)")
    if args.source:
        state = loads(Path(args.source).read_text())
        verdict = verify_chain(state.chain)
        if not verdict:
            raise CliError(BROKEN, verdict.reason, str(verdict))
    else:
        prev = DEADB if args.seed is None and not args.random_genesis else _genesis_hash(args)
        state = ChainState(new_chain(_load_config(args.config), Roles(), previous_hash=prev))
    save(state, args.chain)
    _emit(args, {"chain": args.chain, "head": state.chain.head.number, "marker": state.chain.marker},
          f"initialized {args.chain}")
    return OK


def _genesis_hash(args) -> bytes:
    if args.seed is not None:
        return KeyPair.derive(args.seed, "genesis").public
    return os.urandom(32)


def cmd_keygen(args) -> int:
    state = _state(args)
    key = KeyPair.derive(args.seed, args.user) if args.seed is not None else KeyPair.generate()
    try:
        state.chain = _with_roles(state, state.chain.roles.register(args.user, key.public, admin=args.admin))
    except ValueError as exc:
        raise CliError(VALIDATION, "bad-role", str(exc)) from None
    key_path = Path(args.key or f"{args.user.lower()}.key")
    key_path.write_text(json.dumps({"user": args.user, "public": key.public.hex(), "secret": key.secret.hex()}) + "\n")
    key_path.chmod(0o600)
    save(state, args.chain)
    _emit(args, {"user": args.user, "public": key.public.hex(), "key": str(key_path), "admin": args.admin},
          f"registered {args.user} ({key.public.hex()[:16]}) -> {key_path}")
    return OK


def _with_roles(state: ChainState, roles: Roles):
    from dataclasses import replace
    return replace(state.chain, roles=roles)


def _queue(state: ChainState, entry: Entry) -> None:
    verdict = admit(state.chain, entry)
    if not verdict:
        status = AUTHORIZATION if verdict.reason in AUTH_REASONS else VALIDATION
        raise CliError(status, verdict.reason)
    state.mempool.append(entry)


def cmd_append(args) -> int:
    state = _state(args)
    user, key = _read_key(args.key)
    value = parse_payload(args.payload)
    if args.schema:
        EntrySchema.load(args.schema).validate(value)
    expiry = None
    if args.expire_at is not None:
        expiry = Expiry.by_time(args.expire_at)
    elif args.expire_block is not None:
        expiry = Expiry.by_block(args.expire_block)
    deps = [_parse_ref(d) for d in args.depends_on]
    entry = Entry.data(key, user, encode_payload(value), expiry=expiry, depends_on=deps)
    _queue(state, entry)
    save(state, args.chain)
    _emit(args, {"queued": True, "user": user, "signature": entry.signature.hex()},
          f"queued entry by {user}")
    return OK


def cmd_delete_request(args) -> int:
    state = _state(args)
    user, key = _read_key(args.key)
    target = _parse_ref(args.target)
    cosigs = []
    for path in args.cosign:
        c_user, c_key = _read_key(path)
        cosigs.append(cosign(c_key, c_user, target))
    request = make_delete_request(key, user, target, cosigs)
    if not signature_ok(state.chain.roles, request):
        raise CliError(AUTHORIZATION, signature_ok(state.chain.roles, request).reason)
    _queue(state, request)
    save(state, args.chain)
    _emit(args, {"queued": True, "user": user, "target": [target.block, target.entry]},
          f"queued deletion request by {user} for {target.block},{target.entry}")
    return OK


def cmd_tick(args) -> int:
    state = _state(args)
    ledger = Ledger(state.chain, state.now)
    ledger.mempool = list(state.mempool)
    target = args.to if args.to is not None else state.now + args.by
    if target < state.now:
        raise CliError(VALIDATION, "time-regression", f"cannot move time back to {target}")
    events, guard = [], None
    for now in range(state.now + 1, target + 1):
        result = ledger.step(now)
        for b in result.blocks:
            events.append({"t": now, "block": b.number, "kind": b.kind.value})
        for d in result.decisions:
            events.append({"t": now, "deletion": d.to_json()})
        for r in result.reports:
            if r.merged_sequences or r.guard:
                events.append({"t": now, "prune": r.to_json()})
            guard = guard or r.guard
        for entry, reason in result.rejected:
            events.append({"t": now, "rejected": entry.user, "reason": reason})
    save(ChainState(ledger.chain, target, ledger.mempool), args.chain)
    lines = [f"τ{e['t']}: " + _describe_event(e) for e in events]
    lines.append(f"now τ{target}, marker {ledger.chain.marker}, head {ledger.chain.head.number}")
    _emit(args, {"now": target, "marker": ledger.chain.marker, "head": ledger.chain.head.number,
                 "events": events, "guard": guard}, "\n".join(lines))
    return GUARD if guard else OK


def _describe_event(e: dict) -> str:
    if "block" in e:
        return f"appended {e['kind']} block {e['block']}"
    if "deletion" in e:
        d = e["deletion"]
        extra = f" ({d['reason']})" if d["reason"] else ""
        return f"deletion request {d['request'][0]},{d['request'][1]}: {d['verdict']}{extra}"
    if "prune" in e:
        p = e["prune"]
        if p["guard"]:
            return f"prune stopped by guard {p['guard']}"
        return f"pruned: marker {p['old_marker']} -> {p['new_marker']}, length {p['old_length']} -> {p['new_length']}"
    return f"rejected entry by {e['rejected']} ({e['reason']})"


def cmd_show(args) -> int:
    state = _state(args)
    chain = state.chain
    if args.json:
        _emit(args, {"marker": chain.marker, "now": state.now,
                     "pending": [[r.block, r.entry] for r in sorted(chain.pending_deletions)],
                     "blocks": [block_to_json(b) for b in chain.blocks]})
    else:
        color = args.color or (args.color is None and sys.stdout.isatty())
        sys.stdout.write(golden_render(chain, color=color))
    return OK


def cmd_verify(args) -> int:
    state = _state(args)
    verdict = verify_chain(state.chain)
    redundancy = audit_redundancy(state.chain) if verdict else []
    ok = bool(verdict) and not redundancy
    _emit(args, {"valid": ok, "verdict": str(verdict), "at": verdict.at, "reason": verdict.reason,
                 "redundancy": [{"summary": n, "reason": r} for n, r in redundancy]},
          "\n".join([str(verdict)] + [f"redundancy {r} at summary {n}" for n, r in redundancy]))
    return OK if ok else BROKEN


def cmd_simulate(args) -> int:
    from .sim import load_scenario, run_simulation

    overrides = {"seed": args.seed} if args.seed is not None else {}
    config = load_scenario(Path(args.scenario), **overrides)
    trace = run_simulation(config)
    if args.trace:
        Path(args.trace).write_text(trace.to_jsonl(), newline="\n")
    results = [r.to_json() for r in trace.sync_results()]
    finals = [{"node": n.node_id, "marker": n.chain.marker, "head": n.chain.head.number,
               "head_hash": n.chain.head.own_hash.hex()} for n in trace.nodes]
    text = [f"node {f['node']}: marker {f['marker']}, head {f['head']} {f['head_hash'][:5]}" for f in finals]
    text += [f"summary {r['height']}: {r['status']} {r['partitions']}" for r in results]
    text.append(f"trace digest {trace.digest()}")
    _emit(args, {"nodes": finals, "sync": results, "digest": trace.digest()}, "\n".join(text))
    return OK


def cmd_export(args) -> int:
    state = _state(args)
    text = dumps(state)
    if args.out and args.out != "-":
        Path(args.out).write_text(text, newline="\n")
    else:
        sys.stdout.write(text)
    return OK


# -- argument parsing ---------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--chain", default="chain.jsonl", help="chain file (JSON-Lines)")
    common.add_argument("--json", action="store_true", help="machine-readable output")

    parser = argparse.ArgumentParser(prog="prunechain", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("init", parents=[common], help="create a chain file with a Genesis block")
    p.add_argument("--config", help="YAML chain configuration")
    p.add_argument("--seed", type=int, help="derive the Genesis previous hash from a seed")
    p.add_argument("--random-genesis", action="store_true", help="random Genesis previous hash")
    p.add_argument("--from", dest="source", help="import an exported chain file")
    p.add_argument("--force", action="store_true", help="overwrite an existing chain file")
    p.set_defaults(func=cmd_init)

    p = sub.add_parser("keygen", parents=[common], help="create and register a user key")
    p.add_argument("user")
    p.add_argument("--key", help="where to write the key file")
    p.add_argument("--seed", type=int, help="deterministic key from a seed")
    p.add_argument("--admin", action="store_true", help="register as quorum admin")
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("append", parents=[common], help="queue a signed data entry")
    p.add_argument("payload", help="payload, parsed as YAML")
    p.add_argument("--key", help="signing key file")
    p.add_argument("--schema", help="YAML schema the payload must satisfy")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--expire-at", type=int, help="drop once the head's timestamp passes this tick")
    group.add_argument("--expire-block", type=int, help="drop once the head's number passes this block")
    p.add_argument("--depends-on", action="append", default=[], metavar="B,E")
    p.set_defaults(func=cmd_append)

    p = sub.add_parser("delete-request", parents=[common], help="queue a deletion request")
    p.add_argument("--key", help="signing key file")
    p.add_argument("--target", required=True, metavar="B,E")
    p.add_argument("--cosign", action="append", default=[], metavar="KEYFILE",
                   help="key file of a dependent party consenting to the deletion")
    p.set_defaults(func=cmd_delete_request)

    p = sub.add_parser("tick", parents=[common], help="advance time, sealing and pruning as due")
    when = p.add_mutually_exclusive_group()
    when.add_argument("--by", type=int, default=1)
    when.add_argument("--to", type=int)
    p.set_defaults(func=cmd_tick)

    p = sub.add_parser("show", parents=[common], help="print the chain, one line per block")
    p.add_argument("--color", action=argparse.BooleanOptionalAction, default=None)
    p.set_defaults(func=cmd_show)

    p = sub.add_parser("verify", parents=[common], help="verify hashes, links and signatures")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", parents=[common], help="run a quorum scenario")
    p.add_argument("scenario", help="YAML scenario file")
    p.add_argument("--seed", type=int)
    p.add_argument("--trace", help="write the JSON-Lines trace here")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("export", parents=[common], help="write the chain as JSON-Lines")
    p.add_argument("--out", help="output path (default stdout)")
    p.set_defaults(func=cmd_export)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            return args.func(args)
        Path(args.chain).parent.mkdir(parents=True, exist_ok=True)
        with locked(args.chain):
            return args.func(args)
    except CliError as exc:
        return _fail(args, exc.status, exc.reason, str(exc))
    except SchemaViolation as exc:
        return _fail(args, VALIDATION, exc.code, str(exc))
    except (ConfigError, ScriptError) as exc:
        return _fail(args, VALIDATION, exc.code, str(exc))
    except InvalidChain as exc:
        return _fail(args, BROKEN, exc.code, str(exc))
    except PruneChainError as exc:
        return _fail(args, VALIDATION, exc.code, str(exc))


def _fail(args, status: int, reason: str, message: str) -> int:
    if getattr(args, "json", False):
        print(json.dumps({"error": reason, "message": message, "status": status}, sort_keys=True))
    else:
        print(f"error [{reason}]: {message}", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
