import json
from pathlib import Path

import pytest

from prunechain import ChainConfig, Entry, KeyPair, Roles, new_chain
from prunechain.cli import main as cli_main
from prunechain.ledger import Ledger

HERE = Path(__file__).parent
GOLDEN = HERE / "golden"
SCENARIOS = HERE / "scenarios"
USERS = ("ALPHA", "BRAVO", "CHARLIE")

# The audit session behind the three console checkpoints.  Entries queued
# with append/delete-request are sealed at the next tick.
SESSION = [
    ["init"],
    *[["keygen", u, "--seed", "7", "--key", f"{u}.key"] for u in USERS],
    ["append", "login", "--key", "ALPHA.key"], ["tick"], ["tick"],
    ["append", "login", "--key", "BRAVO.key"], ["tick"],
    ["append", "login", "--key", "CHARLIE.key"], ["tick"], ["tick"],
    ["delete-request", "--target", "3,1", "--key", "BRAVO.key"], ["tick", "--by", "3"],
    "checkpoint-1",
    ["tick"],
    "checkpoint-2",
    ["append", "login", "--key", "ALPHA.key"], ["tick"],
    ["append", "login", "--key", "CHARLIE.key"], ["tick"], ["tick"],
    ["append", "login", "--key", "BRAVO.key"], ["tick"], ["tick", "--by", "3"],
    "checkpoint-3",
]


def run_cli(workdir: Path, *argv: str, capsys=None) -> tuple[int, str]:
    import contextlib
    import io
    import os

    buf = io.StringIO()
    cwd = os.getcwd()
    os.chdir(workdir)
    try:
        with contextlib.redirect_stdout(buf):
            status = cli_main([*argv, "--chain", "chain.jsonl"])
    finally:
        os.chdir(cwd)
    return status, buf.getvalue()


def run_session(workdir: Path) -> dict[str, Path]:
    """Play SESSION in ``workdir``; returns chain-file snapshots per checkpoint."""
    snapshots = {}
    for step in SESSION:
        if isinstance(step, str):
            snap = workdir / f"{step}.jsonl"
            snap.write_text((workdir / "chain.jsonl").read_text())
            snapshots[step] = snap
            continue
        status, out = run_cli(workdir, *step)
        assert status in (0, 4), (step, status, out)
    return snapshots


@pytest.fixture(scope="session")
def keys():
    return {u: KeyPair.derive(7, u) for u in (*USERS, "ADMIN")}


@pytest.fixture(scope="session")
def roles(keys):
    return Roles({u: k.public for u, k in keys.items()}, admins={"ADMIN"})


@pytest.fixture
def ledger(roles):
    return Ledger(new_chain(ChainConfig(), roles))


def login(key: KeyPair, user: str, payload: bytes = b"login", **kw) -> Entry:
    return Entry.data(key, user, payload, **kw)


@pytest.fixture(scope="session")
def session_snapshots(tmp_path_factory):
    return run_session(tmp_path_factory.mktemp("session"))


def load_json_lines(path: Path) -> list[dict]:
    return [json.loads(line) for line in path.read_text().splitlines() if line]


def build_checkpoints(keys, roles) -> dict:
    """Engine-level replay of the audit session: chains at the three checkpoints."""
    from prunechain import EntryRef, make_delete_request

    led = Ledger(new_chain(ChainConfig(), roles))

    def at(t, user=None, entry=None):
        if user:
            led.submit(entry or login(keys[user], user))
        return led.step(t)

    at(1, "ALPHA"); at(2); at(3, "BRAVO"); at(4, "CHARLIE"); at(5)
    at(6, "BRAVO", make_delete_request(keys["BRAVO"], "BRAVO", EntryRef(3, 1)))
    at(7); at(8)
    out = {"after_logins": led.chain}
    out["first_prune_report"] = at(9).reports[0]
    out["first_prune"] = led.chain
    at(10, "ALPHA"); at(11, "CHARLIE"); at(12); at(13, "BRAVO"); at(14); at(15)
    out["second_prune_report"] = at(16).reports[0]
    out["second_prune"] = led.chain
    return out


@pytest.fixture(scope="session")
def checkpoints(keys, roles):
    return build_checkpoints(keys, roles)


def random_script(rng, n_nodes: int, corrupt: bool = False) -> tuple:
    """A random submit workload, optionally with one summary corruption."""
    from prunechain.sim import ScriptEvent

    events = [ScriptEvent(rng.randint(0, 25), "submit",
                          {"user": rng.choice(USERS), "payload": f"p{i}", "via": rng.randrange(n_nodes)})
              for i in range(rng.randint(3, 10))]
    if corrupt:
        events.append(ScriptEvent(rng.randint(0, 20), "corrupt", {"node": rng.randrange(n_nodes), "mode": "summary"}))
    return tuple(events)


def first_summary_after(trace, node: int, at: int) -> int:
    """Number of the first summary ``node`` built at or after time ``at``."""
    return min(e["number"] for e in trace.events
               if e["event"] == "summary" and e["node"] == node and e["t"] >= at)


# -- acceptance bookkeeping -------------------------------------------------------

ACCEPTANCE: list[tuple[str, bool, float, float, str]] = []


class Criterion:
    """Times a criterion's body and records one pass/fail line for the summary."""

    def __init__(self, name: str, budget: float):
        self.name, self.budget = name, budget

    def __enter__(self):
        import gc
        import time
        gc.collect()  # don't bill earlier tests' garbage to this criterion
        self.start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        import time
        elapsed = time.perf_counter() - self.start
        ok = exc_type is None and elapsed < self.budget
        note = "" if exc_type is None else f"{exc_type.__name__}: {str(exc).splitlines()[0] if str(exc) else ''}"
        ACCEPTANCE.append((self.name, ok, elapsed, self.budget, note))
        line = f"{'PASS' if ok else 'FAIL'}  {self.name}  ({elapsed:.2f}s, budget {self.budget:g}s) {note}".rstrip()
        print(line)
        if exc_type is None:
            assert elapsed < self.budget, f"{self.name} took {elapsed:.2f}s (budget {self.budget}s)"
        return False


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, elapsed, budget, note in ACCEPTANCE:
        terminalreporter.write_line(
            f"{'PASS' if ok else 'FAIL'}  {name}  ({elapsed:.2f}s, budget {budget:g}s) {note}".rstrip())
