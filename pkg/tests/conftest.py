from __future__ import annotations

import json
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import pytest

from werewolf_sim.config import build_run_spec
from werewolf_sim.runner import run_games


@pytest.fixture(scope="session")
def mock_run(tmp_path_factory) -> Path:
    """Twenty mock games (seeds 42..61), shared read-only by many tests."""
    out = tmp_path_factory.mktemp("mock20")
    run_dir, results = run_games(build_run_spec(games=20, mode="mock", seed=42, out_dir=out))
    assert not any(r.aborted for r in results)
    return run_dir


STUB_REPLY = {
    "target": "abstain",
    "bid": 3,
    "text": "I suspect nobody yet.",
    "scratchpad": "stub notes",
    "deceptive": 0,
    "confidence": 0.6,
    "type": "none",
    "suspicion": 0.4,
    "reasoning": "stub",
}


class _Stub(ThreadingHTTPServer):
    daemon_threads = True
    delay = 0.0
    status = 200
    body: dict = {"choices": [{"message": {"content": json.dumps(STUB_REPLY)}}]}
    hits = 0


class _Handler(BaseHTTPRequestHandler):
    def do_POST(self):  # noqa: N802
        server: _Stub = self.server  # type: ignore[assignment]
        server.hits += 1
        self.rfile.read(int(self.headers.get("Content-Length", 0)))
        if server.delay:
            time.sleep(server.delay)
        payload = json.dumps(server.body).encode()
        try:
            self.send_response(server.status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(payload)))
            self.end_headers()
            self.wfile.write(payload)
        except (BrokenPipeError, ConnectionResetError):
            pass

    def log_message(self, *args):
        pass


@pytest.fixture
def stub_server():
    """Local chat-completions stand-in; tweak ``delay``/``status``/``body`` per test."""
    server = _Stub(("127.0.0.1", 0), _Handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    server.url = f"http://127.0.0.1:{server.server_address[1]}/v1/chat/completions"
    yield server
    server.shutdown()
    server.server_close()


# --- acceptance summary --------------------------------------------------------

ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


def record_acceptance(number: int, name: str, ok: bool, detail: str) -> None:
    ACCEPTANCE[number] = (name, ok, detail)
    print(f"criterion {number} {'PASS' if ok else 'FAIL'} {name}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        name, ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number} {'PASS' if ok else 'FAIL'} {name}: {detail}")
