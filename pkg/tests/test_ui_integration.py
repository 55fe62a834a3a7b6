"""Cross-stack check: the compiled browser flow against the real service.

Skipped when node or the built frontend is absent; the frontend's own
vitest suite covers the same contract against a service mock.
"""

from __future__ import annotations

import json
import shutil
import socket
import subprocess
import sys
import time
from pathlib import Path

import httpx
import pytest

from discoursekit.variants.candidates import VariantCandidate
from discoursekit.variants.rules import RuleDecision, RuleFired

FRONTEND = Path(__file__).resolve().parent.parent / "frontend"


def _free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


def make_candidates(n=10):
    return [
        VariantCandidate(
            surface=f"slav{i:02d}",
            keyword="slave",
            cosine_to_keyword=0.97 - i / 100,
            levenshtein=2,
            similarity_ratio=75.0,
            rule_decision=RuleDecision.NEEDS_REVIEW,
            rule_fired=RuleFired.NO_RULE,
        )
        for i in range(n)
    ]


@pytest.mark.skipif(
    shutil.which("node") is None or not (FRONTEND / "dist" / "flow.js").exists(),
    reason="node or built frontend not available",
)
def test_compiled_flow_matches_direct_api(tmp_path):
    port = _free_port()
    server_code = (
        "import uvicorn, sys\n"
        "from discoursekit.annotation.api import create_app\n"
        "from discoursekit.annotation.store import SessionStore\n"
        f"store = SessionStore({str(tmp_path / 'sessions')!r})\n"
        f"uvicorn.run(create_app(store), host='127.0.0.1', port={port}, log_level='error')\n"
    )
    server = subprocess.Popen([sys.executable, "-c", server_code])
    try:
        base = f"http://127.0.0.1:{port}"
        deadline = time.time() + 15
        while True:
            try:
                httpx.get(base + "/sessions/none", timeout=1.0)
                break
            except httpx.TransportError:
                if time.time() > deadline:
                    raise RuntimeError("service did not come up")
                time.sleep(0.2)

        records = [
            {
                "surface": c.surface,
                "keyword": c.keyword,
                "cosine_to_keyword": c.cosine_to_keyword,
                "levenshtein": c.levenshtein,
                "similarity_ratio": c.similarity_ratio,
                "rule_decision": c.rule_decision.value,
                "rule_fired": c.rule_fired.value,
                "human_label": None,
            }
            for c in make_candidates(10)
        ]
        sessions = []
        for _ in range(2):
            response = httpx.post(
                base + "/sessions",
                json={"keyword": "slave", "annotators": ["alice", "bob"], "candidates": records},
                timeout=5.0,
            )
            assert response.status_code == 201
            sessions.append(response.json()["session_id"])

        result = subprocess.run(
            ["node", "tests/integration.mjs", base, sessions[0], sessions[1]],
            cwd=FRONTEND,
            capture_output=True,
            text=True,
            timeout=60,
        )
        assert result.returncode == 0, result.stderr
        payload = json.loads(result.stdout.strip().splitlines()[-1])
        assert payload["viaUi"] == payload["direct"]
        assert payload["viaUi"]["complete"] is True
        assert payload["viaUi"]["doubly_labeled"] == 10
    finally:
        server.terminate()
        server.wait(timeout=10)
