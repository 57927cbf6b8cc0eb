import http.server
import json
import threading
import time

import pytest

from tutorstack.rag.backends import (
    BackendAuthError,
    BackendError,
    BackendTimeoutError,
    BackendProtocolError,
    MockBackend,
    RemoteBackend,
    RemoteConfig,
    make_backend,
)
from tutorstack.rag.prompt import assemble_prompt

BUNDLE = assemble_prompt("Student s1\nWeak skills: none", [], "what is a basis?")


class _StubHandler(http.server.BaseHTTPRequestHandler):
    hits = {"count": 0}

    def log_message(self, *args):
        pass

    def _send_json(self, status, payload):
        body = json.dumps(payload).encode()
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_POST(self):
        self.hits["count"] += 1
        length = int(self.headers.get("Content-Length", 0))
        request = json.loads(self.rfile.read(length)) if length else {}
        if self.path == "/ok":
            self._send_json(200, {
                "choices": [{"message": {"role": "assistant", "content": "a basis spans"}}],
            })
        elif self.path == "/echo-model":
            self._send_json(200, {
                "choices": [{"message": {"content": f"model={request.get('model')}"}}],
            })
        elif self.path == "/unauthorized":
            self._send_json(401, {"error": "bad key"})
        elif self.path == "/slow":
            time.sleep(1.0)
            self._send_json(200, {"choices": []})
        elif self.path == "/malformed":
            self._send_json(200, {"unexpected": True})
        elif self.path == "/flaky":
            if self.hits["count"] % 2 == 1:
                self._send_json(500, {"error": "transient"})
            else:
                self._send_json(200, {
                    "choices": [{"message": {"content": "recovered"}}],
                })


@pytest.fixture()
def stub():
    _StubHandler.hits = {"count": 0}
    httpd = http.server.ThreadingHTTPServer(("127.0.0.1", 0), _StubHandler)
    thread = threading.Thread(target=httpd.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{httpd.server_address[1]}", _StubHandler.hits
    httpd.shutdown()


class TestMockBackend:
    def test_deterministic(self):
        backend = MockBackend()
        assert backend.complete(BUNDLE) == backend.complete(BUNDLE)

    def test_embeds_question_and_summary(self):
        answer = MockBackend().complete(BUNDLE)
        assert "what is a basis?" in answer
        assert "Student s1" in answer


class TestRemoteBackend:
    def test_fixed_text(self, stub):
        url, _ = stub
        backend = RemoteBackend(RemoteConfig(url=f"{url}/ok", api_key="k"))
        assert backend.complete(BUNDLE) == "a basis spans"

    def test_model_name_forwarded(self, stub):
        url, _ = stub
        backend = RemoteBackend(RemoteConfig(url=f"{url}/echo-model", model="tutor-1"))
        assert backend.complete(BUNDLE) == "model=tutor-1"

    def test_auth_failure(self, stub):
        url, hits = stub
        backend = RemoteBackend(RemoteConfig(url=f"{url}/unauthorized"))
        with pytest.raises(BackendAuthError):
            backend.complete(BUNDLE)
        assert hits["count"] == 1  # auth errors are not retried

    def test_timeout_after_exactly_two_attempts(self, stub):
        url, hits = stub
        backend = RemoteBackend(
            RemoteConfig(url=f"{url}/slow", timeout=0.2)
        )
        with pytest.raises(BackendTimeoutError):
            backend.complete(BUNDLE)
        # wait for the slow handler threads to finish counting
        time.sleep(1.2)
        assert hits["count"] == 2

    def test_malformed_response(self, stub):
        url, _ = stub
        backend = RemoteBackend(RemoteConfig(url=f"{url}/malformed"))
        with pytest.raises(BackendProtocolError):
            backend.complete(BUNDLE)

    def test_transient_500_retried_once(self, stub):
        url, hits = stub
        backend = RemoteBackend(RemoteConfig(url=f"{url}/flaky"))
        assert backend.complete(BUNDLE) == "recovered"
        assert hits["count"] == 2


class TestMakeBackend:
    def test_mock(self):
        assert make_backend("mock").name == "mock"

    def test_remote_requires_url(self):
        with pytest.raises(BackendError):
            make_backend("remote", env={})

    def test_remote_from_env(self):
        env = {
            "TUTORSTACK_LLM_URL": "http://example.test/v1/chat",
            "TUTORSTACK_LLM_KEY": "secret",
            "TUTORSTACK_LLM_MODEL": "tutor-2",
        }
        backend = make_backend("remote", env=env)
        assert backend.config.url == "http://example.test/v1/chat"
        assert backend.config.model == "tutor-2"

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            make_backend("astrology")
