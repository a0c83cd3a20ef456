"""Wire-protocol conformance against a live server process."""

import base64
import json
import socket
import subprocess
import sys
import time

import numpy as np
import pytest


@pytest.fixture(scope="module")
def server(uniform_checkpoint):
    proc = subprocess.Popen(
        [sys.executable, "-m", "prior_server.cli", "serve", "--checkpoint", uniform_checkpoint,
         "--port", "0"],
        stdout=subprocess.PIPE,
        stderr=subprocess.DEVNULL,
        text=True,
    )
    line = proc.stdout.readline()
    assert line.startswith("listening on"), line
    host, port = line.split()[-1].rsplit(":", 1)
    yield host, int(port)
    proc.terminate()
    proc.wait(timeout=10)


def _talk(sock_file_pair, payload: dict) -> dict:
    r, w = sock_file_pair
    w.write(json.dumps(payload).encode() + b"\n")
    w.flush()
    return json.loads(r.readline())


@pytest.fixture()
def conn(server):
    host, port = server
    s = socket.create_connection((host, port), timeout=30)
    pair = (s.makefile("rb"), s.makefile("wb"))
    yield pair
    s.close()


def _req(req_id, ctx=b"prefix ", hd=b"ABCDEFGH"):
    return {"id": req_id, "ctx": base64.b64encode(ctx).decode(), "hd": base64.b64encode(hd).decode()}


class TestProtocol:
    def test_uniform_rows(self, conn):
        reply = _talk(conn, _req(0))
        rows = np.array(reply["logp"])
        assert rows.shape == (8, 256)
        assert np.allclose(rows, -np.log(256.0), atol=1e-5)

    def test_id_bijection_over_1000_requests(self, conn):
        ids = list(range(1000))
        seen = []
        for i in ids:
            reply = _talk(conn, _req(i, hd=bytes([i % 256] or [1])))
            seen.append(reply["id"])
            rows = np.asarray(reply["logp"])
            total = np.log(np.exp(rows).sum(axis=1))
            assert np.all(np.abs(total) < 1e-3)
        assert seen == ids

    def test_k_follows_hd_length(self, conn):
        for k in (1, 3, 8, 16):
            reply = _talk(conn, _req(5, hd=bytes(k)))
            assert len(reply["logp"]) == k

    def test_malformed_request_gets_error_with_id(self, conn):
        reply = _talk(conn, {"id": 77, "ctx": "!!!not-base64", "hd": 3})
        assert reply["id"] == 77
        assert "error" in reply
        # connection survives the error
        assert "logp" in _talk(conn, _req(78))

    def test_oversized_ctx_flagged_truncated(self, conn):
        reply = _talk(conn, _req(9, ctx=b"x" * 500))
        assert reply.get("truncated") is True
        assert len(reply["logp"]) == 8

    def test_unparseable_line_reports_error(self, conn):
        r, w = conn
        w.write(b"this is not json\n")
        w.flush()
        reply = json.loads(r.readline())
        assert "error" in reply


class TestStdioMode:
    def test_round_trip(self, uniform_checkpoint):
        proc = subprocess.Popen(
            [sys.executable, "-m", "prior_server.cli", "serve", "--checkpoint", uniform_checkpoint,
             "--stdio"],
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
        )
        try:
            proc.stdin.write(json.dumps(_req(4, hd=b"xy")).encode() + b"\n")
            proc.stdin.flush()
            reply = json.loads(proc.stdout.readline())
            assert reply["id"] == 4 and len(reply["logp"]) == 2
        finally:
            proc.terminate()
            proc.wait(timeout=10)


class TestHarnessClientIntegration:
    def test_decoder_cli_serve_check(self, server):
        """The decoder package's client pings us over its own protocol code."""
        import shutil

        if shutil.which("semosd") is None:
            pytest.skip("decoder CLI not installed")
        host, port = server
        out = subprocess.run(
            ["semosd", "serve-check", "--endpoint", f"{host}:{port}", "--k", "8"],
            capture_output=True, text=True, timeout=60,
        )
        assert out.returncode == 0, out.stderr
        assert "ok:" in out.stdout
