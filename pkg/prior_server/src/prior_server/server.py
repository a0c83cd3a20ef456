"""Newline-delimited JSON serving of prior rows.

One JSON object per line. Request: {"id": int, "ctx": base64, "hd": base64}.
Response: {"id": int, "logp": [[256 floats] x k]}; plus "truncated": true
when an oversized ctx was left-truncated. Malformed requests produce
{"id": ..., "error": "..."} and the connection stays up. Responses are
written in request order per connection.
"""

from __future__ import annotations

import base64
import json
import socketserver
import sys

from .model import load_checkpoint, query_logp


def handle_line(model, line: bytes) -> dict:
    try:
        msg = json.loads(line)
    except json.JSONDecodeError as e:
        return {"id": None, "error": f"unparseable request: {e}"}
    req_id = msg.get("id")
    try:
        ctx = base64.b64decode(msg["ctx"])
        hd = base64.b64decode(msg["hd"])
        if not hd:
            raise ValueError("empty hd")
    except (KeyError, ValueError, TypeError) as e:
        return {"id": req_id, "error": f"bad request fields: {e}"}
    logp, truncated = query_logp(model, ctx, hd)
    reply = {"id": req_id, "logp": logp}
    if truncated:
        reply["truncated"] = True
    return reply


def serve_stdio(checkpoint_path) -> None:
    model = load_checkpoint(checkpoint_path)
    out = sys.stdout.buffer
    for line in sys.stdin.buffer:
        if not line.strip():
            continue
        out.write(json.dumps(handle_line(model, line)).encode() + b"\n")
        out.flush()


class _Server(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True


def serve_tcp(checkpoint_path, host: str = "127.0.0.1", port: int = 9431, ready_fd=None):
    """Blocking TCP server; prints the bound address once listening."""
    model = load_checkpoint(checkpoint_path)

    class Handler(socketserver.StreamRequestHandler):
        def handle(self):
            for line in self.rfile:
                if not line.strip():
                    continue
                self.wfile.write(json.dumps(handle_line(model, line)).encode() + b"\n")
                self.wfile.flush()

    with _Server((host, port), Handler) as srv:
        bound = srv.server_address
        print(f"listening on {bound[0]}:{bound[1]}", flush=True)
        srv.serve_forever()
