import base64
import json
import socket
import socketserver
import threading

import numpy as np
import pytest
from scipy.special import logsumexp

from semosd.prior import (
    LOG_FLOOR,
    NgramDenoiserPrior,
    OraclePrior,
    PriorProtocolError,
    RemotePrior,
    UniformPrior,
    floor_and_normalize,
    load_ngram,
    make_backend,
    ngram_denoiser_query,
    ngram_train,
    save_ngram,
)


def assert_valid_prior(mat, k):
    assert mat.shape == (k, 256)
    assert np.all(np.isfinite(mat))
    assert np.allclose(logsumexp(mat, axis=1), 0.0, atol=1e-6)


class TestUniform:
    def test_rows_constant(self):
        mat = UniformPrior().query(b"abc", b"12345678")
        assert_valid_prior(mat, 8)
        assert np.allclose(mat, -np.log(256.0))

    def test_fused_argmax_matches_channel(self, rng):
        # a constant row shifts every fused byte score equally
        from semosd.fusion import bit_channel_logpost, bit_marginalize, byte_channel_logpost, fuse

        L = rng.normal(0, 3, 64)
        bc = bit_channel_logpost(L)
        byte_ch, _ = byte_channel_logpost(bc, 8)
        prior = UniformPrior().query(b"", b"\x00" * 8)
        fused = fuse(bc, bit_marginalize(prior), byte_ch, prior, 0.4, 64).byte_scores
        assert np.array_equal(np.argmax(fused, axis=1), np.argmax(byte_ch, axis=1))


class TestOracle:
    def test_mass_on_truth(self):
        backend = OraclePrior(q=0.9)
        backend.truth = b"SEMANTIC"
        mat = backend.query(b"", b"XXXXXXXX")
        assert_valid_prior(mat, 8)
        for i, byte in enumerate(b"SEMANTIC"):
            assert int(np.argmax(mat[i])) == byte
            assert mat[i, byte] == pytest.approx(np.log(0.9), abs=1e-9)

    def test_requires_truth(self):
        with pytest.raises(RuntimeError):
            OraclePrior().query(b"", b"AB")


class TestNgramTraining:
    def test_repeated_letter_concentrates(self):
        model = ngram_train([b"aaaaaaaa"] * 50, order=2, delta=0.01)
        cond = np.exp(model.log_cond(b"a"))
        assert cond[ord("a")] > 0.99

    def test_unseen_context_backs_off_to_marginal(self):
        model = ngram_train([b"abab"] * 10, order=3, delta=0.1)
        assert b"zq" not in model.context_counts
        assert np.array_equal(model.log_cond(b"zq"), model.log_cond(b"##"))

    def test_huge_delta_flattens(self):
        model = ngram_train([b"abc"] * 5, order=2, delta=1e9)
        cond = np.exp(model.log_cond(b"a"))
        assert cond.max() - cond.min() < 1e-6

    def test_empty_corpus_rejected(self):
        with pytest.raises(ValueError):
            ngram_train([], order=2, delta=0.1)

    def test_save_load_roundtrip(self, tmp_path):
        model = ngram_train([b"the cat sat"] * 3, order=3, delta=0.05)
        path = tmp_path / "model.npz"
        save_ngram(model, path)
        loaded = load_ngram(path)
        assert loaded.order == 3 and loaded.delta == 0.05
        assert np.array_equal(loaded.log_cond(b"th"), model.log_cond(b"th"))
        assert np.array_equal(loaded.unigram, model.unigram)


class TestNgramDenoiser:
    def test_tiny_flip_rate_concentrates_on_hard_decision(self):
        model = ngram_train([b"hello world"] * 5, order=2, delta=0.5)
        mat = ngram_denoiser_query(model, b"", b"xy", flip_rate=1e-9)
        assert bytes(int(np.argmax(row)) for row in mat) == b"xy"

    def test_uniform_model_argmax_is_hd(self):
        model = ngram_train([bytes(range(256))] * 2, order=2, delta=1e9)
        mat = ngram_denoiser_query(model, b"", b"Qz", flip_rate=0.1)
        assert_valid_prior(mat, 2)
        assert bytes(int(np.argmax(row)) for row in mat) == b"Qz"

    def test_context_overrides_corrupted_byte(self):
        # trained on "he ": after ctx "h", candidates for a corrupted 'x'
        # weigh P(ngram) * flip-likelihood; 'e' wins through the context
        model = ngram_train([b"he "] * 1000, order=2, delta=0.1)
        mat = ngram_denoiser_query(model, b"h", b"x", flip_rate=0.1)
        assert int(np.argmax(mat[0])) == ord("e")

    def test_matches_hand_computed_row(self):
        # direct evaluation of the factorization on a two-sentence corpus
        model = ngram_train([b"ab", b"ac"], order=2, delta=0.5)
        p = 0.2
        mat = ngram_denoiser_query(model, b"a", b"b", flip_rate=p)
        counts = np.zeros(256)
        counts[ord("b")] = 1
        counts[ord("c")] = 1
        lp_ctx = np.log(counts + 0.5) - np.log(counts.sum() + 0.5 * 256)
        d = np.array([bin(v ^ ord("b")).count("1") for v in range(256)])
        expected = lp_ctx + d * np.log(p) + (8 - d) * np.log(1 - p)
        expected = np.maximum(expected, LOG_FLOOR)
        expected -= logsumexp(expected)
        assert np.allclose(mat[0], expected, atol=1e-12)

    def test_flip_rate_bounds(self):
        model = ngram_train([b"ab"], order=2, delta=0.1)
        with pytest.raises(ValueError):
            NgramDenoiserPrior(model, 0.5)


class TestFloorAndNormalize:
    def test_floors_then_normalizes(self):
        row = np.full((1, 256), -1000.0)
        row[0, 3] = 0.0
        out = floor_and_normalize(row)
        assert_valid_prior(out, 1)
        # floored entries stay close to the floor minus the normalizer
        assert out[0, 10] > -35.0


# ---------------------------------------------------------------------------
# Wire protocol
# ---------------------------------------------------------------------------


class _Server(socketserver.ThreadingTCPServer):
    allow_reuse_address = True


def _serve(handler_fn):
    """Start an NDJSON line server; returns (host, port, server)."""

    class Handler(socketserver.StreamRequestHandler):
        def handle(self):
            for line in self.rfile:
                reply = handler_fn(json.loads(line))
                if reply is None:
                    return
                self.wfile.write(json.dumps(reply).encode() + b"\n")
                self.wfile.flush()

    srv = _Server(("127.0.0.1", 0), Handler)
    threading.Thread(target=srv.serve_forever, daemon=True).start()
    return srv.server_address, srv


def _uniform_reply(msg):
    k = len(base64.b64decode(msg["hd"]))
    return {"id": msg["id"], "logp": [[-np.log(256.0)] * 256 for _ in range(k)]}


class TestRemotePrior:
    def test_uniform_server_roundtrip(self):
        (host, port), srv = _serve(_uniform_reply)
        try:
            client = RemotePrior(endpoint=f"{host}:{port}")
            mat = client.query(b"ctx bytes", b"ABCD")
            assert_valid_prior(mat, 4)
            assert np.allclose(mat, -np.log(256.0))
            assert client.renorm_warnings == 0
            client.close()
        finally:
            srv.shutdown()

    def test_unnormalized_rows_trigger_local_renorm(self):
        def skewed(msg):
            k = len(base64.b64decode(msg["hd"]))
            return {"id": msg["id"], "logp": [[1.5] * 256 for _ in range(k)]}

        (host, port), srv = _serve(skewed)
        try:
            client = RemotePrior(endpoint=f"{host}:{port}")
            mat = client.query(b"", b"xy")
            assert_valid_prior(mat, 2)
            assert client.renorm_warnings == 1
            client.close()
        finally:
            srv.shutdown()

    def test_truncated_response_is_protocol_error(self):
        def truncated(msg):
            return {"id": msg["id"], "logp": [[0.0] * 100]}

        (host, port), srv = _serve(truncated)
        try:
            client = RemotePrior(endpoint=f"{host}:{port}")
            with pytest.raises(PriorProtocolError):
                client.query(b"", b"xy")
            client.close()
        finally:
            srv.shutdown()

    def test_closed_connection_is_protocol_error(self):
        (host, port), srv = _serve(lambda msg: None)
        try:
            client = RemotePrior(endpoint=f"{host}:{port}")
            with pytest.raises(PriorProtocolError):
                client.query(b"", b"x")
            client.close()
        finally:
            srv.shutdown()

    def test_id_mismatch_is_protocol_error(self):
        (host, port), srv = _serve(lambda msg: {"id": msg["id"] + 7, "logp": [[0.0] * 256]})
        try:
            client = RemotePrior(endpoint=f"{host}:{port}")
            with pytest.raises(PriorProtocolError):
                client.query(b"", b"x")
            client.close()
        finally:
            srv.shutdown()


class TestMakeBackend:
    def test_specs(self, corpus_file):
        from semosd.corpus import load_sentences

        sentences = load_sentences(corpus_file)[:100]
        assert isinstance(make_backend("uniform"), UniformPrior)
        assert make_backend("oracle:q=0.7").q == 0.7
        backend = make_backend("ngram:order=2,delta=0.1,p=0.1", corpus_train=sentences)
        mat = backend.query(b"The cat ", b"is sleep")
        assert_valid_prior(mat, 8)

    def test_unknown_spec(self):
        with pytest.raises(ValueError):
            make_backend("sbert")

    def test_ngram_needs_corpus(self):
        with pytest.raises(ValueError):
            make_backend("ngram:order=2")
