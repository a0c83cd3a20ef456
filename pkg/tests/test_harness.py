import csv
import json

import numpy as np
import pytest

from semosd.cli import load_config_file, main
from semosd.harness import CSV_COLUMNS, DecoderSpec, RunConfig, run_point, run_sweep


def _cfg(**kw):
    base = dict(
        code="rs_16_8",
        decoder=DecoderSpec(kind="osd", m=1),
        ebn0_grid=(2.0,),
        max_blocks=200,
        min_block_errors=10_000,
        master_seed=42,
    )
    base.update(kw)
    return RunConfig(**base)


def _counters(stats):
    return (stats.blocks, stats.block_errors, stats.bit_errors, stats.byte_errors,
            tuple(stats.teps), stats.wins_bit, stats.wins_byte, stats.ties)


class TestDeterminism:
    def test_identical_rerun(self):
        a = run_point(_cfg(), 2.0)
        b = run_point(_cfg(), 2.0)
        assert _counters(a) == _counters(b)
        assert a.block_errors > 0

    def test_worker_count_invariance(self, corpus_file):
        cfg1 = _cfg(corpus=corpus_file, workers=1, max_blocks=150)
        cfg2 = _cfg(corpus=corpus_file, workers=2, max_blocks=150)
        a = run_sweep(cfg1)
        b = run_sweep(cfg2)
        assert [_counters(s) for s in a] == [_counters(s) for s in b]

    def test_stopping_rule_cuts_mid_chunk(self):
        cfg = _cfg(ebn0_grid=(0.0,), max_blocks=500, min_block_errors=7)
        stats = run_point(cfg, 0.0)
        assert stats.block_errors == 7
        assert stats.blocks < 500

    def test_seed_changes_results(self):
        a = run_point(_cfg(master_seed=1), 2.0)
        b = run_point(_cfg(master_seed=2), 2.0)
        assert _counters(a) != _counters(b)


class TestDecoders:
    def test_noiseless_point_has_zero_bler(self):
        stats = run_point(_cfg(ebn0_grid=(90.0,), max_blocks=50), 90.0)
        assert stats.block_errors == 0

    def test_bm_runs_both_codes(self):
        for code in ("rs_16_8", "bch_127_64"):
            cfg = _cfg(code=code, decoder=DecoderSpec(kind="bm"), max_blocks=60)
            stats = run_point(cfg, 2.0)
            assert stats.blocks == 60

    def test_semosd_oracle_beats_osd_locally(self):
        osd = run_point(_cfg(max_blocks=400, ebn0_grid=(1.0,)), 1.0)
        sem_cfg = _cfg(
            decoder=DecoderSpec(kind="semosd", m=1, omega=2, T=16, alpha=0.5, prior="oracle:q=0.9"),
            max_blocks=400,
            ebn0_grid=(1.0,),
        )
        sem = run_point(sem_cfg, 1.0)
        assert sem.block_errors < osd.block_errors

    def test_family_win_counters_partition_blocks(self, corpus_file):
        cfg = _cfg(
            decoder=DecoderSpec(kind="semosd", m=1, omega=1, T=4, alpha=0.5, prior="uniform"),
            corpus=corpus_file,
            max_blocks=80,
            ebn0_grid=(1.0,),
        )
        stats = run_point(cfg, 1.0)
        assert stats.wins_bit + stats.wins_byte + stats.ties == stats.blocks

    def test_ngram_prior_end_to_end(self, corpus_file):
        cfg = _cfg(
            decoder=DecoderSpec(kind="semosd", m=1, omega=1, T=8, alpha=0.5,
                                prior="ngram:order=3,delta=0.05,p=0.1"),
            corpus=corpus_file,
            max_blocks=50,
            ebn0_grid=(2.0,),
        )
        stats = run_point(cfg, 2.0)
        assert stats.blocks == 50

    def test_remote_prior_fallback_policy(self, corpus_file):
        # a server that always responds malformed: "uniform" substitutes and
        # counts, "fail" propagates
        import json
        import socketserver
        import threading

        class Handler(socketserver.StreamRequestHandler):
            def handle(self):
                for line in self.rfile:
                    msg = json.loads(line)
                    self.wfile.write(json.dumps({"id": msg["id"], "logp": [[0.0] * 5]}).encode() + b"\n")
                    self.wfile.flush()

        srv = socketserver.ThreadingTCPServer(("127.0.0.1", 0), Handler)
        srv.allow_reuse_address = True
        threading.Thread(target=srv.serve_forever, daemon=True).start()
        endpoint = f"127.0.0.1:{srv.server_address[1]}"
        try:
            base = dict(
                code="rs_16_8",
                decoder=DecoderSpec(kind="semosd", m=1, omega=1, T=4, alpha=0.5, prior=f"remote:{endpoint}"),
                ebn0_grid=(2.0,), max_blocks=10, min_block_errors=10**9,
                master_seed=0, corpus=corpus_file,
            )
            stats = run_point(RunConfig(**base, fallback="uniform"), 2.0)
            assert stats.blocks == 10 and stats.prior_fallbacks == 10
            from semosd.prior import PriorProtocolError

            with pytest.raises(PriorProtocolError):
                run_point(RunConfig(**base, fallback="fail"), 2.0)
        finally:
            srv.shutdown()

    def test_semosd_families_variants(self):
        for fam in ("bit", "byte"):
            cfg = _cfg(
                decoder=DecoderSpec(kind="semosd", m=1, omega=1, T=4, alpha=0.5,
                                    prior="oracle:q=0.9", families=fam),
                max_blocks=30,
            )
            stats = run_point(cfg, 2.0)
            if fam == "bit":
                assert stats.wins_byte == 0
            else:
                assert stats.wins_bit == 0 and stats.ties == 0


class TestOutputs:
    def test_sweep_writes_one_row_per_point(self, tmp_path):
        out = tmp_path / "res.csv"
        grid = tuple(np.arange(0.0, 3.5, 0.5))
        cfg = _cfg(ebn0_grid=grid, max_blocks=20, output=str(out))
        run_sweep(cfg)
        with open(out) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == CSV_COLUMNS
        assert len(rows) == 1 + 7

    def test_json_payload(self, tmp_path):
        out = tmp_path / "res.json"
        cfg = _cfg(ebn0_grid=(1.0, 2.0), max_blocks=20, json_output=str(out))
        run_sweep(cfg)
        payload = json.loads(out.read_text())
        assert payload["config"]["code"] == "rs_16_8"
        assert len(payload["points"]) == 2
        assert {"bler", "mean_teps", "wins_bit"} <= set(payload["points"][0])


class TestCli:
    def test_tepcount_output(self, capsys):
        assert main(["tepcount", "--kb", "64", "--m", "4", "--k", "8", "--omega", "2", "--T", "16"]) == 0
        assert capsys.readouterr().out.split() == ["679121", "7297", "686418"]

    def test_bound_output(self, capsys):
        assert main(["bound", "--n", "128", "--k", "64", "--ebn0", "1.0"]) == 0
        value = float(capsys.readouterr().out.split()[1])
        assert value == pytest.approx(0.1027, rel=0.05)

    def test_simulate_smoke(self, capsys, tmp_path):
        out = tmp_path / "r.csv"
        rc = main([
            "simulate", "--code", "rs_16_8", "--decoder", "osd", "--m", "1",
            "--ebn0", "2.0", "--max-blocks", "30", "--seed", "5", "--output", str(out),
        ])
        assert rc == 0
        assert out.exists()

    def test_semosd_without_corpus_is_config_error(self, capsys):
        rc = main(["simulate", "--decoder", "semosd", "--ebn0", "1.0", "--max-blocks", "5"])
        assert rc != 0

    def test_config_file_applies_and_flags_win(self, tmp_path, capsys):
        cfgfile = tmp_path / "run.cfg"
        cfgfile.write_text("max-blocks = 10\nebn0 = 2.5\nseed = 9  # comment\n")
        rc = main(["simulate", "--config", str(cfgfile), "--decoder", "osd", "--m", "1",
                   "--ebn0", "1.5"])
        assert rc == 0
        head = capsys.readouterr().out
        assert " 1.50 " in head  # explicit flag beat the file
        assert "    10 " in head  # file value applied

    def test_config_parser(self, tmp_path):
        cfgfile = tmp_path / "c.cfg"
        cfgfile.write_text("# full line comment\nworkers = 2\nprior = oracle:q=0.8\n")
        assert load_config_file(cfgfile) == {"workers": "2", "prior": "oracle:q=0.8"}

    def test_train_prior_cli(self, tmp_path, corpus_file):
        model_path = tmp_path / "model.npz"
        rc = main(["train-prior", "--corpus", corpus_file, "--order", "2",
                   "--delta", "0.1", "--output", str(model_path)])
        assert rc == 0 and model_path.exists()
        from semosd.prior import load_ngram

        assert load_ngram(model_path).order == 2
