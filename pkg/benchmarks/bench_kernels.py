"""Compare the compiled and pure-numpy TEP search kernels.

Runs the same decoding workloads through both backends and reports
per-block latency and TEP throughput. Usage: python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from semosd.channel import ChannelConfig, llr, transmit
from semosd.codes import build_bch_127_64, build_rs_16_8, encode
from semosd.fusion import channel_only_scores
from semosd.kernels import get_backend
from semosd.semosd import DecodeParams, decode, tep_count

WORKLOADS = [
    ("RS(16,8)  m=2 bit-only", build_rs_16_8, DecodeParams(m=2, omega=-1), 2.0, 40),
    ("RS(16,8)  m=3 + byte(2,16)", build_rs_16_8, DecodeParams(m=3, omega=2, T=16), 1.0, 20),
    ("BCH(127,64) m=4 bit-only", build_bch_127_64, DecodeParams(m=4, omega=-1), 1.0, 5),
]


def bench(backend_name: str, builder, params, ebn0, blocks) -> tuple[float, int]:
    try:
        get_backend(backend_name)
    except ImportError:
        return float("nan"), 0
    code = builder()
    cfg = ChannelConfig("awgn", ebn0, code.rate)
    rng = np.random.default_rng(0)
    scores = []
    for _ in range(blocks):
        c = encode(code, rng.integers(0, 2, code.k_b).astype(np.uint8))
        obs = transmit(cfg, c, rng)
        scores.append(channel_only_scores(llr(obs), code.k))
    t0 = time.perf_counter()
    teps = 0
    for s in scores:
        res = decode(code, s, params, backend=backend_name)
        teps += res.teps_evaluated
    elapsed = time.perf_counter() - t0
    return elapsed / blocks, teps


def main():
    print(f"{'workload':<28} {'backend':<8} {'ms/block':>10} {'TEPs/s':>12}")
    for name, builder, params, ebn0, blocks in WORKLOADS:
        code = builder()
        n_tep = tep_count(code.k_b, params.m, code.k, params.omega, params.T)
        for backend in ("cython", "python"):
            per_block, teps = bench(backend, builder, params, ebn0, blocks)
            if np.isnan(per_block):
                print(f"{name:<28} {backend:<8} {'unavailable':>10}")
                continue
            print(f"{name:<28} {backend:<8} {per_block * 1e3:>10.2f} {n_tep / per_block:>12.3g}")


if __name__ == "__main__":
    main()
