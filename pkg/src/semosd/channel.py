"""BPSK modulation plus the AWGN and Gilbert-Elliott noise models.

Both channels are calibrated to the same total noise energy per bit at a
given Eb/N0, so their curves share an x-axis: the block-average variance
sigma_hat^2 = 1/(2 R gamma_b) is split between a Good and a Bad state for
Gilbert-Elliott. Reception is state-unaware: decoders only ever see the
observation vector and sigma_hat^2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class GEParams:
    pi_b: float  # stationary bad-state probability
    mean_burst: float  # mean bad-run length in bits
    rho_sq: float  # sigma_B^2 / sigma_G^2


@dataclass(frozen=True)
class ChannelConfig:
    kind: str  # "awgn" | "ge"
    ebn0_db: float
    rate: float
    ge: GEParams | None = None


@dataclass(frozen=True)
class Calibration:
    sigma_hat_sq: float
    sigma_g_sq: float
    sigma_b_sq: float
    p_gb: float  # P(Good -> Bad)
    p_bg: float  # P(Bad -> Good)


@dataclass(frozen=True)
class Observation:
    """One block's real channel outputs.

    hidden_states is simulation bookkeeping (1 = Bad); decoders must only
    read (y, sigma_hat_sq).
    """

    y: np.ndarray
    sigma_hat_sq: float
    hidden_states: np.ndarray | None = None


def calibrate(cfg: ChannelConfig) -> Calibration:
    """Derive the per-state variances delivering the configured Eb/N0."""
    gamma_b = 10.0 ** (cfg.ebn0_db / 10.0)
    sigma_hat_sq = 1.0 / (2.0 * cfg.rate * gamma_b)
    if cfg.kind == "awgn":
        return Calibration(sigma_hat_sq, sigma_hat_sq, sigma_hat_sq, 0.0, 0.0)
    if cfg.kind != "ge":
        raise ValueError(f"unknown channel kind {cfg.kind!r}")
    ge = cfg.ge
    if ge is None:
        raise ValueError("ge channel requires GEParams")
    if not 0.0 < ge.pi_b < 1.0:
        raise ValueError(f"pi_b must be in (0,1), got {ge.pi_b}")
    if ge.mean_burst < 1.0 or ge.rho_sq <= 1.0:
        raise ValueError("need mean_burst >= 1 and rho_sq > 1")
    p_bg = 1.0 / ge.mean_burst
    p_gb = ge.pi_b * p_bg / (1.0 - ge.pi_b)
    sigma_g_sq = sigma_hat_sq / ((1.0 - ge.pi_b) + ge.pi_b * ge.rho_sq)
    sigma_b_sq = ge.rho_sq * sigma_g_sq
    return Calibration(sigma_hat_sq, sigma_g_sq, sigma_b_sq, p_gb, p_bg)


def ge_state_chain(cal: Calibration, pi_b: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """n steps of the two-state chain from a stationary start (1 = Bad).

    Built run-by-run: each state's sojourn is geometric in its leave
    probability, which is exact and cheap for bursty parameters.
    """
    states = np.empty(n, dtype=np.int8)
    pos = 0
    bad = bool(rng.random() < pi_b)
    while pos < n:
        leave = cal.p_bg if bad else cal.p_gb
        run = int(rng.geometric(leave)) if leave > 0.0 else n - pos
        run = min(run, n - pos)
        states[pos : pos + run] = 1 if bad else 0
        pos += run
        bad = not bad
    return states


def transmit(cfg: ChannelConfig, c, rng: np.random.Generator) -> Observation:
    """BPSK-modulate a codeword and add channel noise: y = (1 - 2c) + z."""
    c = np.asarray(c, dtype=np.uint8)
    cal = calibrate(cfg)
    s = 1.0 - 2.0 * c.astype(np.float64)
    if cfg.kind == "awgn":
        z = rng.normal(0.0, np.sqrt(cal.sigma_hat_sq), len(c))
        return Observation(s + z, cal.sigma_hat_sq, None)
    states = ge_state_chain(cal, cfg.ge.pi_b, len(c), rng)
    sigma = np.where(states == 1, np.sqrt(cal.sigma_b_sq), np.sqrt(cal.sigma_g_sq))
    z = rng.normal(0.0, 1.0, len(c)) * sigma
    return Observation(s + z, cal.sigma_hat_sq, states)


def llr(obs: Observation) -> np.ndarray:
    """Bit LLRs from the block-average variance; positive favors bit 0."""
    if obs.sigma_hat_sq <= 0:
        raise ValueError("sigma_hat_sq must be positive")
    return 2.0 * obs.y / obs.sigma_hat_sq
