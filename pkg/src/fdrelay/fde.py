"""Cyclic-prefix frequency-domain equivalent channel and block rate rules."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization, LinkSinrs, relay_mask
from .model import SYNCHRONOUS, SystemConfig
from .sfun import abs2


@dataclass(frozen=True)
class BinSpectrum:
    """Per-bin equivalent gains lam_i and SINRs gamma_i = |lam_i|^2."""

    lam: np.ndarray                     # (..., T) complex
    gamma: np.ndarray                   # (..., T) real, >= 0


def lambda_spectrum(real: ChannelRealization, dset, cfg: SystemConfig,
                    relay_power) -> BinSpectrum:
    """Equivalent per-bin gains of the combined direct-plus-relays channel.

    lam_i = sqrt(P_S) h_sd + sum_{k in dset} sqrt(P_R) h_rd_k e^{-j2pi i tau_k/T}.

    dset is an index tuple for one realization or a boolean mask (optionally
    batched); relays outside dset contribute exactly zero, so the sum always
    runs over all relays in index order and scalar and batched evaluation
    agree bit for bit.  An empty dset leaves the flat direct-only spectrum.
    Direct O(T N) evaluation; block lengths here are small enough that an FFT
    buys nothing.
    """
    t_len = cfg.block_len
    n = cfg.n_relays
    mask = relay_mask(dset, n)
    coef = (np.sqrt(relay_power)[..., None] if np.ndim(relay_power) else
            np.sqrt(relay_power)) * real.h_rd * mask
    base = np.sqrt(cfg.p_source) * real.h_sd
    i = np.arange(t_len)
    lam = np.zeros(np.shape(base) + (t_len,), dtype=complex)
    lam += np.asarray(base)[..., None]
    for k in range(n):
        phase = np.exp((-2j * np.pi * (cfg.delays[k] % t_len) / t_len) * i)
        lam += coef[..., k, None] * phase
    return BinSpectrum(lam, abs2(lam))


def exact_rate(spec: BinSpectrum, cfg: SystemConfig):
    """Achievable rate of the equalized block: sum_i log2(1+gamma_i)/(T+cp)."""
    r = np.log2(1.0 + spec.gamma).sum(axis=-1) / (cfg.block_len + cfg.cp_len)
    return float(r) if np.ndim(r) == 0 else r


def approx_rate(sinrs: LinkSinrs, dset, cfg: SystemConfig,
                real: ChannelRealization | None = None):
    """High-SNR flat approximation of the block rate.

    Asynchronous relaying adds per-relay SNRs (the oscillating cross terms
    cancel across bins for staggered delays); synchronous relaying combines
    the relay amplitudes coherently first, which needs the realization's h_rd.
    """
    mask = relay_mask(dset, np.asarray(sinrs.g_sr).shape[-1])
    if cfg.sync_mode == SYNCHRONOUS:
        if real is None:
            raise ValueError("synchronous approx_rate needs the channel realization")
        h_sum = (real.h_rd * mask).sum(axis=-1)
        relayed = sinrs.relay_tx_power * abs2(h_sum)
    else:
        relayed = (sinrs.g_rd * mask).sum(axis=-1)
    total = sinrs.g_sd + relayed
    r = (cfg.block_len / (cfg.block_len + cfg.cp_len)) * np.log2(1.0 + total)
    return float(r) if np.ndim(r) == 0 else r
