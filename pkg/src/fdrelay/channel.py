"""Block-fading channel realizations and per-link SINRs."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import SystemConfig
from .sfun import abs2, gains_from_uniforms

# Philox emits 4 doubles per counter block; a trial needs 2*(1+2N) uniforms,
# padded up to 4*(N+1) so every trial owns a whole number of counter blocks.
PHILOX_BLOCK = 4


def uniforms_per_trial(n_relays: int) -> int:
    """Uniform doubles actually used per realization: 2 per channel gain."""
    return 2 * (1 + 2 * n_relays)


def trial_block_uniforms(n_relays: int) -> int:
    """Uniform doubles consumed per realization, padded to whole Philox blocks."""
    need = uniforms_per_trial(n_relays)
    return PHILOX_BLOCK * ((need + PHILOX_BLOCK - 1) // PHILOX_BLOCK)


@dataclass(frozen=True)
class ChannelRealization:
    """One fading block: h_sd scalar, h_sr and h_rd of length n_relays.

    Batched draws hold a leading axis instead: h_sd (B,), h_sr/h_rd (B, N).
    """

    h_sd: complex | np.ndarray
    h_sr: np.ndarray
    h_rd: np.ndarray


def draw_realization(cfg: SystemConfig, rng: np.random.Generator,
                     size: int | None = None) -> ChannelRealization:
    """Draw one realization (size None) or a batch of size independent ones.

    Consumes exactly trial_block_uniforms(cfg.n_relays) doubles per
    realization in a fixed layout (h_sd, then h_sr, then h_rd, then padding),
    so a counter-based stream positioned at a trial boundary reproduces that
    trial regardless of batching.
    """
    n = cfg.n_relays
    width = trial_block_uniforms(n)
    u = rng.random((width,) if size is None else (size, width))
    h_sd = gains_from_uniforms(u[..., 0:2], cfg.var_sd)
    h_sr = gains_from_uniforms(u[..., 2:2 + 2 * n].reshape(u.shape[:-1] + (n, 2)),
                               cfg.var_sr)
    h_rd = gains_from_uniforms(u[..., 2 + 2 * n:2 + 4 * n].reshape(u.shape[:-1] + (n, 2)),
                               cfg.var_rd)
    return ChannelRealization(h_sd, h_sr, h_rd)


@dataclass(frozen=True)
class LinkSinrs:
    """Instantaneous per-link SINRs under a given relay transmit power."""

    g_sd: float | np.ndarray            # P_S |h_sd|^2
    g_sr: np.ndarray                    # P_S |h_sr_k|^2 / (P_R * interference + 1)
    g_rd: np.ndarray                    # P_R |h_rd_k|^2
    relay_tx_power: float | np.ndarray


def _per_relay(x):
    # align a per-trial scalar/vector against a trailing relay axis
    return x[..., None] if np.ndim(x) > 0 else x


def link_sinrs(real: ChannelRealization, cfg: SystemConfig, relay_power,
               interference_var: float | None = None) -> LinkSinrs:
    """SINRs of the S->D, S->R_k, and R_k->D links.

    relay_power is the per-relay transmit power P_R; it scales both the
    relay-input interference floor and the relay-to-destination SNR.
    interference_var overrides var_rsi + var_iri (selection schemes, where a
    lone transmitter sees no inter-relay interference, pass var_rsi alone).
    relay_power may be per-trial (batch shape) as well as scalar.
    """
    iv = (cfg.var_rsi + cfg.var_iri) if interference_var is None else interference_var
    denom = relay_power * iv + 1.0
    g_sd = cfg.p_source * abs2(real.h_sd)
    g_sr = cfg.p_source * abs2(real.h_sr) / _per_relay(denom)
    g_rd = _per_relay(relay_power) * abs2(real.h_rd)
    return LinkSinrs(g_sd, g_sr, g_rd, relay_power)


def decode_set(sinrs: LinkSinrs, eta: float) -> tuple[int, ...]:
    """Relay indices whose S->R SINR meets the decode threshold, ascending."""
    g_sr = np.asarray(sinrs.g_sr)
    if g_sr.ndim != 1:
        raise ValueError("decode_set expects a single realization, not a batch")
    return tuple(int(k) for k in np.nonzero(g_sr >= eta)[0])


def relay_mask(dset, n_relays: int) -> np.ndarray:
    """Boolean membership mask from an index tuple or a boolean mask pass-through."""
    a = np.asarray(dset)
    if a.dtype == bool:
        return a
    mask = np.zeros(n_relays, dtype=bool)
    if a.size:
        mask[a.astype(int)] = True
    return mask
