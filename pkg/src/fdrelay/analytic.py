"""Closed-form outage probabilities for the multi-relay scheme."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .model import FIXED_PER_RELAY, SYNCHRONOUS, SystemConfig
from .sfun import regularized_lower_gamma_int

# relative scale gap below which the two-scale combiner falls back to the
# equal-scale (Erlang) limit to dodge catastrophic cancellation
EQUAL_SCALE_RTOL = 1e-9

# tolerated rounding spill outside [0, 1] before the clamp warns
CLAMP_SLACK = 1e-9

ENUMERATION_MAX_RELAYS = 20

BINOMIAL = "binomial"
ENUMERATION = "enumeration"


def eta(rate: float, block_len: int, cp_len: int) -> float:
    """Decode threshold: SINR below which a block cannot carry rate bps/Hz.

    The cyclic prefix consumes cp_len of every block_len+cp_len channel uses,
    hence eta = 2^(rate*(T+cp)/T) - 1.
    """
    return 2.0 ** (rate * (block_len + cp_len) / block_len) - 1.0


def _exp_outage(gbar: float, e: float) -> float:
    # P(Exp(gbar) < e); a dead link (gbar = 0) is always in outage for e > 0
    if e <= 0.0:
        return 0.0
    if gbar <= 0.0:
        return 1.0
    return -math.expm1(-e / gbar)


@dataclass(frozen=True)
class LinkOutageProbs:
    """Per-link outage probabilities with the threshold and mean SNRs used."""

    p_sd: float
    p_sr: float
    eta: float
    gbar_sd: float
    gbar_rd: float
    gbar_syn: float


def decode_stage_power(cfg: SystemConfig) -> float:
    """Relay power assumed when testing S->R decodability.

    Under the shared budget the decode-set size is not known before the test,
    so the interference floor uses the full-participation share E_R/N; the
    fixed policy uses E_R outright.
    """
    if cfg.relay_power_policy == FIXED_PER_RELAY:
        return cfg.e_relay_budget
    return cfg.e_relay_budget / cfg.n_relays


def relay_tx_power(cfg: SystemConfig, n_decoding: int) -> float:
    """Per-relay transmit power once n_decoding relays forward."""
    if cfg.relay_power_policy == FIXED_PER_RELAY:
        return cfg.e_relay_budget
    return cfg.e_relay_budget / max(n_decoding, 1)


def link_outages(cfg: SystemConfig, relay_power: float) -> LinkOutageProbs:
    """Rayleigh link outages at threshold eta under a given relay power.

    p_sr folds the relay-input interference floor P_R*(var_rsi+var_iri)+1
    into the mean S->R SNR; all relays share it by symmetry.
    """
    e = eta(cfg.rate, cfg.block_len, cfg.cp_len)
    gbar_sd = cfg.p_source * cfg.var_sd
    denom = relay_power * (cfg.var_rsi + cfg.var_iri) + 1.0
    gbar_sr = cfg.p_source * cfg.var_sr / denom
    return LinkOutageProbs(
        p_sd=_exp_outage(gbar_sd, e),
        p_sr=_exp_outage(gbar_sr, e),
        eta=e,
        gbar_sd=gbar_sd,
        gbar_rd=relay_power * cfg.var_rd,
        gbar_syn=relay_power * cfg.n_relays * cfg.var_rd,
    )


def _clamped(p: float, what: str) -> float:
    if p < -CLAMP_SLACK or p > 1.0 + CLAMP_SLACK:
        warnings.warn(f"{what} = {p!r} left [0, 1] beyond rounding slack; clamping",
                      RuntimeWarning, stacklevel=3)
    return min(1.0, max(0.0, p))


def _mrc_mix_outage(n_sum: int, gbar_sd: float, gbar_rd: float, e: float) -> float:
    """P(X + sum of n_sum i.i.d. Y < e), X ~ Exp(gbar_sd), Y ~ Exp(gbar_rd).

    Two-scale closed form; the gbar_rd > gbar_sd branch runs the incomplete
    gamma at a negative argument, which the series continuation covers.  Near
    equal scales the expression cancels badly, so it falls back to the exact
    Erlang limit of n_sum+1 equal exponentials.
    """
    if e <= 0.0:
        return 0.0
    if gbar_rd <= 0.0:
        return _exp_outage(gbar_sd, e)
    if gbar_sd <= 0.0:
        return _clamped(regularized_lower_gamma_int(n_sum, e / gbar_rd), "erlang outage")
    if abs(gbar_sd - gbar_rd) <= EQUAL_SCALE_RTOL * gbar_sd:
        return _clamped(regularized_lower_gamma_int(n_sum + 1, e / gbar_sd),
                        "equal-scale outage")
    term1 = regularized_lower_gamma_int(n_sum, e / gbar_rd)
    ratio = gbar_sd / (gbar_sd - gbar_rd)
    x2 = e * (gbar_sd - gbar_rd) / (gbar_rd * gbar_sd)
    term2 = math.exp(-e / gbar_sd) * ratio ** n_sum * regularized_lower_gamma_int(n_sum, x2)
    return _clamped(term1 - term2, "combined outage")


def p_cond_async(n_decoding: int, cfg: SystemConfig) -> float:
    """Destination outage given n_decoding relays forward, asynchronous mode.

    The destination adds the direct SNR and the n_decoding independent relay
    SNRs, each exponential with mean relay_tx_power*var_rd.
    """
    if n_decoding < 1:
        raise ValueError("n_decoding must be at least 1")
    e = eta(cfg.rate, cfg.block_len, cfg.cp_len)
    gbar_rd = relay_tx_power(cfg, n_decoding) * cfg.var_rd
    return _mrc_mix_outage(n_decoding, cfg.p_source * cfg.var_sd, gbar_rd, e)


def p_cond_sync(n_decoding: int, cfg: SystemConfig) -> float:
    """Destination outage given n_decoding relays forward, synchronous mode.

    Equal delays make the relay amplitudes add coherently into one equivalent
    Rayleigh branch of mean relay_tx_power*n_decoding*var_rd, so under the
    shared budget the result does not depend on n_decoding at all.
    """
    if n_decoding < 1:
        raise ValueError("n_decoding must be at least 1")
    e = eta(cfg.rate, cfg.block_len, cfg.cp_len)
    gbar_syn = relay_tx_power(cfg, n_decoding) * n_decoding * cfg.var_rd
    return _mrc_mix_outage(1, cfg.p_source * cfg.var_sd, gbar_syn, e)


def combine_outage(p_sd: float, p_sr: float, p_cond_by_size,
                   method: str = BINOMIAL) -> float:
    """Total outage from link outages and per-size conditional outages.

    p_cond_by_size[L-1] is the destination outage given L forwarding relays.
    The binomial form collapses the i.i.d. subset sum; enumeration walks all
    2^N subsets literally and exists as a cross-check.
    """
    n = len(p_cond_by_size)
    if method == BINOMIAL:
        total = p_sd * p_sr ** n
        for size in range(1, n + 1):
            w = math.comb(n, size) * (1.0 - p_sr) ** size * p_sr ** (n - size)
            total += w * p_cond_by_size[size - 1]
    elif method == ENUMERATION:
        if n > ENUMERATION_MAX_RELAYS:
            raise ValueError(f"enumeration supports at most {ENUMERATION_MAX_RELAYS} relays")
        total = 0.0
        for bits in range(1 << n):
            prob = 1.0
            size = 0
            for k in range(n):
                if bits >> k & 1:
                    prob *= 1.0 - p_sr
                    size += 1
                else:
                    prob *= p_sr
            total += prob * (p_sd if size == 0 else p_cond_by_size[size - 1])
    else:
        raise ValueError(f"unknown combination method {method!r}")
    return _clamped(total, "total outage")


def total_outage(cfg: SystemConfig, mode: str | None = None,
                 method: str = BINOMIAL) -> float:
    """Closed-form outage of the multi-relay scheme.

    mode defaults to cfg.sync_mode; method picks the subset-sum collapse
    (binomial) or the literal enumeration cross-check.  The destination is
    modelled by the aggregate-SINR rate; simulation with exact per-bin rates
    sits slightly above this curve.
    """
    mode = cfg.sync_mode if mode is None else mode
    links = link_outages(cfg, decode_stage_power(cfg))
    cond = p_cond_sync if mode == SYNCHRONOUS else p_cond_async
    p_by_size = [cond(size, cfg) for size in range(1, cfg.n_relays + 1)]
    return combine_outage(links.p_sd, links.p_sr, p_by_size, method)
