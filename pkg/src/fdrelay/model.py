"""System configuration, validation, unit conversion, and result containers."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace

ASYNCHRONOUS = "asynchronous"
SYNCHRONOUS = "synchronous"
MI_EXACT = "exact"
MI_APPROXIMATE = "approximate"
SHARED_BUDGET = "shared_budget"
FIXED_PER_RELAY = "fixed_per_relay"

# SystemConfig fields that live on a dB scale in config files ("<name>_db")
DB_FIELDS = (
    "p_source",
    "e_relay_budget",
    "var_sd",
    "var_sr",
    "var_rd",
    "var_rsi",
    "var_iri",
)

# fields a sweep may vary; n_relays additionally re-derives default delays
SWEEPABLE_FIELDS = DB_FIELDS + ("rate", "n_relays")


def db_to_linear(x_db: float) -> float:
    """Power ratio for a dB value: 10^(x/10)."""
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    """Inverse of db_to_linear; -inf for x = 0."""
    return 10.0 * math.log10(x) if x > 0.0 else float("-inf")


def default_delays(n_relays: int, sync_mode: str) -> tuple[int, ...]:
    """Relay processing delays used when a config does not pin them.

    Asynchronous relays get staggered integer delays 1..N; synchronous relays
    share a single one-sample delay (nonzero, so the common phase ramp still
    averages out across bins).
    """
    if sync_mode == SYNCHRONOUS:
        return (1,) * n_relays
    return tuple(range(1, n_relays + 1))


@dataclass(frozen=True)
class SystemConfig:
    """Scenario description for one source, N full-duplex relays, one destination.

    Powers and variances are linear (config files may carry them in dB with a
    _db suffix, converted at ingestion).  rate is in bps/Hz, block_len and
    cp_len in channel uses, delays in channel uses per relay.
    """

    n_relays: int
    p_source: float                     # source transmit power P_S
    e_relay_budget: float               # relay power budget E_R
    rate: float                         # target spectral efficiency r
    var_sd: float = 1.0                 # source->destination channel variance
    var_sr: float = 1.0                 # source->relay channel variance (all relays)
    var_rd: float = 1.0                 # relay->destination channel variance (all relays)
    var_rsi: float = 0.0                # residual self-interference variance
    var_iri: float = 0.0                # aggregate inter-relay interference variance
    block_len: int = 500                # FFT block length T
    cp_len: int = 10                    # cyclic prefix length
    delays: tuple[int, ...] | None = None
    sync_mode: str = ASYNCHRONOUS
    mi_mode: str = MI_APPROXIMATE
    relay_power_policy: str = SHARED_BUDGET
    selection_iri: str = "off"          # include IRI in selection-scheme relay SINR

    def __post_init__(self):
        if self.delays is None:
            object.__setattr__(
                self, "delays", default_delays(self.n_relays, self.sync_mode)
            )
        else:
            object.__setattr__(self, "delays", tuple(int(d) for d in self.delays))


def validate_config(cfg: SystemConfig) -> SystemConfig:
    """Check every invariant and return cfg unchanged; raise ValueError naming
    the first violated rule."""
    if not isinstance(cfg.n_relays, int) or cfg.n_relays < 1:
        raise ValueError("n_relays must be a positive integer")
    for name in ("p_source", "e_relay_budget", "var_sd", "var_sr", "var_rd",
                 "var_rsi", "var_iri"):
        if getattr(cfg, name) < 0.0:
            raise ValueError(f"{name} must be non-negative")
    if not cfg.rate > 0.0:
        raise ValueError("rate must be positive")
    if not isinstance(cfg.block_len, int) or cfg.block_len < 1:
        raise ValueError("block_len must be a positive integer")
    if not isinstance(cfg.cp_len, int) or cfg.cp_len < 0:
        raise ValueError("cp_len must be non-negative")
    if cfg.sync_mode not in (ASYNCHRONOUS, SYNCHRONOUS):
        raise ValueError(f"unknown sync_mode {cfg.sync_mode!r}")
    if cfg.mi_mode not in (MI_EXACT, MI_APPROXIMATE):
        raise ValueError(f"unknown mi_mode {cfg.mi_mode!r}")
    if cfg.relay_power_policy not in (SHARED_BUDGET, FIXED_PER_RELAY):
        raise ValueError(f"unknown relay_power_policy {cfg.relay_power_policy!r}")
    if cfg.selection_iri not in ("off", "on"):
        raise ValueError(f"selection_iri must be 'off' or 'on', got {cfg.selection_iri!r}")
    if len(cfg.delays) != cfg.n_relays:
        raise ValueError("delays length != n_relays")
    if any(d < 0 for d in cfg.delays):
        raise ValueError("delays must be non-negative")
    if cfg.delays and max(cfg.delays) > cfg.cp_len:
        raise ValueError("cp_len < max delay")
    if cfg.sync_mode == ASYNCHRONOUS:
        residues = [d % cfg.block_len for d in cfg.delays]
        if any(r == 0 for r in residues):
            raise ValueError("delay divisible by block_len in asynchronous mode")
        if len(set(residues)) != len(residues):
            raise ValueError("duplicate delays in asynchronous mode")
    else:
        if len(set(cfg.delays)) > 1:
            raise ValueError("unequal delays in synchronous mode")
    return cfg


def apply_param(cfg: SystemConfig, name: str, value: float) -> SystemConfig:
    """Return a validated copy of cfg with one (possibly dB-suffixed) field set."""
    target = name[:-3] if name.endswith("_db") else name
    if target not in SWEEPABLE_FIELDS:
        raise ValueError(f"unknown sweep parameter {name!r}")
    if name.endswith("_db"):
        if target not in DB_FIELDS:
            raise ValueError(f"parameter {target!r} has no dB form")
        value = db_to_linear(value)
    if target == "n_relays":
        n = int(value)
        if n != value:
            raise ValueError("n_relays must be an integer")
        # default delays depend on N, so re-derive them
        out = replace(cfg, n_relays=n, delays=None)
    else:
        out = replace(cfg, **{target: float(value)})
    return validate_config(out)


def config_from_dict(doc: dict) -> SystemConfig:
    """Build a validated SystemConfig from a parsed JSON document.

    Power/variance fields may appear either linear under their own name or in
    dB under "<name>_db"; giving both forms of one field is an error, as is
    any unknown key.
    """
    known = {f.name for f in fields(SystemConfig)}
    kwargs: dict = {}
    for key, raw in doc.items():
        if key == "sweep":
            continue  # sweep block is read by the CLI, not the config
        if key.endswith("_db") and key[:-3] in DB_FIELDS:
            name, value = key[:-3], db_to_linear(float(raw))
        elif key in known:
            name, value = key, raw
        else:
            raise ValueError(f"unknown config field {key!r}")
        if name in kwargs:
            raise ValueError(f"config field {name!r} given twice (linear and dB)")
        kwargs[name] = value
    if "delays" in kwargs and kwargs["delays"] is not None:
        kwargs["delays"] = tuple(int(d) for d in kwargs["delays"])
    for name in ("n_relays", "block_len", "cp_len"):
        if name in kwargs:
            kwargs[name] = int(kwargs[name])
    for name in DB_FIELDS + ("rate",):
        if name in kwargs:
            kwargs[name] = float(kwargs[name])
    return validate_config(SystemConfig(**kwargs))


@dataclass(frozen=True)
class OutageEstimate:
    """Monte-Carlo outage estimate with its binomial standard error."""

    outage_count: int
    trials: int
    p_hat: float
    stderr: float

    @classmethod
    def from_counts(cls, outage_count: int, trials: int) -> "OutageEstimate":
        if trials < 1:
            raise ValueError("trials must be positive")
        if not 0 <= outage_count <= trials:
            raise ValueError("outage_count must lie in [0, trials]")
        p = outage_count / trials
        return cls(outage_count, trials, p, math.sqrt(p * (1.0 - p) / trials))


@dataclass(frozen=True)
class SweepSpec:
    """One-parameter sweep request: base scenario, swept field, values, schemes."""

    base: SystemConfig
    param: str                          # SystemConfig field, optionally _db suffixed
    values: tuple[float, ...]
    schemes: tuple[str, ...] = ("multi", "os", "ps")
    trials: int = 100_000
    seed: int = 0


@dataclass(frozen=True)
class SweepRow:
    """One (value, scheme) result; analytic_p is filled for multi only."""

    param: float                        # swept value, linear scale
    param_db: float
    scheme: str
    mode: str                           # async | sync
    analytic_p: float | None
    estimate: OutageEstimate


@dataclass(frozen=True)
class SweepResult:
    spec: SweepSpec
    rows: tuple[SweepRow, ...]
