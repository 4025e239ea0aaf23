"""Single-stock market models.

All three drivers share the same day loop: seed the return history with
`warmup` days of independent trading, then let feedback rules set the
trading probabilities and the cluster structure day by day.

Model A: asymmetric trading and asymmetric herding in bull/bear markets.
Model B: model A plus a buy/sell split driven by perceived volatility.
Model D: trading probabilities driven by a two-state information force.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError
from .config import ModelConfig
from .machinery import (
    SimOutput,
    horizon_weights,
    independent_day_return,
    round_count,
    sample_aggregate_return,
)


def _trade_probability(rprime: float, p: float, alpha: float, beta: float) -> float:
    """Total trading probability for the next day given the weighted return."""
    if rprime > 0.0:
        return 2.0 * p * alpha
    if rprime < 0.0:
        return 2.0 * p * beta
    return 2.0 * p


def perceived_volatility(volatilities, gamma) -> float:
    """Aggregate perception xi of the recent volatility.

    `volatilities` holds the last M daily volatilities in chronological
    order.  An agent with horizon i compares the mean volatility of the
    last i days with the full-window background v_M; xi is the
    gamma-weighted aggregate, 1.0 when the window is flat or empty.
    """
    v = np.asarray(volatilities, dtype=float)
    m = len(gamma)
    if len(v) != m:
        raise ConfigError(f"need exactly {m} volatilities, got {len(v)}")
    means = np.cumsum(v[::-1]) / np.arange(1, m + 1)
    v_m = means[-1]
    if v_m <= 0.0:
        return 1.0
    return float(np.dot(gamma, means) / v_m)


def _run_herding_model(config: ModelConfig, model: str) -> SimOutput:
    """Common driver for models A and B."""
    config.validate_for(model)
    rng = np.random.default_rng(config.seed)
    n_agents = config.N
    m = config.M
    k = config.k_for(model)
    warmup = config.warmup_days
    t_max = config.t_max
    alpha, beta = config.alpha, config.beta
    with_preference = model == "b"

    weights = horizon_weights(m)
    w_rev = weights.tail_sums()[::-1].copy()
    gamma = weights.gamma

    history = np.zeros(t_max, dtype=float)
    kept = t_max - warmup
    trade_prob = np.empty(kept)
    herding = np.empty(kept)
    cluster_count = np.empty(kept, dtype=np.int64)
    xi_trace = np.empty(kept) if with_preference else None

    for t in range(warmup):
        history[t] = independent_day_return(n_agents, config.p, config.p, rng)

    for t in range(warmup, t_max):
        rprime = k * float(np.dot(w_rev, history[t - m : t]))
        p_trade = _trade_probability(rprime, config.p, alpha, beta)

        if with_preference:
            xi = perceived_volatility(np.abs(history[t - m : t]), gamma)
            split = min(max(0.5 * (config.c * xi + (1.0 - config.c)), 0.0), 1.0)
        else:
            split = 0.5
        p_buy = p_trade * split
        p_sell = p_trade - p_buy

        avg_size = min(max(abs(rprime - config.delta_R), 1.0), float(n_agents))
        n_clusters = max(1, round_count(n_agents / avg_size))
        history[t] = sample_aggregate_return(
            n_agents, n_clusters, p_buy, p_sell, rng
        )

        i = t - warmup
        trade_prob[i] = p_trade
        herding[i] = avg_size / n_agents
        cluster_count[i] = n_clusters
        if with_preference:
            xi_trace[i] = xi

    diagnostics = {
        "P_trade": trade_prob,
        "D": herding,
        "clusters": cluster_count.astype(float),
    }
    if with_preference:
        diagnostics["xi"] = xi_trace
    return SimOutput(
        model=model,
        config=config,
        seed=config.seed,
        returns=history[warmup:].astype(np.int64),
        diagnostics=diagnostics,
    )


def run_model_a(config: ModelConfig) -> SimOutput:
    """Asymmetric trading and herding in bull and bear markets.

    After the weighted return R', the next day trades with probability
    2p*alpha (bull), 2p (flat) or 2p*beta (bear), and clusters have average
    size |R' - delta_R| clamped into [1, N].  Each cluster buys or sells as
    one block with equal probabilities P_trade/2.
    """
    return _run_herding_model(config, "a")


def run_model_b(config: ModelConfig) -> SimOutput:
    """Model A plus an asymmetric trading preference in volatile markets.

    Agents compare their horizon-average volatility with the longest-horizon
    background; the aggregated perception xi shifts the buy/sell split to
    p_buy = P_trade * (c*xi + (1-c))/2 while the total stays at P_trade.
    With the default (alpha, delta_R) = (1, 0) this is exactly
    p_buy = p*(c*xi + 1 - c) and p_sell = 2p - p_buy.
    """
    return _run_herding_model(config, "b")


def run_model_d(config: ModelConfig) -> SimOutput:
    """Market driven by a two-state information force.

    A market state S flips with probability 1/tau per day.  A dominating
    fraction f of agents (resampled daily) carries the state s_i = S, the
    rest s_i = 1 - S.  Agents with s_i = 1 feel a shared force
    y * (1 - a * sgn(R')) with y exponential of rate b1; the force is
    stronger after bearish weighted returns.  Their trading probability is
    scaled by (1 + force) and they trade in clusters of average size
    tau * sum(F_i) / N; zero-force agents trade independently at the base
    rate P0 = 2p / (1 + 1/(2*b1)), which keeps the time average of the
    per-agent trading probability at 2p.
    """
    config.validate_for("d")
    rng = np.random.default_rng(config.seed)
    n_agents = config.N
    m = config.M
    k = config.k_for("d")
    warmup = config.warmup_days
    t_max = config.t_max

    w_rev = horizon_weights(m).tail_sums()[::-1].copy()
    mean_force = 1.0 / (2.0 * config.b1)
    p0 = 2.0 * config.p / (1.0 + mean_force)
    flip_prob = 1.0 / config.tau
    n_dominating = round_count(config.f * n_agents)

    history = np.zeros(t_max, dtype=float)
    kept = t_max - warmup
    state_trace = np.empty(kept, dtype=np.int64)
    force_trace = np.empty(kept)
    size_trace = np.empty(kept)

    for t in range(warmup):
        history[t] = independent_day_return(n_agents, config.p, config.p, rng)

    state = int(rng.integers(0, 2))
    for t in range(warmup, t_max):
        rprime = k * float(np.dot(w_rev, history[t - m : t]))
        if rng.random() < flip_prob:
            state = 1 - state
        n_pos = n_dominating if state == 1 else n_agents - n_dominating
        y = rng.exponential(1.0 / config.b1)
        force = y * (1.0 - config.a * np.sign(rprime))
        p_active = min((1.0 + force) * p0, 1.0)

        r = 0
        if n_pos > 0:
            avg_size = min(max(config.tau * n_pos * force / n_agents, 1.0),
                           float(n_pos))
            n_clusters = max(1, round_count(n_pos / avg_size))
            r += sample_aggregate_return(
                n_pos, n_clusters, p_active / 2.0, p_active / 2.0, rng
            )
        else:
            avg_size = 0.0
        if n_pos < n_agents:
            r += independent_day_return(
                n_agents - n_pos, p0 / 2.0, p0 / 2.0, rng
            )
        history[t] = r

        i = t - warmup
        state_trace[i] = state
        force_trace[i] = force
        size_trace[i] = avg_size

    return SimOutput(
        model="d",
        config=config,
        seed=config.seed,
        returns=history[warmup:].astype(np.int64),
        diagnostics={
            "S": state_trace.astype(float),
            "F": force_trace,
            "cluster_size": size_trace,
        },
    )
