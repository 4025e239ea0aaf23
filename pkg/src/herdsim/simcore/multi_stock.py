"""Multi-stock market model with herding at stock, sector and market level.

Agents hold one stock each.  Every day they cluster in three stages:
I-groups inside each stock (driven by the stock's own weighted return),
S-groups inside each sector (driven by the sector's excess co-movement
H_j - H_M) and M-groups across the market (driven by H_M).  Each M-group
then buys or sells as a single block.
"""

from __future__ import annotations

import numpy as np

from .config import ModelConfig
from .machinery import SimOutput, horizon_weights, round_count


def mgroup_slots(sgroup_count: int, n_stocks: int, h_m: float) -> int:
    """Market-level slots of one sector: max(1, round(N_S / (n * H_M))).

    Weakly decreasing in h_m for a frozen sector-level state, so a higher
    market co-movement degree never increases the M-group count.
    """
    return max(1, round_count(sgroup_count / (n_stocks * h_m)))


def _spread_sample(count: int, pool: int, rng: np.random.Generator) -> np.ndarray:
    """Draw `count` targets from range(pool), avoiding repeats while possible.

    Used for groups of a common origin (same stock, same sector) that tend
    not to rejoin each other at the next level: targets are sampled without
    replacement until the pool is exhausted, then uniformly.
    """
    if count <= pool:
        return rng.permutation(pool)[:count]
    extra = rng.integers(0, pool, size=count - pool)
    return np.concatenate([rng.permutation(pool), extra])


def run_model_c(config: ModelConfig) -> SimOutput:
    """Simulate per-stock returns under three-level herding.

    Group counts per day and stock/sector:
      I-groups of stock k:  max(1, round(N_k / clamp(|R'_k|, 1, N_k)))
      S-groups of sector j: max(1, round(N_j_I / (n * (H_j - H_M))))
      M-group slots of j:   max(1, round(N_j_S / (n * H_M)))
    The market holds max_j slots_j M-groups; sector j's S-groups join only
    the first slots_j of them.  Each M-group buys with P_group, sells with
    P_group, holds otherwise, and all member agents follow.
    """
    config.validate_for("c")
    rng = np.random.default_rng(config.seed)
    n_agents = config.N
    n_stocks = config.n
    n_sectors = config.n_sec
    per_sector = n_stocks // n_sectors
    p_group = float(config.P_group)
    h_m = float(config.H_M)
    h_excess = np.asarray(config.H_j, dtype=float) - h_m
    m = config.M
    k = config.k_for("c")
    warmup = config.warmup_days
    t_max = config.t_max

    # Agents pick their stock uniformly at random, once.
    agents_per_stock = rng.multinomial(
        n_agents, np.full(n_stocks, 1.0 / n_stocks)
    )
    sector_of_stock = np.repeat(np.arange(n_sectors), per_sector)

    w_rev = horizon_weights(m).tail_sums()[::-1].copy()
    history = np.zeros((t_max, n_stocks), dtype=float)
    hold = 1.0 - 2.0 * p_group

    kept = t_max - warmup
    mgroup_trace = np.empty(kept, dtype=np.int64)
    igroup_trace = np.empty(kept)

    # Bootstrap: every agent trades on its own at the group probability.
    for t in range(warmup):
        for s in range(n_stocks):
            buys, sells, _ = rng.multinomial(
                agents_per_stock[s], (p_group, p_group, hold)
            )
            history[t, s] = buys - sells

    # an unheld stock (possible at small N) degenerates to one empty group
    holders = np.maximum(agents_per_stock, 1).astype(float)
    for t in range(warmup, t_max):
        rprime = k * (w_rev @ history[t - m : t, :])
        avg_i = np.minimum(np.maximum(np.abs(rprime), 1.0), holders)
        igroups = np.maximum(
            1, np.floor(agents_per_stock / avg_i + 0.5).astype(np.int64)
        )

        sgroups = np.empty(n_sectors, dtype=np.int64)
        slots = np.empty(n_sectors, dtype=np.int64)
        for j in range(n_sectors):
            stocks_j = slice(j * per_sector, (j + 1) * per_sector)
            n_i = int(igroups[stocks_j].sum())
            sgroups[j] = max(1, round_count(n_i / (n_stocks * h_excess[j])))
            slots[j] = mgroup_slots(int(sgroups[j]), n_stocks, h_m)
        total_m = int(slots.max())

        u = rng.random(total_m)
        phi_m = np.zeros(total_m, dtype=np.int64)
        phi_m[u < p_group] = 1
        phi_m[(u >= p_group) & (u < 2.0 * p_group)] = -1

        for j in range(n_sectors):
            s_to_m = _spread_sample(int(sgroups[j]), int(slots[j]), rng)
            for s in range(j * per_sector, (j + 1) * per_sector):
                g = int(igroups[s])
                sizes = rng.multinomial(
                    agents_per_stock[s], np.full(g, 1.0 / g)
                )
                i_to_s = _spread_sample(g, int(sgroups[j]), rng)
                history[t, s] = sizes @ phi_m[s_to_m[i_to_s]]

        i = t - warmup
        mgroup_trace[i] = total_m
        igroup_trace[i] = igroups.mean()

    tickers = tuple(f"S{s + 1:03d}" for s in range(n_stocks))
    sector_of = {
        tickers[s]: str(sector_of_stock[s] + 1) for s in range(n_stocks)
    }
    return SimOutput(
        model="c",
        config=config,
        seed=config.seed,
        returns=history[warmup:].astype(np.int64),
        diagnostics={
            "M_groups": mgroup_trace.astype(float),
            "mean_I_groups": igroup_trace,
        },
        tickers=tickers,
        sector_of=sector_of,
    )
