"""Estimation of model parameters from market and attention data.

Covers the trading asymmetry alpha, the herding shift delta_r and its
integer counterpart delta_R, the co-movement degrees H_M and H_j, and the
information pipeline: binary attention states, windowed driving forces,
their bull/bear asymmetry and the correlating time of attention data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    FitDomainError,
    InsufficientDataError,
    ValidationError,
)
from .ingest import ReturnsPanel, SearchSeries
from .stats import CorrelationCurve, fit_power_law, normalize
from .simcore import horizon_weights

#: Published (delta_r, delta_R) anchors for six major index families, used
#: to freeze the linear relation between the two shift scales.
REFERENCE_SHIFT_PAIRS = (
    (0.067, 3),
    (-0.043, -2),
    (0.039, 2),
    (0.028, 2),
    (0.032, 2),
    (0.013, 1),
)


def round_half_away(x: float) -> int:
    return int(math.floor(x + 0.5)) if x >= 0 else int(math.ceil(x - 0.5))


@dataclass(frozen=True)
class AsymmetryEstimate:
    """Trading and herding asymmetry of one index.

    beta is stored as 2 - alpha exactly; delta_r and delta_R stay None
    when only the volume side has been estimated.
    """

    alpha: float
    beta: float
    volume_ratio: float
    delta_r: float | None = None
    delta_R: int | None = None


@dataclass(frozen=True)
class ComovementEstimate:
    H_M: float
    H_j: dict[str, float]


@dataclass(frozen=True)
class InfoForceSeries:
    """Attention states and windowed driving forces of one ticker."""

    ticker: str
    states: np.ndarray
    window_starts: np.ndarray
    forces: np.ndarray
    tau: int
    skipped: int = 0


@dataclass(frozen=True)
class CorrelatingTime:
    tau: int
    deviation_found: bool


def _weighted_return_signs(returns: np.ndarray, m: int, k: float) -> np.ndarray:
    """sign(R'(t)) for every day t >= m - 1, computed over m-day windows."""
    w_rev = horizon_weights(m).tail_sums()[::-1]
    rprime = np.convolve(returns, w_rev[::-1], mode="valid") * k
    return np.sign(rprime)


def trading_asymmetry(returns, m: int = 150, k: float = 1.0) -> AsymmetryEstimate:
    """Estimate alpha from volumes following bull and bear weighted returns.

    With the trading probability proportional to volume, the bull/bear
    volume ratio rho = V+/V- equals alpha/beta, and alpha + beta = 2 gives
    alpha = 2 rho / (1 + rho).
    """
    volume = getattr(returns, "volume", None)
    if volume is None:
        raise ValidationError("trading_asymmetry needs volumes")
    r = np.asarray(returns.returns, dtype=float)
    volume = np.asarray(volume, dtype=float)
    if len(r) < m + 1:
        raise InsufficientDataError(
            f"need more than {m} days of returns, got {len(r)}"
        )
    signs = _weighted_return_signs(r, m, k)
    # signs[i] corresponds to day t = m - 1 + i; it classifies volume[t + 1].
    next_vol = volume[m:]
    signs = signs[: len(next_vol)]
    bull = next_vol[signs > 0]
    bear = next_vol[signs < 0]
    if len(bull) == 0 or len(bear) == 0:
        raise InsufficientDataError("no bull or no bear days in the sample")
    ratio = float(bull.mean() / bear.mean())
    alpha = 2.0 * ratio / (1.0 + ratio)
    return AsymmetryEstimate(alpha=alpha, beta=2.0 - alpha, volume_ratio=ratio)


def herding_shift(normalized, volumes=None) -> float:
    """Volume-weighted herding-degree shift between bear and bull days.

    d_bull is the volume-weighted mean of r over positive days, d_bear the
    same over |r| on negative days; the shift is (d_bear - d_bull) / 2.
    """
    if volumes is None:
        volumes = getattr(normalized, "volume", None)
    if volumes is None:
        raise ValidationError("herding_shift needs volumes")
    r = np.asarray(
        normalized.values if hasattr(normalized, "values") else normalized,
        dtype=float,
    )
    v = np.asarray(volumes, dtype=float)
    if len(v) != len(r):
        raise ValidationError("returns and volumes have different lengths")
    bull = r > 0.0
    bear = r < 0.0
    if not bull.any() or not bear.any():
        raise InsufficientDataError("series is one-sided")
    w_bull = v[bull].sum()
    w_bear = v[bear].sum()
    if w_bull == 0.0 or w_bear == 0.0:
        raise InsufficientDataError("zero total volume on one side")
    d_bull = float((v[bull] * r[bull]).sum() / w_bull)
    d_bear = float((v[bear] * np.abs(r[bear])).sum() / w_bear)
    return (d_bear - d_bull) / 2.0


def shift_relation(pairs=REFERENCE_SHIFT_PAIRS) -> tuple[float, float]:
    """Least-squares line delta_R = slope * delta_r + intercept.

    A pure through-origin slope cannot reproduce the integer delta_R of
    all six reference indices (no single slope lands every row in the
    right rounding bin), so the frozen relation keeps the intercept.
    """
    if not pairs:
        raise ValidationError("empty calibration table")
    x = np.array([p[0] for p in pairs], dtype=float)
    y = np.array([p[1] for p in pairs], dtype=float)
    if len(pairs) == 1:
        if x[0] == 0.0:
            raise FitDomainError("single pair at delta_r = 0")
        return float(y[0] / x[0]), 0.0
    x_mean = x.mean()
    y_mean = y.mean()
    sxx = float(((x - x_mean) ** 2).sum())
    if sxx == 0.0:
        raise FitDomainError("degenerate calibration table")
    slope = float(((x - x_mean) * (y - y_mean)).sum() / sxx)
    return slope, float(y_mean - slope * x_mean)


def herding_offset_from_shift(delta_r: float, pairs=REFERENCE_SHIFT_PAIRS) -> int:
    """Map a return-scale shift to the integer herding offset delta_R."""
    slope, intercept = shift_relation(pairs)
    return round_half_away(slope * delta_r + intercept)


def asymmetry_report(index_series, m: int = 150, k: float = 1.0) -> AsymmetryEstimate:
    """Full asymmetry calibration of one index: alpha, delta_r and delta_R."""
    from .ingest import log_returns

    returns = log_returns(index_series)
    est = trading_asymmetry(returns, m=m, k=k)
    shift = herding_shift(normalize(returns), returns.volume)
    return AsymmetryEstimate(
        alpha=est.alpha,
        beta=est.beta,
        volume_ratio=est.volume_ratio,
        delta_r=shift,
        delta_R=herding_offset_from_shift(shift),
    )


def _trend_stats(r: np.ndarray) -> tuple[float, float]:
    """Per-day (dominance fraction, amplitude gap) of one stock group.

    r holds one day of normalized returns.  Days where nothing moves
    contribute zeros.
    """
    n_s = len(r)
    up = r > 0.0
    down = r < 0.0
    v_plus = float((r[up] ** 2).sum() / n_s)
    v_minus = float((r[down] ** 2).sum() / n_s)
    if v_plus == 0.0 and v_minus == 0.0:
        return 0.0, 0.0
    if v_plus >= v_minus:
        return up.sum() / n_s, v_plus - v_minus
    return down.sum() / n_s, v_minus - v_plus


def comovement(panel: ReturnsPanel) -> ComovementEstimate:
    """Co-movement degrees H = <zeta> * <v_d - v_n>, market-wide and per sector.

    zeta is the fraction of stocks in the dominating trend of the day and
    v_d - v_n the amplitude gap between the dominating and the other trend.
    Columns are normalized before grouping.
    """
    normalized = np.column_stack(
        [normalize(panel.matrix[:, i]).values for i in range(len(panel.tickers))]
    )
    sector_ids = sorted(set(panel.sectors))
    sector_cols = {
        sid: [i for i, s in enumerate(panel.sectors) if s == sid]
        for sid in sector_ids
    }
    for sid, cols in sector_cols.items():
        if len(cols) < 2:
            raise ValidationError(f"sector {sid!r} has fewer than 2 stocks")

    def h_of(cols) -> float:
        zetas = np.empty(normalized.shape[0])
        gaps = np.empty(normalized.shape[0])
        sub = normalized[:, cols]
        for day in range(sub.shape[0]):
            zetas[day], gaps[day] = _trend_stats(sub[day])
        return float(zetas.mean() * gaps.mean())

    h_m = h_of(list(range(normalized.shape[1])))
    h_j = {sid: h_of(cols) for sid, cols in sector_cols.items()}
    return ComovementEstimate(H_M=h_m, H_j=h_j)


def info_states(search) -> np.ndarray:
    """Binary attention states: 1 where the volume exceeds its mean."""
    volume = np.asarray(
        search.volume if isinstance(search, SearchSeries) else search,
        dtype=float,
    )
    if len(volume) < 2:
        raise InsufficientDataError("need at least 2 weeks")
    return (volume > volume.mean()).astype(np.int8)


def info_driving_force(states, volumes, tau: int, ticker: str = "") -> InfoForceSeries:
    """Windowed driving forces F = V1/V0 - 1 from states and trade volumes.

    For each window start t the trade volumes inside [t, t + tau) are
    averaged separately over high-attention and low-attention weeks; a
    window missing either state, or with a zero low-attention average,
    is skipped.
    """
    s = np.asarray(states, dtype=np.int8)
    v = np.asarray(volumes, dtype=float)
    if len(s) != len(v):
        raise ValidationError("states and volumes have different lengths")
    if tau < 2:
        raise ValidationError(f"tau must be >= 2, got {tau}")
    if len(s) < tau:
        raise InsufficientDataError(
            f"series of length {len(s)} shorter than tau={tau}"
        )
    starts = []
    forces = []
    skipped = 0
    for t in range(len(s) - tau + 1):
        window_s = s[t : t + tau]
        window_v = v[t : t + tau]
        high = window_v[window_s == 1]
        low = window_v[window_s == 0]
        if len(high) == 0 or len(low) == 0:
            skipped += 1
            continue
        v0 = low.mean()
        if v0 == 0.0:
            skipped += 1
            continue
        starts.append(t)
        forces.append(high.mean() / v0 - 1.0)
    return InfoForceSeries(
        ticker=ticker,
        states=s,
        window_starts=np.asarray(starts, dtype=np.int64),
        forces=np.asarray(forces, dtype=float),
        tau=tau,
        skipped=skipped,
    )


def info_force_asymmetry(force_series, market_returns) -> float:
    """Relative bear-bull gap of the driving forces:

        delta_F = (mean F over bear windows - mean F over bull) / mean F.

    A window is bull (bear) when the cumulative market return over it is
    positive (negative); flat windows, and windows with missing market
    data (NaN entries), stay unlabeled.
    """
    if isinstance(force_series, InfoForceSeries):
        force_series = [force_series]
    market = np.asarray(market_returns, dtype=float)
    bull_forces = []
    bear_forces = []
    all_forces = []
    for series in force_series:
        if len(market) < series.tau:
            raise ValidationError("market return series shorter than tau")
        for start, force in zip(series.window_starts, series.forces):
            all_forces.append(force)
            if start + series.tau > len(market):
                continue
            window = market[start : start + series.tau]
            if np.any(np.isnan(window)):
                continue
            total = window.sum()
            if total > 0.0:
                bull_forces.append(force)
            elif total < 0.0:
                bear_forces.append(force)
    if not bull_forces or not bear_forces:
        raise InsufficientDataError("no bull or no bear windows")
    overall = float(np.mean(all_forces))
    if overall == 0.0:
        raise FitDomainError("zero overall mean force")
    return float((np.mean(bear_forces) - np.mean(bull_forces)) / overall)


def correlating_time(
    curve: CorrelationCurve,
    deviation_factor: float = 0.5,
    persistence: int = 3,
    fallback: int = 26,
) -> CorrelatingTime:
    """Lag where a correlation curve leaves its early power-law decay.

    A power law is fitted on lags 1..10; tau is the first lag opening a
    run of `persistence` consecutive lags whose relative deviation from
    the fit exceeds `deviation_factor`.  Without such a run the fallback
    value is returned with the flag unset.
    """
    if len(curve.lags) < 30:
        raise InsufficientDataError(
            f"curve has {len(curve.lags)} lags; need at least 30"
        )
    head = curve.lags <= 10
    if np.any(curve.values[head] <= 0.0):
        raise FitDomainError("non-positive early-lag values")
    fit = fit_power_law(curve.lags[head], curve.values[head])
    predicted = fit.params["amplitude"] * np.asarray(curve.lags, float) ** (
        fit.params["exponent"]
    )
    deviates = np.abs(curve.values - predicted) / np.abs(predicted) > deviation_factor
    run = 0
    for i, flag in enumerate(deviates):
        run = run + 1 if flag else 0
        if run >= persistence:
            return CorrelatingTime(
                tau=int(curve.lags[i - persistence + 1]), deviation_found=True
            )
    return CorrelatingTime(tau=fallback, deviation_found=False)
