"""
实验汇总

每个 N 的收敛率、误差分位数与速率诊断 r(N) = 中位误差 · √(N / log N)
"""

import math
from dataclasses import dataclass
from typing import Dict, Iterable, List

import pandas as pd

from src.core.exceptions import InsufficientDataError

# max r / min r 的容许倍数
RATE_RATIO_LIMIT = 2.0


def records_frame(records: Iterable) -> pd.DataFrame:
    """TrialRecord 序列或字典序列转为 DataFrame"""
    rows = [r.to_row() if hasattr(r, "to_row") else dict(r) for r in records]
    frame = pd.DataFrame(rows)
    if not frame.empty:
        frame["converged"] = frame["converged"].astype(str).str.lower().isin(["true", "1"])
    return frame


def rate_scale(n: int) -> float:
    """√(log N / N)"""
    return math.sqrt(math.log(n) / n)


def summarize_trials(records: Iterable) -> Dict[str, dict]:
    """
    按 N 汇总; 未收敛的试验计入收敛率, 不计入误差统计
    """
    frame = records_frame(records)
    summary: Dict[str, dict] = {}
    if frame.empty:
        return summary
    for n, group in frame.groupby("n", sort=True):
        ok = group[group["converged"]]
        entry = {
            "n_trials": int(len(group)),
            "n_converged": int(len(ok)),
            "convergence_rate": float(len(ok) / len(group)),
        }
        if len(ok):
            errors = ok["error_sup"]
            median = float(errors.median())
            entry.update({
                "median_error_sup": median,
                "q1_error_sup": float(errors.quantile(0.25)),
                "q3_error_sup": float(errors.quantile(0.75)),
                "median_error_degrees": float(ok["error_degrees"].median()),
                "median_error_brokerage": float(ok["error_brokerage"].median()),
                "rate_diagnostic": median / rate_scale(int(n)),
            })
        summary[str(int(n))] = entry
    return summary


@dataclass
class RateTable:
    rows: List[dict]
    ratio: float
    rate_ok: bool

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows, columns=["n", "median_error", "r"])

    def to_dict(self) -> dict:
        return {"rows": self.rows, "ratio": self.ratio, "rate_ok": self.rate_ok}


def summarize_rate(records: Iterable) -> RateTable:
    """
    速率表 (N, 中位误差, r(N)), 并检查 max r / min r ≤ 2

    Raises:
        InsufficientDataError: 少于两个有收敛试验的 N
    """
    frame = records_frame(records)
    if frame.empty:
        raise InsufficientDataError("没有试验记录")
    ok = frame[frame["converged"]]
    medians = ok.groupby("n", sort=True)["error_sup"].median()
    if len(medians) < 2:
        raise InsufficientDataError(f"至少需要两个不同的 N, 当前: {list(medians.index)}")

    rows = [
        {"n": int(n), "median_error": float(m), "r": float(m) / rate_scale(int(n))}
        for n, m in medians.items()
    ]
    rates = [row["r"] for row in rows]
    ratio = max(rates) / min(rates) if min(rates) > 0 else math.inf
    return RateTable(rows=rows, ratio=ratio, rate_ok=ratio <= RATE_RATIO_LIMIT)
