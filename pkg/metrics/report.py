"""
Reporting helpers: timestamped log lines, metric tables and log-log order fits.
"""

import sys
from datetime import datetime
from pathlib import Path

import numpy as np
import pandas as pd
from statsmodels.regression.linear_model import OLS
from statsmodels.tools import add_constant

import config

_log_file: Path | None = config.LOG_FILE


def set_log_file(path: str | Path | None) -> None:
    """Redirect (or disable, with None) the log file copy of every log line."""
    global _log_file
    _log_file = Path(path) if path is not None else None


def log(msg: str) -> None:
    line = f"[{datetime.now().strftime('%Y-%m-%d %H:%M:%S')}] {msg}"
    print(line, file=sys.stderr, flush=True)
    if _log_file is None:
        return
    try:
        _log_file.parent.mkdir(parents=True, exist_ok=True)
        with open(_log_file, "a") as f:
            f.write(line + "\n")
    except OSError:
        pass


def estimate_order(steps, errors) -> dict:
    """
    Fit log(error) = c + p * log(step) by OLS.

    Parameters
    ----------
    steps : positive step sizes (or pair separations).
    errors : matching positive error magnitudes.

    Returns a dict with the slope ``order``, the intercept ``log_constant``,
    ``r_squared`` and the number of points used. Zero errors are dropped.
    """
    h = np.asarray(steps, dtype=float)
    e = np.asarray(errors, dtype=float)
    keep = (h > 0) & (e > 0) & np.isfinite(e)
    if keep.sum() < 2:
        return {"order": np.nan, "log_constant": np.nan, "r_squared": np.nan, "n_points": int(keep.sum())}

    model = OLS(np.log(e[keep]), add_constant(np.log(h[keep]))).fit()
    return {
        "order": float(model.params[1]),
        "log_constant": float(model.params[0]),
        "r_squared": float(model.rsquared),
        "n_points": int(keep.sum()),
    }


def order_table(steps, errors) -> pd.DataFrame:
    """Per-level table of (h, error, successive order estimate)."""
    h = np.asarray(steps, dtype=float)
    e = np.asarray(errors, dtype=float)
    rates = [np.nan]
    for k in range(1, len(h)):
        if e[k] > 0 and e[k - 1] > 0:
            rates.append(np.log(e[k - 1] / e[k]) / np.log(h[k - 1] / h[k]))
        else:
            rates.append(np.nan)
    return pd.DataFrame({"h": h, "error": e, "order_estimate": rates})


def print_metrics(metrics: dict, title: str = "SUMMARY") -> None:
    """Pretty-print a flat metrics dict to stderr."""
    out = sys.stderr
    print("\n" + "=" * 50, file=out)
    print(f"  {title}", file=out)
    print("=" * 50, file=out)
    for key, val in metrics.items():
        label = key.replace("_", " ")
        if isinstance(val, float) and np.isnan(val):
            print(f"  {label:.<30s} N/A", file=out)
        elif isinstance(val, bool):
            print(f"  {label:.<30s} {'yes' if val else 'no'}", file=out)
        elif isinstance(val, int):
            print(f"  {label:.<30s} {val:d}", file=out)
        elif isinstance(val, float):
            print(f"  {label:.<30s} {val:.6g}", file=out)
        else:
            print(f"  {label:.<30s} {val}", file=out)
    print("=" * 50 + "\n", file=out)
