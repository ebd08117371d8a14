import math
from importlib import resources
from pathlib import Path
from typing import Optional, Union

import numpy as np
import pandas as pd

DATA_PACKAGE = "caputo_scheme.data"
SIGNIFICANT_DIGITS = 6


# computed value agrees with the reference up to a multiplicative factor
def within_factor(value: float, reference: float, factor: float) -> bool:
    if factor < 1:
        raise ValueError(f"Tolerance factor must be >= 1, got {factor}")
    if not (math.isfinite(value) and math.isfinite(reference)):
        return False
    if reference == 0:
        return value == 0
    return reference / factor <= value <= reference * factor


def within_relative(value: float, reference: float, tolerance: float) -> bool:
    if not (math.isfinite(value) and math.isfinite(reference)):
        return False
    return abs(value - reference) <= tolerance * abs(reference)


def round_significant(values: Union[float, np.ndarray, pd.Series], digits: int = SIGNIFICANT_DIGITS):
    """
    Round to `digits` significant digits, so that a column written as `%.{digits-1}e` parses back
    to the same float. NaN and 0 pass through.
    """
    arr = np.asarray(values, dtype=float)
    out = np.array(arr, copy=True)
    finite = np.isfinite(arr) & (arr != 0)
    if np.any(finite):
        out[finite] = np.array([float(f"{x:.{digits - 1}e}") for x in arr[finite]])
    if isinstance(values, pd.Series):
        return pd.Series(out, index=values.index, name=values.name)
    if np.ndim(values) == 0:
        return float(out)
    return out


# round every float column of a report in place and return it
def round_report(df: pd.DataFrame, digits: int = SIGNIFICANT_DIGITS) -> pd.DataFrame:
    for col in df.select_dtypes(include=["float"]).columns:
        df[col] = round_significant(df[col], digits)
    return df


def fixture_path(name: str) -> Path:
    return Path(str(resources.files(DATA_PACKAGE).joinpath(name)))


def load_fixture(name: str, path: Optional[Union[str, Path]] = None) -> pd.DataFrame:
    """Read a shipped fixture table; lines starting with '#' carry provenance and are skipped."""
    source = Path(path) if path is not None else fixture_path(name)
    if not source.exists():
        raise FileNotFoundError(f"Fixture file not found: {source}")
    return pd.read_csv(source, comment="#", skipinitialspace=True)

