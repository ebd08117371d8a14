from pathlib import Path
from types import NoneType
from typing import Any, Optional, Union

import pandas as pd
import pandera as pa

from dagster import ConfigurableIOManager, InputContext, OutputContext

from ..utils.report_schemas import REPORT_SCHEMAS

FLOAT_FORMAT = "%.5e"
SUPPORTED_FORMATS = ("csv", "json")


def write_report(df: pd.DataFrame, path: Union[str, Path], file_format: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if file_format == "csv":
        df.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    elif file_format == "json":
        text = df.to_json(orient="records", indent=2, double_precision=15)
        path.write_text(text + "\n")
    else:
        raise ValueError(f"Unsupported report format '{file_format}' (expected one of {SUPPORTED_FORMATS})")
    return path


def restore_dtypes(df: pd.DataFrame, schema: pa.DataFrameSchema) -> pd.DataFrame:
    """
    Cast columns read back from CSV or JSON to the report schema and validate. Nullable columns
    come back as object or float, and JSON turns integral floats into int64.
    """
    for name, column in schema.columns.items():
        dtype = str(column.dtype)
        if name in df and dtype != "str" and str(df[name].dtype) != dtype:
            df[name] = df[name].astype(dtype)
    return schema.validate(df)


def load_report(path: Union[str, Path], file_format: Optional[str] = None,
                schema: Optional[pa.DataFrameSchema] = None) -> pd.DataFrame:
    path = Path(path)
    file_format = file_format or path.suffix.lstrip(".")
    try:
        if file_format == "csv":
            df = pd.read_csv(path)
        elif file_format == "json":
            df = pd.read_json(path, orient="records", precise_float=True)
        else:
            raise ValueError(f"Unsupported report format '{file_format}' for {path}")
    except OSError as e:
        raise OSError(f"Could not read report {path}: {e}") from e
    return restore_dtypes(df, schema) if schema is not None else df


class ReportIOManager(ConfigurableIOManager):
    """Stores each report asset as <base_dir>/<asset name>.<format>, or at output_path when set."""
    base_dir: str
    file_format: str = "csv"
    output_path: Optional[str] = None

    def _path(self, asset_name: str) -> Path:
        if self.output_path:
            return Path(self.output_path)
        return Path(self.base_dir) / f"{asset_name}.{self.file_format}"

    def load_input(self, context: "InputContext") -> pd.DataFrame:
        asset_name = context.asset_key.path[-1]
        return load_report(self._path(asset_name), self.file_format, schema=REPORT_SCHEMAS.get(asset_name))

    def handle_output(self, context: "OutputContext", obj: Any):
        if isinstance(obj, pd.DataFrame):
            path = self._path(context.asset_key.path[-1])
            context.log.info(f"Writing {len(obj)} rows to {path}")
            try:
                write_report(obj, path, self.file_format)
            except OSError as e:
                raise OSError(f"Could not write report {path}: {e}") from e
            context.add_output_metadata({"path": str(path), "rows": len(obj)})
        elif isinstance(obj, NoneType):
            context.log.warning(f"ReportIOManager received output of type NoneType. No action will be taken")
        else:
            raise ValueError(f"Unsupported object type {type(obj)} for ReportIOManager.")
