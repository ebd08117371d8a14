from dagster import Definitions, EnvVar, AssetSelection, define_asset_job, load_assets_from_package_module

from . import assets
from .resources.report_io_manager import ReportIOManager

REPORT_IOMANAGER_CONFIG = {
    "base_dir": EnvVar("CAPUTO_REPORT_DIR"),
}

all_assets = load_assets_from_package_module(assets)

tables_job = define_asset_job("tables_job", selection=AssetSelection.groups("tables"))
table1_job = define_asset_job("table1_job", selection=AssetSelection.keys("table1_report"))
table2_job = define_asset_job("table2_job", selection=AssetSelection.keys("table2_report"))

scalar_job = define_asset_job("scalar_job", selection=AssetSelection.groups("scalar"))

coefficients_job = define_asset_job("coefficients_job", selection=AssetSelection.groups("coefficients"))

defs = Definitions(
    assets=all_assets,
    resources={
        "report_io_manager": ReportIOManager(**REPORT_IOMANAGER_CONFIG)
    },
    jobs=[tables_job, table1_job, table2_job, scalar_job, coefficients_job],
)
