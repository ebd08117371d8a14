from typing import List, Optional

import pandas as pd

from ..utils.coefficients import FractionalOrder, identity_sweep, inequality_sweep
from ..utils.common import round_report
from ..utils.report_schemas import CoeffSweepReport, InequalitySweepReport

from dagster import (
    AssetExecutionContext,
    Config,
    Output,
    asset,
)

DEFAULT_ALPHAS = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]


class SweepConfig(Config):
    alphas: List[float] = DEFAULT_ALPHAS
    n_max: int = 1000
    # None picks min(0.05, (1 - alpha)/2) per alpha
    epsilon: Optional[float] = None


def order_for(alpha: float, epsilon: Optional[float]) -> FractionalOrder:
    if epsilon is None:
        return FractionalOrder.with_default_epsilon(alpha)
    return FractionalOrder(alpha, epsilon)


def build_coeff_sweep(config: SweepConfig, log=None) -> pd.DataFrame:
    records = []
    for alpha in config.alphas:
        order_for(alpha, config.epsilon)
        record = identity_sweep(alpha, config.n_max)
        if log is not None:
            message = (f"alpha={alpha}, n<={config.n_max}: max |sum a| {record['sum_a_max']:.2e}, "
                       f"beta-sum deviation {record['beta_sum_dev']:.2e}")
            if record["passed"]:
                log.info(message)
            else:
                log.warning(f"Coefficient identities fail: {message}, signs_ok={record['signs_ok']}, "
                            f"bounds_ok={record['bounds_ok']}")
        records.append(record)
    return round_report(pd.DataFrame.from_records(records))


def build_inequality_sweep(config: SweepConfig, log=None) -> pd.DataFrame:
    if config.n_max < 2:
        raise ValueError(f"Inequality sweep needs n_max >= 2, got {config.n_max}")
    records = []
    for alpha in config.alphas:
        order = order_for(alpha, config.epsilon)
        record = inequality_sweep(order.alpha, order.epsilon, config.n_max)
        record["passed"] = record["all_pass_41"] and record["all_pass_corollary"] is not False
        if log is not None:
            log.info(f"alpha={alpha}, epsilon={order.epsilon}: smallest passing n = {record['first_pass_41']}, "
                     f"min margin {record['min_margin_41']:.3e}")
            if not record["passed"]:
                log.warning(f"Weighted coefficient inequality fails for alpha={alpha}, epsilon={order.epsilon}")
        records.append(record)
    df = pd.DataFrame.from_records(records)
    df["first_pass_41"] = df["first_pass_41"].astype("Int64")
    df["min_margin_corollary"] = df["min_margin_corollary"].astype(float)
    df["all_pass_corollary"] = df["all_pass_corollary"].astype("boolean")
    return round_report(df)


# Coefficient sweep assets

@asset(
    io_manager_key="report_io_manager",
    group_name="coefficients",
    dagster_type=CoeffSweepReport,
    op_tags={"concurrency_tag": "coefficients"},
    description="Row sums, beta-function total, sign pattern and bracketing of the scheme coefficients"
)
def coeff_sweep_report(context: AssetExecutionContext, config: SweepConfig):
    df = build_coeff_sweep(config, log=context.log)
    return Output(value=df, metadata={"rows": len(df), "passed": bool(df["passed"].all())})


@asset(
    io_manager_key="report_io_manager",
    group_name="coefficients",
    dagster_type=InequalitySweepReport,
    op_tags={"concurrency_tag": "coefficients"},
    description="Weighted coefficient inequality over n in [2, n_max], with the smallest passing n"
)
def lemma41_sweep_report(context: AssetExecutionContext, config: SweepConfig):
    df = build_inequality_sweep(config, log=context.log)
    return Output(value=df, metadata={"rows": len(df), "passed": bool(df["passed"].all())})
