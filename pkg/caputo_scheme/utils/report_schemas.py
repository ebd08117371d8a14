import pandera as pa
from dagster_pandera import pandera_schema_to_dagster_type

NON_NEGATIVE = pa.Check.ge(0)


def _error(nullable: bool = False) -> pa.Column:
    return pa.Column(float, NON_NEGATIVE, nullable=nullable)


Table1Schema = pa.DataFrameSchema(
    {
        "initial_data": pa.Column(str, pa.Check.isin(["poly", "sine"])),
        "alpha": pa.Column(float, pa.Check.in_range(0, 1, include_min=False, include_max=False)),
        "steps": pa.Column(int, pa.Check.ge(1)),
        "error_main": _error(),
        "rel_error_main": _error(),
        "error_comparison": _error(),
        "rel_error_comparison": _error(),
        "distance_initial": _error(),
        "published_error_main": _error(),
        "published_error_comparison": _error(),
        "published_distance_initial": _error(nullable=True),
        "max_norm_ratio": _error(),
        "max_residual": _error(),
        "stable": pa.Column(bool),
        "passed": pa.Column(bool),
    },
    name="table1_report",
    strict=True,
    ordered=True,
)

Table2Schema = pa.DataFrameSchema(
    {
        "initial_data": pa.Column(str, pa.Check.isin(["poly", "sine"])),
        "alpha": pa.Column(float, pa.Check.in_range(0, 1, include_min=False, include_max=False)),
        "steps_main": pa.Column(int, pa.Check.ge(1)),
        "steps_comparison": pa.Column(int, pa.Check.ge(1)),
        "distance": _error(),
        "published_distance": _error(),
        "max_norm_ratio": _error(),
        "max_residual": _error(),
        "stable": pa.Column(bool),
        "converging": pa.Column("boolean", nullable=True),
        "passed": pa.Column(bool),
    },
    name="table2_report",
    strict=True,
    ordered=True,
)

ScalarConvergenceSchema = pa.DataFrameSchema(
    {
        "alpha": pa.Column(float),
        "epsilon": pa.Column(float),
        "lam_re": pa.Column(float),
        "lam_im": pa.Column(float),
        "steps": pa.Column(int, pa.Check.ge(2)),
        "error": _error(),
        "empirical_order": pa.Column(float, nullable=True),
        "theory_rate": pa.Column(float, pa.Check.gt(0)),
        "passed": pa.Column(bool),
    },
    name="scalar_convergence_report",
    strict=True,
    ordered=True,
)

DecaySchema = pa.DataFrameSchema(
    {
        "alpha": pa.Column(float),
        "lam_re": pa.Column(float),
        "lam_im": pa.Column(float),
        "n": pa.Column(int, pa.Check.ge(1)),
        "abs_v": _error(),
        "bound_ratio": _error(),
        "bounded": pa.Column(bool),
    },
    name="decay_report",
    strict=True,
    ordered=True,
)

CoeffSweepSchema = pa.DataFrameSchema(
    {
        "alpha": pa.Column(float),
        "n_max": pa.Column(int, pa.Check.ge(1)),
        "sum_a_max": _error(),
        "beta_sum_dev": _error(),
        "signs_ok": pa.Column(bool),
        "bounds_ok": pa.Column(bool),
        "passed": pa.Column(bool),
    },
    name="coeff_sweep_report",
    strict=True,
    ordered=True,
)

InequalitySweepSchema = pa.DataFrameSchema(
    {
        "alpha": pa.Column(float),
        "epsilon": pa.Column(float),
        "n_max": pa.Column(int, pa.Check.ge(2)),
        "min_margin_41": pa.Column(float),
        "first_pass_41": pa.Column("Int64", nullable=True),
        "all_pass_41": pa.Column(bool),
        "min_margin_corollary": pa.Column(float, nullable=True),
        "all_pass_corollary": pa.Column("boolean", nullable=True),
        "passed": pa.Column(bool),
    },
    name="lemma41_sweep_report",
    strict=True,
    ordered=True,
)

Table1Report = pandera_schema_to_dagster_type(Table1Schema)
Table2Report = pandera_schema_to_dagster_type(Table2Schema)
ScalarConvergenceReport = pandera_schema_to_dagster_type(ScalarConvergenceSchema)
DecayReport = pandera_schema_to_dagster_type(DecaySchema)
CoeffSweepReport = pandera_schema_to_dagster_type(CoeffSweepSchema)
InequalitySweepReport = pandera_schema_to_dagster_type(InequalitySweepSchema)

REPORT_SCHEMAS = {schema.name: schema for schema in (
    Table1Schema, Table2Schema, ScalarConvergenceSchema, DecaySchema, CoeffSweepSchema, InequalitySweepSchema)}
