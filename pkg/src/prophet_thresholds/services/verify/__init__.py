# Verification: curves, worst-case constructions and the check suite
from prophet_thresholds.services.verify.constructions import (
    demand_bad_sweep,
    example1_envelope,
    fixed_demand_insufficiency,
    hard_instance_sweep,
    iid_demand_check,
    policies_between,
    policy_interval_check,
    prophet_lower_bound,
    stockout_conjecture_probe,
)
from prophet_thresholds.services.verify.curves import (
    ar_curve,
    deriv_rhs,
    gamma_series,
    infimum_ar,
    ut_guarantee_curve,
    varphi,
    varphi_table,
)
from prophet_thresholds.services.verify.suite import run_suite

__all__ = [
    "ar_curve",
    "demand_bad_sweep",
    "deriv_rhs",
    "example1_envelope",
    "fixed_demand_insufficiency",
    "gamma_series",
    "hard_instance_sweep",
    "iid_demand_check",
    "infimum_ar",
    "policies_between",
    "policy_interval_check",
    "prophet_lower_bound",
    "run_suite",
    "stockout_conjecture_probe",
    "ut_guarantee_curve",
    "varphi",
    "varphi_table",
]
