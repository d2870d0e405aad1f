"""Sparse recovery under bounded measurement-matrix perturbation."""

from robustcs._core import (
    Instance,
    Result,
    auc_bound,
    gen_instance,
    load_instance,
    profile_csv,
    recover,
    save_instance,
    support_detect,
    sweep_csv,
)

__all__ = [
    "Instance",
    "Result",
    "auc_bound",
    "gen_instance",
    "load_instance",
    "profile_csv",
    "recover",
    "save_instance",
    "support_detect",
    "sweep_csv",
]
