from _fusetree import (
    DataError,
    InternalError,
    Partition,
    Tree,
    UsageError,
    adjusted_rand_index,
    consensus,
    cross_validate,
    fit,
    fit_multi,
    recovery_probability,
    solve_exact,
    __version__,
)

__all__ = [
    "DataError",
    "InternalError",
    "Partition",
    "Tree",
    "UsageError",
    "adjusted_rand_index",
    "consensus",
    "cross_validate",
    "fit",
    "fit_multi",
    "recovery_probability",
    "solve_exact",
    "__version__",
]
