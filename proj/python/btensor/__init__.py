"""B-tensor class membership, decomposition and positive definiteness certificates."""

from ._core import (
    InvalidArgument,
    IoError,
    PreconditionError,
    Tensor,
    __version__,
    apply,
    certify,
    classify,
    conjecture_search,
    decompose,
    form_value,
    is_symmetric,
    lambda_min_estimate,
    linear_combine,
    load_tensor,
    make_tensor,
    partially_all_one,
    save_tensor,
    sphere_minimize,
    symmetrize,
    unit_tensor,
)

__all__ = [
    "InvalidArgument",
    "IoError",
    "PreconditionError",
    "Tensor",
    "__version__",
    "apply",
    "certify",
    "classify",
    "conjecture_search",
    "decompose",
    "form_value",
    "is_symmetric",
    "lambda_min_estimate",
    "linear_combine",
    "load_tensor",
    "make_tensor",
    "partially_all_one",
    "save_tensor",
    "sphere_minimize",
    "symmetrize",
    "unit_tensor",
]
