"""Input validation shared by the estimators."""

import numbers

from sklearn.utils.validation import check_is_fitted  # noqa: F401  (re-export)

from .corpus import InstitutionDataset

DELTA_RANGE = (0.5, 1.0)


def _check_sequence(X, cls, what):
    if isinstance(X, cls):
        raise TypeError(f"expected a sequence of {what}, got a single one")
    X = list(X)
    for item in X:
        if not isinstance(item, cls):
            raise TypeError(f"expected {cls.__name__}, got {type(item).__name__}")
    ids = [item.institution_id for item in X]
    if len(set(ids)) != len(ids):
        raise ValueError("institution ids must be unique")
    return X


def check_datasets(X):
    """Return *X* as a list of InstitutionDataset with unique ids."""
    return _check_sequence(X, InstitutionDataset, "InstitutionDataset")


def check_profiles(X, cls):
    return _check_sequence(X, cls, cls.__name__)


def check_delta(delta):
    if not isinstance(delta, numbers.Real) or isinstance(delta, bool):
        raise TypeError(f"delta must be a real number, got {delta!r}")
    lo, hi = DELTA_RANGE
    if not lo <= delta <= hi:
        raise ValueError(f"delta must lie in [{lo}, {hi}], got {delta}")
    return delta


def check_k(k, name="k"):
    if not isinstance(k, numbers.Integral) or k < 1:
        raise ValueError(f"{name} must be a positive integer, got {k!r}")
    return int(k)
