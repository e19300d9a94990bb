"""Input checks shared by the estimators and the command line."""
import numpy as np

from .exceptions import DomainError, PreconditionError, UsageError
from .image import Image
from .membership import check_precision, quantize_array

ENGINES = ("mtbdd", "dense")


def check_engine(engine):
    if engine not in ENGINES:
        raise UsageError(f"engine must be one of {ENGINES}, got {engine!r}")
    return engine


def check_image(X):
    """Accept an :class:`Image` or an ``(h, w)`` / ``(h, w, 3)`` array of 0..255."""
    if isinstance(X, Image):
        return X
    arr = np.asarray(X)
    if arr.size == 0:
        raise UsageError("empty image")
    if not np.issubdtype(arr.dtype, np.number):
        raise UsageError(f"image must be numeric, got dtype {arr.dtype}")
    if np.issubdtype(arr.dtype, np.floating) and not np.all(arr == np.round(arr)):
        raise DomainError("image channels must be integers in [0, 255]")
    return Image.from_array(arr.astype(np.int64))


def check_membership_matrix(X, precision, reflexive=False):
    """Quantize a square matrix of memberships in [0, 1] to raw integers."""
    p = check_precision(precision)
    arr = np.asarray(X, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise UsageError(f"expected a non-empty square matrix, got shape {arr.shape}")
    raw = quantize_array(arr, p)
    if reflexive and not np.all(np.diagonal(raw) == 10 ** p):
        raise PreconditionError("relation must be reflexive (diagonal = 1)")
    return raw
