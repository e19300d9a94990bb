"""scikit-learn style wrappers around the affinity and closure machinery.

``ImageAffinity`` and ``MaxMinClosure`` work on dense float matrices so they
chain in a :class:`sklearn.pipeline.Pipeline`; ``FuzzyConnectedness`` keeps
the closure as a decision diagram and answers pair queries, which is the
only practical route for images beyond a few thousand pixels.
"""
import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_engine, check_image, check_membership_matrix
from .dense import DenseRelation, floyd_warshall_closure
from .exceptions import DomainError, UsageError
from .image import affinity_entries, compute_delta
from .membership import check_precision
from .mtbdd import NodeTable
from .relation import from_entries, relation_from_matrix, to_dense, transitive_closure


class ImageAffinity(TransformerMixin, BaseEstimator):
    """Map an image to its neighbour affinity matrix.

    ``fit`` learns the colour normalizer ``delta_`` from an image;
    ``transform`` scores the neighbour pairs of any image with it.
    """

    def __init__(self, precision=1, normalize="delta", connectivity=4):
        self.precision = precision
        self.normalize = normalize
        self.connectivity = connectivity

    def fit(self, X, y=None):
        img = check_image(X)
        self.context_ = compute_delta(img, self.precision, self.normalize, self.connectivity)
        self.delta_ = self.context_.delta
        return self

    def transform(self, X):
        check_is_fitted(self, "context_")
        img = check_image(X)
        entries = affinity_entries(img, self.context_)
        return entries.to_dense(np.int64) / 10 ** self.context_.precision


class MaxMinClosure(TransformerMixin, BaseEstimator):
    """Max-min transitive closure of a reflexive fuzzy relation matrix."""

    def __init__(self, precision=1, engine="mtbdd"):
        self.precision = precision
        self.engine = engine

    def fit(self, X, y=None):
        check_engine(self.engine)
        raw = check_membership_matrix(X, self.precision, reflexive=True)
        self.n_features_in_ = raw.shape[0]
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        raw = check_membership_matrix(X, self.precision, reflexive=True)
        if raw.shape[0] != self.n_features_in_:
            raise UsageError(
                f"X has {raw.shape[0]} elements, fitted on {self.n_features_in_}")
        p = check_precision(self.precision)
        if self.engine == "dense":
            out = floyd_warshall_closure(DenseRelation(raw, p)).cells
        else:
            table = NodeTable(p)
            out = to_dense(transitive_closure(relation_from_matrix(raw, table)))
        return out.astype(np.int64) / 10 ** p


class FuzzyConnectedness(BaseEstimator):
    """Fuzzy connectedness of the pixels of one image.

    Attributes
    ----------
    delta_ : int
        Largest squared colour difference in the image.
    affinity_, relation_ : FuzzyRelation or DenseRelation
        Neighbour affinity and its max-min closure.
    n_iter_ : int or None
        Squarings used (``None`` for the dense engine).
    """

    def __init__(self, precision=1, normalize="delta", connectivity=4, engine="mtbdd"):
        self.precision = precision
        self.normalize = normalize
        self.connectivity = connectivity
        self.engine = engine

    def fit(self, X, y=None):
        check_engine(self.engine)
        img = check_image(X)
        ctx = compute_delta(img, self.precision, self.normalize, self.connectivity)
        entries = affinity_entries(img, ctx)
        self.delta_ = ctx.delta
        self.image_shape_ = (img.height, img.width)
        if self.engine == "dense":
            self.affinity_ = DenseRelation.from_entries(entries)
            self.relation_ = floyd_warshall_closure(self.affinity_)
            self.n_iter_ = None
        else:
            self.table_ = NodeTable(ctx.precision)
            self.affinity_ = from_entries(self.table_, entries)
            self.relation_, self.n_iter_ = transitive_closure(
                self.affinity_, return_iterations=True)
        return self

    def connectedness(self, i, j):
        """Strength of the best path between pixel indices ``i`` and ``j``."""
        check_is_fitted(self, "relation_")
        n = self.image_shape_[0] * self.image_shape_[1]
        if not (0 <= i < n and 0 <= j < n):
            raise DomainError(f"pixel index out of range [0, {n})")
        return float(self.relation_.get(i, j))

    def transform(self, X):
        """Connectedness for each ``(i, j)`` row of an integer array of pixel pairs."""
        pairs = np.asarray(X, dtype=np.int64)
        if pairs.ndim != 2 or pairs.shape[1] != 2:
            raise UsageError(f"expected an (m, 2) array of pixel pairs, got shape {pairs.shape}")
        return np.array([self.connectedness(int(i), int(j)) for i, j in pairs], dtype=float)
