"""Domain adaptation of linear classifiers.

Thin wrapper over the C++ extension. Arrays are accepted wherever a Dataset
is expected.
"""

import numpy as np

from . import _dalc
from ._dalc import (
    Dataset,
    Model,
    OptimizerError,
    ParseError,
    UnsupportedVersionError,
    beta_q_discrete,
    beta_q_gaussian,
    catoni_bound,
    catoni_factor,
    d_phi,
    d_phi_dis,
    d_phi_err,
    generalization_bound,
    ideal_bound,
    kernel_eval,
    make_moons,
    make_sparse_shift,
    phi,
    phi_dis,
    phi_err,
)

__all__ = [
    "Dataset", "Model", "OptimizerError", "ParseError", "UnsupportedVersionError",
    "as_dataset", "beta_q_discrete", "beta_q_gaussian", "catoni_bound", "catoni_factor",
    "d_phi", "d_phi_dis", "d_phi_err", "disagreement", "generalization_bound", "grid_search",
    "ideal_bound", "joint_error", "gibbs_risk", "kernel_eval", "make_moons", "make_sparse_shift",
    "phi", "phi_dis", "phi_err", "predict", "reverse_validation_risk", "train", "vote_risk",
]


def as_dataset(x, y=None, role="source"):
    if isinstance(x, Dataset):
        return x if y is None else x.with_labels(list(np.asarray(y, dtype=int)))
    x = np.atleast_2d(np.asarray(x, dtype=float))
    return Dataset(x, None if y is None else np.asarray(y, dtype=np.int32), role)


def train(source, target, source_labels=None, **kwargs):
    """Train DALC. kwargs: kernel, gamma, B, C, primal, max_iter, tol, method."""
    return _dalc.train(as_dataset(source, source_labels), as_dataset(target, role="target"), **kwargs)


def predict(model, x):
    return model.predict(as_dataset(x, role="target"))


def disagreement(model, x):
    return _dalc.disagreement(model, as_dataset(x, role="target"))


def joint_error(model, x, y=None):
    return _dalc.joint_error(model, as_dataset(x, y))


def gibbs_risk(model, x, y=None):
    return _dalc.gibbs_risk(model, as_dataset(x, y))


def vote_risk(model, x, y=None):
    return _dalc.vote_risk(model, as_dataset(x, y))


def reverse_validation_risk(source, target, source_labels=None, **kwargs):
    return _dalc.reverse_validation_risk(
        as_dataset(source, source_labels), as_dataset(target, role="target"), **kwargs)


def grid_search(source, target, c_values, b_values, source_labels=None, **kwargs):
    return _dalc.grid_search(
        as_dataset(source, source_labels), as_dataset(target, role="target"),
        list(c_values), list(b_values), **kwargs)
