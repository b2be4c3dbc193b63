"""The four benchmarked classifiers, grid search and model persistence."""

import json

from .. import _io
from ..exceptions import EyeStateError
from .forest import DecisionTree, RandomForest
from .knn import KNNClassifier
from .logistic import LogisticClassifier, logistic_loss_grad
from .search import GridResult, cross_val_f1, expand_grid, grid_search
from .svc import RBFSVC

__all__ = ["KNNClassifier", "LogisticClassifier", "RBFSVC", "RandomForest",
           "DecisionTree", "KINDS", "make_classifier", "grid_search",
           "GridResult", "cross_val_f1", "expand_grid", "logistic_loss_grad",
           "model_to_json", "model_from_json", "MODEL_FORMAT_VERSION"]

KINDS = {
    "knn": KNNClassifier,
    "logreg": LogisticClassifier,
    "svc": RBFSVC,
    "rf": RandomForest,
    "tree": DecisionTree,
}

MODEL_FORMAT_VERSION = 1


def make_classifier(kind: str, **params):
    try:
        cls = KINDS[kind]
    except KeyError:
        raise EyeStateError(f"unknown classifier kind {kind!r}; expected one of {sorted(KINDS)}") from None
    return cls(**params)


def model_to_json(model) -> str:
    """Versioned JSON document holding kind, hyperparameters and learned state."""
    return _io.dumps({
        "format_version": MODEL_FORMAT_VERSION,
        "kind": model.kind,
        "hyperparameters": model.get_params(),
        "state": model._get_state(),
    })


def model_from_json(text: str):
    doc = json.loads(text)
    if doc.get("format_version") != MODEL_FORMAT_VERSION:
        raise EyeStateError(f"unsupported model format version {doc.get('format_version')!r}")
    model = make_classifier(doc["kind"], **doc["hyperparameters"])
    model._set_state(doc["state"])
    return model
