"""JSON codecs for fitted models.

Each object becomes a dict with a ``type`` tag; arrays become lists of
floats, which :mod:`json` writes in shortest round-trip form, so a saved
model reloads bit-identically.
"""

from __future__ import annotations

import json

import numpy as np

from .classical.boosting import BoostModel
from .classical.linear import ArModel, OlsModel
from .classical.stumps import Stump
from .classical.svm import SvmModel
from .classical.trees import ForestModel, Node, TreeModel
from .errors import FormatError, IoError
from .hydrodata.dataset import Scaler
from .qboost import Ensemble
from .qfeatures import FeatureMapSpec
from .vqml import AnsatzSpec, VariationalModel

FORMAT = "hydroq-model"
VERSION = 1


def _arr(a):
    return None if a is None else np.asarray(a, dtype=np.float64).tolist()


def _node(n: Node) -> dict:
    d = {"value": n.value, "n": n.n_samples}
    if not n.is_leaf:
        d.update(feature=n.feature, threshold=n.threshold, left=_node(n.left), right=_node(n.right))
    return d


def _unnode(d) -> Node:
    if "feature" not in d:
        return Node(d["value"], n_samples=d["n"])
    return Node(d["value"], d["feature"], d["threshold"], _unnode(d["left"]), _unnode(d["right"]), d["n"])


def encode(obj) -> dict:
    if obj is None:
        return {"type": "none"}
    if isinstance(obj, Stump):
        return {"type": "stump", "feature": obj.feature, "threshold": obj.threshold,
                "polarity": obj.polarity}
    if isinstance(obj, TreeModel):
        return {"type": "tree", "task": obj.task, "max_depth": obj.max_depth,
                "n_features": obj.n_features, "root": _node(obj.root)}
    if isinstance(obj, ForestModel):
        return {"type": "forest", "task": obj.task, "max_features": obj.max_features,
                "trees": [encode(t) for t in obj.trees]}
    if isinstance(obj, BoostModel):
        return {"type": "boost", "kind": obj.kind, "init": obj.init, "weights": list(obj.weights),
                "errors": list(obj.errors), "learners": [encode(m) for m in obj.learners]}
    if isinstance(obj, SvmModel):
        return {"type": "svm", "kernel": obj.kernel, "C": obj.C, "alphas": _arr(obj.alphas),
                "bias": obj.bias, "labels": np.asarray(obj.labels).tolist(),
                "train_X": _arr(obj.train_X), "gamma": obj.gamma, "n_iter": obj.n_iter}
    if isinstance(obj, OlsModel):
        return {"type": "ols", "coef": _arr(obj.coef), "intercept": obj.intercept, "r2": obj.r2}
    if isinstance(obj, ArModel):
        return {"type": "ar", "p": obj.p, "coefficients": _arr(obj.coefficients),
                "intercept": obj.intercept}
    if isinstance(obj, Ensemble):
        return {"type": "ensemble", "members": [encode(m) for m in obj.members],
                "selected": np.asarray(obj.selected).tolist(), "flip": obj.flip,
                "metadata": {k: v for k, v in obj.metadata.items()
                             if isinstance(v, (bool, int, float, str))}}
    if isinstance(obj, Scaler):
        return {"type": "scaler", "mode": obj.mode, "shift": _arr(obj.shift),
                "width": _arr(obj.width), "clip": obj.clip}
    if isinstance(obj, VariationalModel):
        fm = obj.feature_map
        return {"type": "variational", "qubits": obj.ansatz.n_qubits, "depth": obj.ansatz.depth,
                "feature_map": None if fm is None else [fm.n_features, fm.reps, fm.entanglement],
                "encoding": obj.encoding, "readout": obj.readout,
                "params": _arr(obj.params), "scale": obj.scale, "offset": obj.offset,
                "feature_range": None if obj.feature_range is None else list(obj.feature_range)}
    raise TypeError(f"cannot encode {type(obj).__name__}")


def decode(d):
    kind = d.get("type")
    if kind == "none":
        return None
    if kind == "stump":
        return Stump(d["feature"], d["threshold"], d["polarity"])
    if kind == "tree":
        return TreeModel(_unnode(d["root"]), d["task"], d["max_depth"], d["n_features"])
    if kind == "forest":
        return ForestModel([decode(t) for t in d["trees"]], d["task"], d["max_features"])
    if kind == "boost":
        return BoostModel(d["kind"], [decode(m) for m in d["learners"]], d["weights"], d["init"],
                          d["errors"])
    if kind == "svm":
        tx = None if d["train_X"] is None else np.array(d["train_X"])
        return SvmModel(d["kernel"], d["C"], np.array(d["alphas"]), d["bias"],
                        np.array(d["labels"], dtype=np.int64), tx, d["gamma"], d["n_iter"])
    if kind == "ols":
        return OlsModel(np.array(d["coef"]), d["intercept"], d["r2"])
    if kind == "ar":
        return ArModel(d["p"], np.array(d["coefficients"]), d["intercept"])
    if kind == "ensemble":
        return Ensemble([decode(m) for m in d["members"]], np.array(d["selected"], dtype=np.int64),
                        d["flip"], dict(d["metadata"]))
    if kind == "scaler":
        return Scaler(d["mode"], np.array(d["shift"]), np.array(d["width"]), d["clip"])
    if kind == "variational":
        fm = None if d["feature_map"] is None else FeatureMapSpec(*d["feature_map"])
        rng = None if d["feature_range"] is None else tuple(d["feature_range"])
        return VariationalModel(AnsatzSpec(d["qubits"], d["depth"]), fm, d["encoding"],
                                None if d["params"] is None else np.array(d["params"]),
                                d["readout"], d["scale"], d["offset"], rng)
    raise FormatError(f"unknown model type {kind!r}")


def dumps(payload: dict) -> str:
    return json.dumps({"format": FORMAT, "version": VERSION, **payload}, indent=1, sort_keys=True)


def save_json(payload: dict, path) -> None:
    try:
        with open(path, "w") as fh:
            fh.write(dumps(payload) + "\n")
    except OSError as exc:
        raise IoError(str(exc)) from exc


def load_json(path) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise IoError(str(exc)) from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: not a model file ({exc})") from exc
    if data.get("format") != FORMAT:
        raise FormatError(f"{path}: not a {FORMAT} file")
    if data.get("version") != VERSION:
        raise FormatError(f"{path}: unsupported version {data.get('version')}")
    return data
