"""Model files.

Layout (all UTF-8 / ASCII)::

    lmo-ortho-model <format_version> <payload_bytes> <sha256_hex>\\n
    <JSON payload, exactly payload_bytes long>

The payload holds ``format_version``, ``model_kind``, ``classes``,
``feature_space`` and ``parameters``. Arrays are objects
``{"dtype": "<f8", "shape": [...], "data": <base64 of little-endian bytes>}``,
so parameters round-trip bit-exactly on any platform. N-gram keys inside the
feature space are hex-encoded bytes.
"""

from __future__ import annotations

import base64
import hashlib
import json

import numpy as np

from ..features import FeatureUnion, Vectorizer
from .forest import ForestModel, Tree
from .linear import LinearModel
from .naive_bayes import NBModel

MAGIC = "lmo-ortho-model"
FORMAT_VERSION = 1


class ModelFileError(Exception):
    pass


class ModelVersionError(ModelFileError):
    pass


class CorruptModelError(ModelFileError):
    pass


class TruncatedModelError(ModelFileError):
    pass


def _pack(a) -> dict:
    a = np.asarray(a)
    dtype = a.dtype.newbyteorder("<")
    return {
        "dtype": dtype.str,
        "shape": list(a.shape),
        "data": base64.b64encode(a.astype(dtype).tobytes()).decode("ascii"),
    }


def _unpack(d: dict) -> np.ndarray:
    if d["dtype"] not in ("<f8", "<i8"):
        raise CorruptModelError(f"unsupported array dtype {d['dtype']}")
    raw = base64.b64decode(d["data"], validate=True)
    a = np.frombuffer(raw, dtype=np.dtype(d["dtype"])).reshape(d["shape"])
    return a.astype(a.dtype.newbyteorder("="))


def _encode(obj):
    if isinstance(obj, np.ndarray):
        return _pack(obj)
    if isinstance(obj, dict):
        return {k: _encode(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_encode(v) for v in obj]
    return obj


def _space_to_dict(space):
    if space is None:
        return None
    if isinstance(space, Vectorizer):
        return {"type": "vectorizer", **_encode(space.to_dict())}
    return {"type": "union", "members": [_encode(m.to_dict()) for m in space.members]}


def _space_from_dict(d):
    if d is None:
        return None
    if d["type"] == "vectorizer":
        return Vectorizer.from_dict({**d, "idf": _unpack(d["idf"])})
    if d["type"] == "union":
        return FeatureUnion([Vectorizer.from_dict({**m, "idf": _unpack(m["idf"])}) for m in d["members"]])
    raise CorruptModelError(f"unknown feature space type {d['type']!r}")


def model_to_dict(model) -> dict:
    if isinstance(model, LinearModel):
        params = {"weights": model.weights, "bias": model.bias}
    elif isinstance(model, NBModel):
        params = {"log_prior": model.log_prior, "log_likelihood": model.log_likelihood,
                  "alpha": model.alpha}
    elif isinstance(model, ForestModel):
        params = {
            "n_features": model.n_features,
            "seed": model.seed,
            "trees": [
                {"feature": t.feature, "threshold": t.threshold, "left": t.left,
                 "right": t.right, "value": t.value}
                for t in model.trees
            ],
        }
    else:
        raise TypeError(f"cannot serialise {type(model).__name__}")
    return {
        "format_version": FORMAT_VERSION,
        "model_kind": model.kind,
        "classes": list(model.classes),
        "feature_space": _space_to_dict(model.feature_space),
        "parameters": _encode(params),
    }


def model_from_dict(doc: dict):
    kind = doc["model_kind"]
    classes = list(doc["classes"])
    space = _space_from_dict(doc["feature_space"])
    p = doc["parameters"]
    if kind in ("logreg", "svm"):
        return LinearModel(kind, classes, _unpack(p["weights"]), _unpack(p["bias"]), space)
    if kind == "nb":
        return NBModel(classes, _unpack(p["log_prior"]), _unpack(p["log_likelihood"]), p["alpha"], space)
    if kind == "rf":
        trees = [Tree(*(_unpack(t[k]) for k in ("feature", "threshold", "left", "right", "value")))
                 for t in p["trees"]]
        return ForestModel(classes, trees, int(p["n_features"]), int(p["seed"]), space)
    raise CorruptModelError(f"unknown model kind {kind!r}")


def dumps(model) -> bytes:
    payload = json.dumps(model_to_dict(model), separators=(",", ":"), ensure_ascii=True).encode("ascii")
    header = f"{MAGIC} {FORMAT_VERSION} {len(payload)} {hashlib.sha256(payload).hexdigest()}\n"
    return header.encode("ascii") + payload


def loads(blob: bytes):
    head, sep, payload = blob.partition(b"\n")
    if not sep:
        magic = MAGIC.encode()
        if blob and (blob.startswith(magic) or magic.startswith(blob)):
            raise TruncatedModelError("model file ends inside its header")
        raise CorruptModelError("not a model file (no header line)")
    parts = head.decode("ascii", "replace").split(" ")
    if len(parts) != 4 or parts[0] != MAGIC:
        raise CorruptModelError("not a model file (bad header)")
    try:
        version, length = int(parts[1]), int(parts[2])
    except ValueError:
        raise CorruptModelError("malformed model header") from None
    if version != FORMAT_VERSION:
        raise ModelVersionError(f"unsupported model format version {version} (expected {FORMAT_VERSION})")
    if len(payload) < length:
        raise TruncatedModelError(f"model payload truncated: {len(payload)} of {length} bytes")
    if len(payload) > length or hashlib.sha256(payload).hexdigest() != parts[3]:
        raise CorruptModelError("model payload checksum mismatch")
    try:
        doc = json.loads(payload)
        if doc.get("format_version") != FORMAT_VERSION:
            raise ModelVersionError(f"payload format version {doc.get('format_version')} does not match header")
        return model_from_dict(doc)
    except ModelFileError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptModelError(f"invalid model payload: {exc}") from None


def save_model(model, path) -> None:
    with open(path, "wb") as fh:
        fh.write(dumps(model))


def load_model(path):
    with open(path, "rb") as fh:
        return loads(fh.read())
