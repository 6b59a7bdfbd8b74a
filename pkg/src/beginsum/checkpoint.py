"""Versioned JSON checkpoints: model kind, config echo, vocabulary and
exact float64 parameters (base64 of raw little-endian bytes, so a
save/load round trip and a rerun under the same seed are byte-identical).
"""

import base64
import json

import numpy as np

FORMAT_VERSION = 1


def _encode_array(arr):
    arr = np.ascontiguousarray(arr, dtype="<f8")
    return {"shape": list(arr.shape),
            "data": base64.b64encode(arr.tobytes()).decode("ascii")}


def _decode_array(obj):
    arr = np.frombuffer(base64.b64decode(obj["data"]), dtype="<f8")
    return arr.reshape(obj["shape"]).copy()


def checkpoint_dict(kind, config_dict, vocab_dict, params):
    """Serializable checkpoint from a parameters mapping name -> Tensor."""
    return {
        "format_version": FORMAT_VERSION,
        "model": kind,
        "config": config_dict,
        "vocab": vocab_dict,
        "params": {name: _encode_array(t.data) for name, t in sorted(params.items())},
    }


def dumps(ckpt):
    return json.dumps(ckpt, sort_keys=True, separators=(",", ":")) + "\n"


def save(ckpt, path):
    with open(path, "w", encoding="utf-8") as f:
        f.write(dumps(ckpt))


def load(path):
    with open(path, encoding="utf-8") as f:
        ckpt = json.load(f)
    version = ckpt.get("format_version")
    if version != FORMAT_VERSION:
        raise ValueError(f"unsupported checkpoint format_version {version!r}")
    return ckpt


def restore_params(ckpt, params):
    """Copy checkpoint arrays into a live parameters mapping (shapes must
    match the model built from the echoed config)."""
    saved = ckpt["params"]
    missing = sorted(set(params) ^ set(saved))
    if missing:
        raise ValueError(f"checkpoint/model parameter mismatch: {missing}")
    for name, tensor in params.items():
        arr = _decode_array(saved[name])
        if arr.shape != tensor.data.shape:
            raise ValueError(
                f"parameter {name!r}: checkpoint shape {arr.shape} != "
                f"model shape {tensor.data.shape}")
        tensor.data = arr
