"""
smrep/nn/checkpoint.py
──────────────────────
Named-tensor container used for model checkpoints, representation sets and
cluster models.  Byte-stable: the same tensors and metadata always produce the
same file.

Layout (little-endian):

    8s   magic  b"SMTENS\\0\\0"
    u32  format version
    u32  header length in bytes
    ...  header, canonical JSON: {"architecture", "metadata", "tensors": [{name, shape}]}
    f8   concatenated tensor values in header order (C order)
"""
from __future__ import annotations

import json
import struct
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np

from smrep.nn.parameters import Parameters
from smrep.utils.exceptions import CheckpointError

TENSOR_MAGIC = b"SMTENS\x00\x00"
FORMAT_VERSION = 1

_PREFIX = struct.Struct("<8sII")
_F8 = np.dtype("<f8")

PathLike = Union[str, Path]


def canonical_json(obj: Any) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode("utf-8")


def write_tensor_file(
    path: PathLike,
    tensors: Parameters,
    architecture: str,
    metadata: Optional[dict[str, Any]] = None,
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    names = list(tensors)
    header = canonical_json(
        {
            "architecture": architecture,
            "metadata": metadata or {},
            "tensors": [{"name": n, "shape": list(tensors[n].shape)} for n in names],
        }
    )
    with path.open("wb") as fh:
        fh.write(_PREFIX.pack(TENSOR_MAGIC, FORMAT_VERSION, len(header)))
        fh.write(header)
        for name in names:
            fh.write(np.ascontiguousarray(tensors[name], dtype=_F8).tobytes())
    return path


def read_tensor_file(path: PathLike) -> tuple[str, dict[str, Any], Parameters]:
    """Return (architecture id, metadata, tensors) in the order they were written."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"tensor file not found: {path}")
    raw = path.read_bytes()
    if len(raw) < _PREFIX.size:
        raise CheckpointError(f"{path}: file too short")
    magic, version, header_len = _PREFIX.unpack_from(raw)
    if magic != TENSOR_MAGIC:
        raise CheckpointError(f"{path}: bad magic header {magic!r}")
    if version != FORMAT_VERSION:
        raise CheckpointError(f"{path}: format version {version} is not supported (expected {FORMAT_VERSION})")
    try:
        header = json.loads(raw[_PREFIX.size:_PREFIX.size + header_len].decode("utf-8"))
        entries = [(str(e["name"]), tuple(int(d) for d in e["shape"])) for e in header["tensors"]]
        architecture = str(header["architecture"])
    except (ValueError, KeyError, TypeError, UnicodeDecodeError) as exc:
        raise CheckpointError(f"{path}: malformed header ({exc})") from exc

    body = memoryview(raw)[_PREFIX.size + header_len:]
    expected = sum(int(np.prod(shape, dtype=np.int64)) for _, shape in entries) * _F8.itemsize
    if len(body) != expected:
        raise CheckpointError(f"{path}: payload holds {len(body)} bytes, expected {expected}")

    tensors: Parameters = {}
    offset = 0
    for name, shape in entries:
        count = int(np.prod(shape, dtype=np.int64))
        values = np.frombuffer(body, dtype=_F8, count=count, offset=offset)
        tensors[name] = values.reshape(shape).astype(np.float64)
        offset += count * _F8.itemsize
    return architecture, header.get("metadata", {}), tensors


def save_checkpoint(path: PathLike, params: Parameters, architecture: str, metadata: Optional[dict] = None) -> Path:
    return write_tensor_file(path, params, architecture, metadata)


def load_checkpoint(path: PathLike, expected_architecture: Optional[str] = None) -> tuple[str, dict, Parameters]:
    architecture, metadata, params = read_tensor_file(path)
    if expected_architecture is not None and architecture != expected_architecture:
        raise CheckpointError(
            f"{path}: checkpoint holds a '{architecture}' model, expected '{expected_architecture}'"
        )
    return architecture, metadata, params
