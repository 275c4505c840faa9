"""Pure-numpy reader and writer for SNOWFEAT feature stores.

Feature producers written in Python use these to hand vectors to the C++
pipeline without linking against it.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

MAGIC = b"SNOWFEAT"
VERSION = 1

CLASS_CODES = {
    "NoAction": 0,
    "Six": 1,
    "NoBall": 2,
    "Out": 3,
    "Wide": 4,
    "NonUmpire": 5,
}



def write_feature_store(path, source_tag: str, ids, codes, features) -> None:
    features = np.ascontiguousarray(features, dtype="<f4")
    if features.ndim != 2 or features.shape[1] == 0:
        raise ValueError("features must be a non-empty n x dim array")
    if not np.all(np.isfinite(features)):
        raise ValueError("features must be finite")
    ids = np.asarray(ids, dtype="<u4")
    codes = np.asarray(codes, dtype="u1")
    n, dim = features.shape
    if ids.shape != (n,) or codes.shape != (n,):
        raise ValueError("ids and codes must have one entry per row")
    if codes.size and codes.max() > 5:
        raise ValueError("class codes must be 0-5")
    tag = source_tag.encode("utf-8")
    if len(tag) > 0xFFFF:
        raise ValueError("source tag too long")

    record = np.dtype([("id", "<u4"), ("code", "u1"), ("x", "<f4", (dim,))])
    body = np.empty(n, dtype=record)
    body["id"] = ids
    body["code"] = codes
    body["x"] = features
    with open(Path(path), "wb") as f:
        f.write(MAGIC + struct.pack("<BH", VERSION, len(tag)) + tag + struct.pack("<II", dim, n))
        f.write(body.tobytes())


def read_feature_store(path) -> dict:
    data = Path(path).read_bytes()
    if data[:8] != MAGIC:
        raise ValueError("feature store: bad magic")
    version, tag_len = struct.unpack_from("<BH", data, 8)
    if version != VERSION:
        raise ValueError(f"feature store: unsupported version {version}")
    pos = 11
    tag = data[pos : pos + tag_len].decode("utf-8")
    pos += tag_len
    dim, n = struct.unpack_from("<II", data, pos)
    pos += 8
    record = np.dtype([("id", "<u4"), ("code", "u1"), ("x", "<f4", (dim,))])
    if len(data) - pos != n * record.itemsize:
        raise ValueError("feature store: payload size mismatch")
    body = np.frombuffer(data, dtype=record, count=n, offset=pos)
    return {
        "source_tag": tag,
        "dim": dim,
        "ids": body["id"].astype(np.uint32),
        "codes": body["code"].astype(np.uint8),
        "features": body["x"].astype(np.float32),
    }
