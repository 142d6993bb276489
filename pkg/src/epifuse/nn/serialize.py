"""The "EPIF" binary container.

Layout: magic ``EPIF`` | u32 LE format version | u64 LE manifest length |
UTF-8 JSON manifest | raw little-endian float64 payload. The manifest's
``entries`` list names each array and its shape; payloads follow in manifest
order. Model weights and density grids both ride in this container, they
differ only in manifest metadata.
"""

import json
import struct

import numpy as np

from ..errors import DataFormatError

MAGIC = b"EPIF"
VERSION = 1


def write_container(path, manifest, arrays):
    """Write named float64 arrays; ``manifest["entries"]`` is derived here."""
    entries = []
    for name, arr in arrays:
        arr = np.asarray(arr, dtype=np.float64)
        entries.append({"name": name, "shape": list(arr.shape)})
    manifest = dict(manifest)
    manifest["entries"] = entries
    blob = json.dumps(manifest, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", VERSION))
        fh.write(struct.pack("<Q", len(blob)))
        fh.write(blob)
        for _, arr in arrays:
            fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def read_container(path):
    """Return (manifest, {name: array}); validates magic, version and sizes."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != MAGIC:
            raise DataFormatError(f"{path}: not an EPIF container (magic {magic!r})")
        (version,) = struct.unpack("<I", fh.read(4))
        if version != VERSION:
            raise DataFormatError(f"{path}: unsupported EPIF version {version}")
        (mlen,) = struct.unpack("<Q", fh.read(8))
        manifest = json.loads(fh.read(mlen).decode("utf-8"))
        arrays = {}
        for entry in manifest["entries"]:
            shape = tuple(entry["shape"])
            count = int(np.prod(shape, dtype=np.int64)) if shape else 1
            raw = fh.read(8 * count)
            if len(raw) != 8 * count:
                raise DataFormatError(f"{path}: truncated payload for {entry['name']}")
            arrays[entry["name"]] = np.frombuffer(raw, dtype="<f8").reshape(shape).copy()
        if fh.read(1):
            raise DataFormatError(f"{path}: trailing bytes after payload")
    return manifest, arrays
