"""Binary container, CSV and JSON persistence.

Container layout (all integers little-endian)::

    magic      4 bytes   b"ODC1"
    n          uint64    signal dimension
    d          uint64    number of atoms (0 when not applicable)
    kind       16 bytes  ASCII tag, NUL padded ("gabor", "sensing", ...)
    meta_len   uint32    length of the JSON metadata that follows
    meta       bytes     UTF-8 JSON (lattice parameters, seeds, ...)
    n_arrays   uint32
    then per array:
      name_len uint16, name bytes (UTF-8)
      rows     uint64
      cols     uint64
      complex  uint8     1 if the payload is complex
      payload  float64   rows*cols values, row-major; complex entries are
                         interleaved (re, im)
"""
from __future__ import annotations

import csv
import json
import struct
from pathlib import Path

import numpy as np

from .frames import Dictionary
from .sensing import GroundTruth, SensingEnsemble

__all__ = [
    "write_container",
    "read_container",
    "save_dictionary",
    "load_dictionary",
    "dictionary_to_csv",
    "save_sensing",
    "load_sensing",
    "save_ground_truth",
    "load_ground_truth",
]

MAGIC = b"ODC1"
_HEAD = struct.Struct("<4sQQ16sI")


def write_container(path, kind, n, d, meta, arrays):
    """Write named 2-d (or 1-d, stored as a column) arrays to ``path``."""
    path = Path(path)
    tag = kind.encode("ascii")
    if len(tag) > 16:
        raise ValueError(f"kind tag {kind!r} longer than 16 bytes")
    meta_bytes = json.dumps(meta, sort_keys=True).encode("utf-8")
    try:
        with open(path, "wb") as fh:
            fh.write(_HEAD.pack(MAGIC, int(n), int(d), tag.ljust(16, b"\0"), len(meta_bytes)))
            fh.write(meta_bytes)
            fh.write(struct.pack("<I", len(arrays)))
            for name, arr in arrays.items():
                arr = np.asarray(arr)
                if arr.ndim == 1:
                    arr = arr[:, None]
                is_complex = np.iscomplexobj(arr)
                name_b = name.encode("utf-8")
                fh.write(struct.pack("<H", len(name_b)) + name_b)
                fh.write(struct.pack("<QQB", arr.shape[0], arr.shape[1], int(is_complex)))
                if is_complex:
                    payload = np.ascontiguousarray(arr, dtype="<c16").view("<f8")
                else:
                    payload = np.ascontiguousarray(arr, dtype="<f8")
                fh.write(payload.tobytes(order="C"))
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def read_container(path):
    """Return ``(kind, n, d, meta, arrays)`` from a container file."""
    path = Path(path)
    data = path.read_bytes()
    if len(data) < _HEAD.size:
        raise ValueError(f"{path}: truncated header")
    magic, n, d, tag, meta_len = _HEAD.unpack_from(data, 0)
    if magic != MAGIC:
        raise ValueError(f"{path}: not an optdual container (magic {magic!r})")
    pos = _HEAD.size
    meta = json.loads(data[pos:pos + meta_len].decode("utf-8"))
    pos += meta_len
    (count,) = struct.unpack_from("<I", data, pos)
    pos += 4
    arrays = {}
    for _ in range(count):
        (name_len,) = struct.unpack_from("<H", data, pos)
        pos += 2
        name = data[pos:pos + name_len].decode("utf-8")
        pos += name_len
        rows, cols, is_complex = struct.unpack_from("<QQB", data, pos)
        pos += 17
        nvals = rows * cols * (2 if is_complex else 1)
        buf = np.frombuffer(data, dtype="<f8", count=nvals, offset=pos).copy()
        pos += 8 * nvals
        arr = buf.view("<c16") if is_complex else buf
        arrays[name] = arr.reshape(rows, cols).astype(np.complex128 if is_complex else np.float64)
    return tag.rstrip(b"\0").decode("ascii"), n, d, meta, arrays


def save_dictionary(path, D: Dictionary):
    meta = {"params": D.params, "blocks": list(D.blocks)}
    write_container(path, D.kind, D.n, D.d, meta, {"atoms": D.atoms})


def load_dictionary(path) -> Dictionary:
    kind, n, d, meta, arrays = read_container(path)
    atoms = arrays["atoms"]
    if atoms.shape != (n, d):
        raise ValueError(f"{path}: header says {n}x{d} but atoms are {atoms.shape}")
    return Dictionary(atoms, kind=kind, params=meta.get("params"), blocks=meta.get("blocks"))


def dictionary_to_csv(path, D: Dictionary):
    """Long-format CSV with one line per matrix entry: ``row, atom, real, imag``."""
    path = Path(path)
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["row", "atom", "real", "imag"])
            for i in range(D.n):
                for j in range(D.d):
                    v = D.atoms[i, j]
                    w.writerow([i, j, repr(float(np.real(v))), repr(float(np.imag(v)))])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def save_sensing(path, ens: SensingEnsemble):
    meta = {"seed": ens.seed, "scale": ens.scale}
    write_container(path, "sensing", ens.n, 0, meta, {"phi": ens.phi})


def load_sensing(path) -> SensingEnsemble:
    kind, n, _, meta, arrays = read_container(path)
    if kind != "sensing":
        raise ValueError(f"{path}: expected a sensing container, found {kind!r}")
    return SensingEnsemble(arrays["phi"], seed=meta.get("seed"), scale=meta.get("scale"))


def save_ground_truth(path, gt: GroundTruth):
    meta = {"seed": gt.seed, "s": gt.s, "support": [int(i) for i in gt.support]}
    write_container(path, "ground_truth", gt.f.size, gt.x.size, meta, {"f": gt.f, "x": gt.x})


def load_ground_truth(path) -> GroundTruth:
    kind, _, _, meta, arrays = read_container(path)
    if kind != "ground_truth":
        raise ValueError(f"{path}: expected a ground_truth container, found {kind!r}")
    return GroundTruth(
        f=arrays["f"][:, 0],
        x=arrays["x"][:, 0],
        support=np.asarray(meta["support"], dtype=np.int64),
        seed=meta.get("seed"),
    )
