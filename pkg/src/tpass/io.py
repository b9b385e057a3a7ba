"""File formats: TNS3 binary tensors and 8-bit binary PGM/PPM images.

TNS3 layout (all little-endian)::

    b"TNS3" | u32 version (=1) | u64 I1 | u64 I2 | u64 I3 | f64 * (I1*I2*I3)

with values in mode-1-fastest order.
"""

from __future__ import annotations

import os
import re
import struct
from pathlib import Path

import numpy as np

from .errors import FormatError
from .tensor import MaskTensor, Tensor3

MAGIC = b"TNS3"
VERSION = 1
HEADER = struct.Struct("<4sIQQQ")
MAX_ENTRIES = 2**60 // 8


def tensor_to_bytes(x: Tensor3) -> bytes:
    n1, n2, n3 = x.dims
    return HEADER.pack(MAGIC, VERSION, n1, n2, n3) + x.linear().astype("<f8").tobytes()


def tensor_from_bytes(buf: bytes) -> Tensor3:
    if len(buf) < HEADER.size:
        if not buf.startswith(MAGIC[:len(buf)]) or len(buf) < 4:
            raise FormatError("bad magic: not a TNS3 file")
        raise FormatError("truncated header")
    magic, version, n1, n2, n3 = HEADER.unpack_from(buf)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}: not a TNS3 file")
    if version != VERSION:
        raise FormatError(f"unsupported TNS3 version {version}")
    if min(n1, n2, n3) < 1:
        raise FormatError(f"invalid dims {(n1, n2, n3)}")
    count = n1 * n2 * n3
    if count > MAX_ENTRIES:
        raise FormatError(f"dims {(n1, n2, n3)} overflow the addressable size")
    payload = len(buf) - HEADER.size
    if payload < 8 * count:
        raise FormatError(f"truncated payload: {payload} bytes for {count} values")
    if payload > 8 * count:
        raise FormatError(f"{payload - 8 * count} trailing bytes after payload")
    values = np.frombuffer(buf, dtype="<f8", count=count, offset=HEADER.size)
    return Tensor3.from_linear(values.astype(np.float64), (n1, n2, n3))


def save_tensor(x: Tensor3, path) -> None:
    Path(path).write_bytes(tensor_to_bytes(x))


def load_tensor(path) -> Tensor3:
    return tensor_from_bytes(Path(path).read_bytes())


def save_mask(mask: MaskTensor, path) -> None:
    save_tensor(mask.to_tensor(), path)


def load_mask(path) -> MaskTensor:
    return MaskTensor.from_tensor(load_tensor(path))


_TOKEN = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)")


def _parse_header(buf: bytes):
    pos, tokens = 0, []
    for _ in range(4):
        m = _TOKEN.match(buf, pos)
        if not m:
            raise FormatError("truncated PNM header")
        tokens.append(m.group(1))
        pos = m.end()
    # exactly one whitespace byte separates the header from the raster
    return tokens, pos + 1


def decode_image(buf: bytes) -> Tensor3:
    """Binary P5 (gray, ``I3 = 1``) or P6 (RGB, ``I3 = 3``), scaled to [0, 1]."""
    tokens, start = _parse_header(buf)
    kind = tokens[0]
    if kind not in (b"P5", b"P6"):
        raise FormatError(f"unsupported image format {kind!r}; only binary P5/P6")
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise FormatError("malformed PNM header") from None
    if not 0 < maxval <= 255:
        raise FormatError(f"unsupported maxval {maxval}; only 8-bit images")
    channels = 1 if kind == b"P5" else 3
    n = width * height * channels
    raster = np.frombuffer(buf, dtype=np.uint8, count=n, offset=start) if len(buf) - start >= n else None
    if raster is None:
        raise FormatError("truncated image raster")
    img = raster.reshape(height, width, channels).astype(np.float64) / maxval
    return Tensor3(img)


def encode_image(x: Tensor3) -> bytes:
    n1, n2, n3 = x.dims
    if n3 not in (1, 3):
        raise FormatError(f"images need 1 or 3 frontal slices, got {n3}")
    q = np.rint(np.clip(x.data, 0.0, 1.0) * 255).astype(np.uint8)
    kind = b"P5" if n3 == 1 else b"P6"
    return kind + f"\n{n2} {n1}\n255\n".encode() + np.ascontiguousarray(q).tobytes()


def load_image(path) -> Tensor3:
    return decode_image(Path(path).read_bytes())


def save_image(x: Tensor3, path) -> None:
    Path(path).write_bytes(encode_image(x))


def load_frames(directory) -> Tensor3:
    """Stack the numbered ``*.pgm`` frames of a directory along mode 3."""
    def key(name):
        digits = re.findall(r"\d+", name)
        return (int(digits[-1]) if digits else -1, name)

    names = sorted((n for n in os.listdir(directory) if n.lower().endswith(".pgm")), key=key)
    if not names:
        raise FormatError(f"no PGM frames in {directory}")
    frames = [load_image(Path(directory) / n).data[:, :, 0] for n in names]
    if len({f.shape for f in frames}) != 1:
        raise FormatError("frames differ in size")
    return Tensor3(np.stack(frames, axis=2))


def save_frames(x: Tensor3, directory, stem: str = "frame") -> list[Path]:
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    width = max(3, len(str(x.dims[2])))
    paths = []
    for k in range(x.dims[2]):
        p = out / f"{stem}{k + 1:0{width}d}.pgm"
        save_image(Tensor3(x.data[:, :, [k]]), p)
        paths.append(p)
    return paths
