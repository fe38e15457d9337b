"""PNG loading/saving, the raw map dump format and deterministic JSON/CSV."""

from __future__ import annotations

import json
import math
import struct
from pathlib import Path

import numpy as np
from PIL import Image

RAW_HEADER = struct.Struct("<II")


class ImageFormatError(ValueError):
    pass


def load_png(path) -> np.ndarray:
    """Read an 8-bit gray or RGB PNG as ``uint8`` of shape (h, w) or (h, w, 3)."""
    path = Path(path)
    try:
        img = Image.open(path)
        img.load()
    except (OSError, SyntaxError) as exc:
        raise ImageFormatError(f"cannot read image {path}: {exc}") from exc
    if img.format != "PNG":
        raise ImageFormatError(f"{path}: only PNG input is supported, got {img.format}")
    mode = img.mode
    if mode in ("I;16", "I;16B", "I;16L", "I", "F"):
        raise ImageFormatError(f"{path}: 16-bit and float images are not supported "
                               f"(mode {mode}); convert to 8-bit first")
    if mode == "1":
        img = img.convert("L")
    elif mode == "P":
        img = img.convert("RGB")
    elif mode in ("LA", "RGBA"):
        arr = np.asarray(img)
        if not np.all(arr[..., -1] == 255):
            raise ImageFormatError(f"{path}: images with transparency are not supported")
        img = img.convert("L" if mode == "LA" else "RGB")
    elif mode not in ("L", "RGB"):
        raise ImageFormatError(f"{path}: unsupported PNG mode {mode}")
    return np.array(img, dtype=np.uint8)


def to_uint8(values: np.ndarray) -> np.ndarray:
    """Scale ``[0, 1]`` floats to 8-bit, rounding halves up."""
    v = np.clip(np.asarray(values, dtype=np.float64), 0.0, 1.0)
    return np.floor(v * 255.0 + 0.5).astype(np.uint8)


def save_png(path, array: np.ndarray) -> Path:
    """Write a ``uint8`` gray or RGB array, or a float array in ``[0, 1]``."""
    arr = np.asarray(array)
    if arr.dtype != np.uint8:
        arr = to_uint8(arr)
    path = Path(path)
    Image.fromarray(arr).save(path, format="PNG")
    return path


def write_raw_map(path, values: np.ndarray) -> Path:
    """Width and height as little-endian uint32, then row-major little-endian float64."""
    v = np.asarray(values, dtype="<f8")
    if v.ndim != 2:
        raise ValueError("raw dumps hold 2D maps")
    h, w = v.shape
    path = Path(path)
    path.write_bytes(RAW_HEADER.pack(w, h) + np.ascontiguousarray(v).tobytes())
    return path


def read_raw_map(path) -> np.ndarray:
    data = Path(path).read_bytes()
    w, h = RAW_HEADER.unpack_from(data)
    body = data[RAW_HEADER.size:]
    if len(body) != 8 * w * h:
        raise ValueError(f"{path}: expected {w}x{h} doubles, found {len(body)} bytes")
    return np.frombuffer(body, dtype="<f8").reshape(h, w).astype(np.float64)


def format_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON with insertion-ordered keys and floats at 17 significant digits.

    Non-finite floats become the strings ``"nan"``, ``"inf"``, ``"-inf"``.
    """
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{_string(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(float(obj))
    if isinstance(obj, (str, Path)):
        return _string(str(obj))
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _string(s: str) -> str:
    return json.dumps(s)


def write_json(path, obj) -> Path:
    path = Path(path)
    path.write_text(dumps(obj) + "\n", encoding="utf-8")
    return path


def write_csv(path, header: tuple[str, ...], rows) -> Path:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format(float(v), ".17g") for v in row))
    path = Path(path)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
