"""Image, feature-tensor and manifest I/O.

Images live in memory as float64 arrays of shape ``(C, H, W)`` with values in
``[0, 1]``; feature maps as float64 ``(C, H, W)`` arrays. Feature tensors are
exchanged as ``.npy`` files.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.lib import format as npy_format
from PIL import Image, UnidentifiedImageError

MODES = ("image", "feature")


class FormatError(ValueError):
    """A file exists but does not hold data in a supported layout."""


class ManifestError(ValueError):
    """A manifest line is malformed."""


@dataclass(frozen=True)
class ManifestEntry:
    mode: str
    source_path: Path
    styled_path: Path
    output_path: Path
    entry_index: int


def validate_image(img: np.ndarray, name: str = "image") -> np.ndarray:
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 3:
        raise ValueError(f"{name} must have shape (C, H, W), got {img.shape}")
    c, h, w = img.shape
    if c not in (1, 3):
        raise ValueError(f"{name} must have 1 or 3 channels, got {c}")
    if h < 1 or w < 1:
        raise ValueError(f"{name} has empty spatial size {h}x{w}")
    if not np.all(np.isfinite(img)):
        raise ValueError(f"{name} contains non-finite values")
    return img


def validate_feature_map(fmap: np.ndarray, name: str = "feature map") -> np.ndarray:
    fmap = np.asarray(fmap, dtype=np.float64)
    if fmap.ndim != 3:
        raise ValueError(f"{name} must have shape (C, H, W), got {fmap.shape}")
    c, h, w = fmap.shape
    if c < 1:
        raise ValueError(f"{name} has no channels")
    if h * w < 2:
        raise ValueError(f"{name} needs at least 2 spatial positions per channel, got {h}x{w}")
    if not np.all(np.isfinite(fmap)):
        raise ValueError(f"{name} contains non-finite values")
    return fmap


def load_image(path) -> np.ndarray:
    """Read an 8-bit grayscale or RGB image as a ``(C, H, W)`` array in [0, 1]."""
    path = Path(path)
    try:
        with Image.open(path) as im:
            mode = im.mode
            if mode not in ("L", "RGB"):
                raise FormatError(
                    f"{path}: unsupported image mode {mode!r} (need 8-bit L or RGB)"
                )
            pixels = np.asarray(im, dtype=np.uint8)
    except UnidentifiedImageError as exc:
        raise FormatError(f"{path}: not a decodable image") from exc
    if pixels.ndim == 2:
        pixels = pixels[None, :, :]
    else:
        pixels = np.moveaxis(pixels, -1, 0)
    return pixels.astype(np.float64) / 255.0


def quantize(img: np.ndarray) -> np.ndarray:
    """Clamp to [0, 1] and map to bytes with round-half-up."""
    v = np.clip(np.asarray(img, dtype=np.float64), 0.0, 1.0)
    return np.floor(v * 255.0 + 0.5).astype(np.uint8)


def save_image(img: np.ndarray, path) -> None:
    img = validate_image(img)
    data = quantize(img)
    if data.shape[0] == 1:
        im = Image.fromarray(data[0])
    else:
        im = Image.fromarray(np.ascontiguousarray(np.moveaxis(data, 0, -1)))
    im.save(path, format="PNG")


def load_tensor(path) -> np.ndarray:
    """Read a float ``.npy`` feature tensor of shape (C,H,W) or (1,C,H,W) as float64."""
    path = Path(path)
    with open(path, "rb") as fh:
        try:
            version = npy_format.read_magic(fh)
        except ValueError as exc:
            raise FormatError(f"{path}: not an NPY file ({exc})") from exc
        if version == (1, 0):
            shape, fortran_order, dtype = npy_format.read_array_header_1_0(fh)
        elif version == (2, 0):
            shape, fortran_order, dtype = npy_format.read_array_header_2_0(fh)
        else:
            raise FormatError(f"{path}: unsupported NPY version {version}")
        if fortran_order:
            raise FormatError(f"{path}: Fortran-order arrays are not supported")
        if dtype.kind != "f":
            raise FormatError(f"{path}: expected a float dtype, got {dtype.str}")
        if dtype.itemsize not in (4, 8):
            raise FormatError(f"{path}: expected float32 or float64, got {dtype.str}")
        if dtype.byteorder == ">":
            raise FormatError(f"{path}: big-endian data is not supported")
        if len(shape) not in (3, 4):
            raise FormatError(f"{path}: expected rank 3 or 4, got rank {len(shape)}")
        if len(shape) == 4 and shape[0] != 1:
            raise FormatError(f"{path}: rank-4 tensors must have batch size 1, got {shape[0]}")
        count = int(np.prod(shape))
        raw = fh.read(count * dtype.itemsize)
    if len(raw) != count * dtype.itemsize:
        raise FormatError(f"{path}: truncated payload")
    data = np.frombuffer(raw, dtype=dtype.newbyteorder("<")).reshape(shape)
    if len(shape) == 4:
        data = data[0]
    return validate_feature_map(data.astype(np.float64), name=str(path))


def save_tensor(fmap: np.ndarray, path) -> None:
    """Write ``fmap`` as NPY v1.0, little-endian float32, C order."""
    fmap = validate_feature_map(fmap)
    arr = np.ascontiguousarray(fmap, dtype="<f4")
    with open(path, "wb") as fh:
        npy_format.write_array(fh, arr, version=(1, 0), allow_pickle=False)


def parse_manifest(path) -> list[ManifestEntry]:
    """Parse a JSON-lines manifest.

    ``entry_index`` is the zero-based physical line number, so blank and
    ``#`` comment lines still advance it. Relative paths resolve against the
    manifest's directory.
    """
    path = Path(path)
    base = path.parent
    entries = []
    outputs = {}
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    for index, line in enumerate(lines):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            obj = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ManifestError(f"malformed JSON at line {index}: {exc.msg}") from exc
        if not isinstance(obj, dict):
            raise ManifestError(f"line {index} is not a JSON object")
        missing = [k for k in ("mode", "source", "styled", "output") if k not in obj]
        if missing:
            raise ManifestError(f"missing keys {missing} at line {index}")
        mode = obj["mode"]
        if mode not in MODES:
            raise ManifestError(f"unknown mode {mode!r} at line {index}")
        paths = []
        for key in ("source", "styled", "output"):
            value = obj[key]
            if not isinstance(value, str) or not value:
                raise ManifestError(f"key {key!r} must be a non-empty string at line {index}")
            paths.append(base / value)
        out = os.path.normpath(paths[2])
        if out in outputs:
            raise ManifestError(
                f"output {obj['output']!r} at line {index} duplicates line {outputs[out]}"
            )
        outputs[out] = index
        entries.append(ManifestEntry(mode, paths[0], paths[1], paths[2], index))
    return entries
