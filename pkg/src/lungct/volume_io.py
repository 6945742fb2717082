"""MetaImage (.mhd/.mha) I/O and 2D slice-dataset export.

Only the uncompressed MetaImage subset that LUNA16 uses is supported:
3-D images, element types MET_SHORT / MET_UCHAR / MET_FLOAT, raw data either
in a sidecar file or inline (ElementDataFile = LOCAL).  Direction cosines
(TransformMatrix) are ignored with a warning; all downstream mask algebra
works in index space scaled by spacing, so orientation does not matter here.
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass

import numpy as np

from .core import Geometry, Mask3D, Volume3D
from .errors import (
    CompressedDataUnsupported,
    GeometryMismatch,
    IoFailure,
    MissingHeaderKey,
    RangeOverflow,
    SizeMismatch,
    UnsupportedElementType,
)

log = logging.getLogger(__name__)

_ELEMENT_DTYPES = {
    "MET_SHORT": np.dtype("<i2"),
    "MET_UCHAR": np.dtype("u1"),
    "MET_FLOAT": np.dtype("<f4"),
}

_TYPE_NAMES = {"short": "MET_SHORT", "uchar": "MET_UCHAR", "float": "MET_FLOAT"}

_INT_RANGES = {"short": (-32768, 32767), "uchar": (0, 255)}


def _parse_header(path: str) -> tuple[dict[str, str], bytes | None]:
    """Return header key/value pairs plus inline raw bytes for LOCAL data."""
    header: dict[str, str] = {}
    inline = None
    with open(path, "rb") as fh:
        while True:
            line = fh.readline()
            if not line:
                break
            text = line.decode("ascii", errors="replace").strip()
            if not text:
                continue
            if "=" not in text:
                raise IoFailure(f"malformed header line in {path}: {text!r}")
            key, value = (part.strip() for part in text.split("=", 1))
            header[key] = value
            if key == "ElementDataFile":
                if value.upper() == "LOCAL":
                    inline = fh.read()
                break  # ElementDataFile is by convention the last key
    return header, inline


def _require(header: dict[str, str], key: str) -> str:
    if key not in header:
        raise MissingHeaderKey(f"required MetaImage key missing: {key}")
    return header[key]


def _as_bool(value: str) -> bool:
    return value.strip().lower() == "true"


def read_volume(path: str) -> Volume3D:
    """Read a MetaImage volume into HU-valued scalars."""
    header, inline = _parse_header(path)

    ndims = int(header.get("NDims", "3"))
    if ndims != 3:
        raise IoFailure(f"only NDims = 3 supported, got {ndims}")
    if _as_bool(header.get("CompressedData", "False")):
        raise CompressedDataUnsupported(f"{path}: CompressedData not supported")
    if "TransformMatrix" in header:
        log.warning("%s: TransformMatrix present; direction cosines are ignored", path)

    dims = tuple(int(v) for v in _require(header, "DimSize").split())
    spacing = tuple(float(v) for v in header.get("ElementSpacing", "1 1 1").split())
    origin = tuple(float(v) for v in header.get("Offset", "0 0 0").split())
    geometry = Geometry(dims=dims, spacing=spacing, origin=origin)

    elem_type = _require(header, "ElementType")
    if elem_type not in _ELEMENT_DTYPES:
        raise UnsupportedElementType(f"unsupported ElementType {elem_type}")
    dtype = _ELEMENT_DTYPES[elem_type]

    msb = _as_bool(
        header.get("BinaryDataByteOrderMSB", header.get("ElementByteOrderMSB", "False"))
    )
    if msb:
        dtype = dtype.newbyteorder(">")

    datafile = _require(header, "ElementDataFile")
    if inline is not None:
        raw = inline
    else:
        raw_path = os.path.join(os.path.dirname(path), datafile)
        try:
            with open(raw_path, "rb") as fh:
                raw = fh.read()
        except OSError as exc:
            raise IoFailure(f"cannot read raw data {raw_path}: {exc}") from exc

    expected = geometry.voxel_count * dtype.itemsize
    if len(raw) < expected or (inline is None and len(raw) != expected):
        raise SizeMismatch(
            f"{datafile}: expected {expected} bytes, found {len(raw)}"
        )
    values = np.frombuffer(raw[:expected], dtype=dtype).astype(np.float64)
    return Volume3D(geometry=geometry, values=values)


def _round_half_away(values: np.ndarray) -> np.ndarray:
    return np.copysign(np.floor(np.abs(values) + 0.5), values)


def write_volume(vol: Volume3D, path: str, element_type: str = "float") -> None:
    """Write a MetaImage header + raw pair.  `element_type` in {short, uchar, float}."""
    if element_type not in _TYPE_NAMES:
        raise ValueError(f"element_type must be short, uchar or float, got {element_type}")

    flat = vol.values.ravel()
    if element_type == "float":
        payload = flat.astype("<f4")
    else:
        lo, hi = _INT_RANGES[element_type]
        rounded = _round_half_away(flat)
        if rounded.min() < lo or rounded.max() > hi:
            raise RangeOverflow(
                f"values outside [{lo}, {hi}] after rounding for {element_type}"
            )
        payload = rounded.astype(_ELEMENT_DTYPES[_TYPE_NAMES[element_type]])

    base, _ = os.path.splitext(path)
    raw_name = os.path.basename(base) + ".raw"
    header = (
        "ObjectType = Image\n"
        "NDims = 3\n"
        "BinaryData = True\n"
        "BinaryDataByteOrderMSB = False\n"
        "CompressedData = False\n"
        f"DimSize = {' '.join(str(d) for d in vol.geometry.dims)}\n"
        f"ElementSpacing = {' '.join(repr(s) for s in vol.geometry.spacing)}\n"
        f"Offset = {' '.join(repr(o) for o in vol.geometry.origin)}\n"
        f"ElementType = {_TYPE_NAMES[element_type]}\n"
        f"ElementDataFile = {raw_name}\n"
    )
    try:
        with open(path, "w") as fh:
            fh.write(header)
        with open(os.path.join(os.path.dirname(path), raw_name), "wb") as fh:
            fh.write(payload.tobytes())
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def volume_to_mask(vol: Volume3D, threshold: float) -> Mask3D:
    """Binarize a label/scalar volume: bit set where value > threshold."""
    return Mask3D(geometry=vol.geometry, bits=vol.values > threshold)


def read_mask(path: str, threshold: float = 0.5) -> Mask3D:
    """Read a label volume and binarize at `threshold`."""
    return volume_to_mask(read_volume(path), threshold)


def write_mask(mask: Mask3D, path: str) -> None:
    """Store a mask as a MET_UCHAR label volume."""
    write_volume(
        Volume3D(geometry=mask.geometry, values=mask.bits.astype(np.float64)),
        path,
        element_type="uchar",
    )


@dataclass
class SliceDatasetManifest:
    """Index of exported (image, mask) slice pairs plus the HU window used."""

    entries: list[dict]
    hu_window: tuple[float, float]
    format_version: int = 1

    def to_json(self) -> dict:
        return {
            "format_version": self.format_version,
            "hu_window": list(self.hu_window),
            "entries": self.entries,
        }


def export_slice_dataset(
    ct: Volume3D,
    mask: Mask3D,
    out_dir: str,
    hu_window: tuple[float, float] = (-1000.0, 400.0),
) -> SliceDatasetManifest:
    """Write one raw-float32 image and mask file per axial (z) slice.

    Image values are mapped affinely from [low, high] HU to [0, 1] and
    clamped; mask slices are written as 0/1 floats.  A manifest.json in
    `out_dir` lists all pairs in z order.
    """
    ct.geometry.require_compatible(mask.geometry)
    low, high = float(hu_window[0]), float(hu_window[1])
    if not low < high:
        raise ValueError(f"hu_window low must be < high, got {hu_window}")

    os.makedirs(out_dir, exist_ok=True)
    nx, ny, nz = ct.geometry.dims
    scaled = np.clip((ct.values - low) / (high - low), 0.0, 1.0).astype("<f4")
    mask_f = mask.bits.astype("<f4")

    entries = []
    try:
        for z in range(nz):
            image_path = f"slice_{z:04d}_image.raw"
            mask_path = f"slice_{z:04d}_mask.raw"
            with open(os.path.join(out_dir, image_path), "wb") as fh:
                fh.write(scaled[z].tobytes())
            with open(os.path.join(out_dir, mask_path), "wb") as fh:
                fh.write(mask_f[z].tobytes())
            entries.append(
                {
                    "slice_id": z,
                    "image_path": image_path,
                    "mask_path": mask_path,
                    "height": ny,
                    "width": nx,
                }
            )
        manifest = SliceDatasetManifest(entries=entries, hu_window=(low, high))
        with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
            json.dump(manifest.to_json(), fh, indent=2)
    except OSError as exc:
        raise IoFailure(f"cannot write slice dataset to {out_dir}: {exc}") from exc
    return manifest
