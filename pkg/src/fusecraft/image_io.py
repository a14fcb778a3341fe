"""8-bit grayscale images: loading, saving, alignment, and reshaping.

Supported raster formats are binary PGM (P5, maxval up to 255) and PNG
(8-bit grayscale or RGB; color is reduced with 0.299/0.587/0.114 luma
weights). The file extension selects the codec.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    CorruptDataError,
    LengthMismatchError,
    UnsupportedFormatError,
)

LUMA_WEIGHTS = (0.299, 0.587, 0.114)


def _round_half_up(values: np.ndarray) -> np.ndarray:
    # np.rint rounds halves to even; the package convention is half-up.
    return np.floor(np.asarray(values, dtype=np.float64) + 0.5)


@dataclass(frozen=True, eq=False)
class Image:
    """Immutable 2-D grayscale raster with pixel values in [0, 255]."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"image must be 2-D and non-empty, got shape {arr.shape}")
        if arr.dtype != np.uint8:
            if arr.dtype.kind not in "iu":
                raise ValueError(f"pixel values must be integers, got dtype {arr.dtype}")
            if arr.size and (arr.min() < 0 or arr.max() > 255):
                raise ValueError("pixel values must lie in [0, 255]")
        arr = arr.astype(np.uint8, copy=True)
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def pixels(self) -> np.ndarray:
        """Row-major flat view of the pixel values."""
        return self.data.reshape(-1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Image):
            return NotImplemented
        return self.data.shape == other.data.shape and bool(
            np.array_equal(self.data, other.data)
        )

    def __hash__(self):
        return hash((self.data.shape, self.data.tobytes()))

    def __repr__(self) -> str:
        return f"Image({self.rows}x{self.cols})"

    @classmethod
    def from_rows(cls, rows_of_pixels) -> "Image":
        return cls(np.asarray(rows_of_pixels))

    @classmethod
    def filled(cls, rows: int, cols: int, value: int) -> "Image":
        return cls(np.full((rows, cols), value, dtype=np.uint8))


@dataclass(frozen=True, eq=False)
class PixelColumn:
    """Row-major flattening of an image, possibly with fractional values."""

    values: np.ndarray
    source_rows: int
    source_cols: int

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64).reshape(-1)
        if self.source_rows < 1 or self.source_cols < 1:
            raise ValueError("source dimensions must be positive")
        if vals.size != self.source_rows * self.source_cols:
            raise LengthMismatchError(
                f"{vals.size} values cannot fill a "
                f"{self.source_rows}x{self.source_cols} image"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("pixel column values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return self.values.size


def to_column(img: Image) -> PixelColumn:
    """Flatten an image to a column of rows*cols values, row-major."""
    return PixelColumn(img.pixels.astype(np.float64), img.rows, img.cols)


def from_column(col: PixelColumn) -> Image:
    """Reshape a column back to an image, rounding half-up and clamping."""
    vals = _round_half_up(col.values)
    vals = np.clip(vals, 0, 255).astype(np.uint8)
    return Image(vals.reshape(col.source_rows, col.source_cols))


def crop_to_common(a: Image, b: Image) -> tuple[Image, Image]:
    """Crop both images to their shared top-left window.

    Output dimensions are (min rows, min cols); equal-sized inputs pass
    through unchanged.
    """
    rows = min(a.rows, b.rows)
    cols = min(a.cols, b.cols)
    if (rows, cols) == (a.rows, a.cols) and (rows, cols) == (b.rows, b.cols):
        return a, b
    return Image(a.data[:rows, :cols]), Image(b.data[:rows, :cols])


# ---------------------------------------------------------------------------
# PGM (P5) codec


def _encode_pgm(img: Image) -> bytes:
    header = f"P5\n{img.cols} {img.rows}\n255\n".encode("ascii")
    return header + img.data.tobytes()


def _pgm_tokens(buf: bytes):
    """Yield whitespace-separated header tokens, skipping # comments."""
    pos = 0
    while pos < len(buf):
        ch = buf[pos : pos + 1]
        if ch.isspace():
            pos += 1
        elif ch == b"#":
            end = buf.find(b"\n", pos)
            pos = len(buf) if end < 0 else end + 1
        else:
            end = pos
            while end < len(buf) and not buf[end : end + 1].isspace():
                end += 1
            yield buf[pos:end], end
            pos = end


def _decode_pgm(buf: bytes) -> Image:
    tokens = _pgm_tokens(buf)
    try:
        magic, _ = next(tokens)
    except StopIteration:
        raise CorruptDataError("empty PGM file") from None
    if magic != b"P5":
        raise UnsupportedFormatError(f"expected P5 magic, got {magic!r}")
    fields = []
    end = 0
    for _ in range(3):
        try:
            tok, end = next(tokens)
            fields.append(int(tok))
        except (StopIteration, ValueError):
            raise CorruptDataError("malformed PGM header") from None
    cols, rows, maxval = fields
    if rows < 1 or cols < 1:
        raise CorruptDataError(f"bad PGM dimensions {rows}x{cols}")
    if not 1 <= maxval <= 255:
        raise UnsupportedFormatError(f"only 8-bit PGM is supported, maxval={maxval}")
    raster = buf[end + 1 :]
    if len(raster) < rows * cols:
        raise CorruptDataError(
            f"PGM raster holds {len(raster)} bytes, needs {rows * cols}"
        )
    pixels = np.frombuffer(raster[: rows * cols], dtype=np.uint8)
    return Image(pixels.reshape(rows, cols))


# ---------------------------------------------------------------------------
# PNG codec (via Pillow)


def _rgb_to_gray(rgb: np.ndarray) -> np.ndarray:
    r, g, b = LUMA_WEIGHTS
    luma = r * rgb[..., 0] + g * rgb[..., 1] + b * rgb[..., 2]
    return np.clip(_round_half_up(luma), 0, 255).astype(np.uint8)


def _decode_png(buf: bytes) -> Image:
    from PIL import Image as PilImage, UnidentifiedImageError

    try:
        with PilImage.open(io.BytesIO(buf)) as pil:
            pil.load()
            mode = pil.mode
            if mode in ("P", "PA"):
                pil = pil.convert("RGBA" if "transparency" in pil.info else "RGB")
                mode = pil.mode
            if mode == "L":
                return Image(np.asarray(pil))
            if mode == "LA":
                return Image(np.asarray(pil)[..., 0])
            if mode in ("RGB", "RGBA"):
                return Image(_rgb_to_gray(np.asarray(pil)[..., :3].astype(np.float64)))
    except UnidentifiedImageError as exc:
        raise CorruptDataError(f"not a decodable PNG: {exc}") from exc
    except OSError as exc:
        raise CorruptDataError(f"truncated or damaged PNG: {exc}") from exc
    raise UnsupportedFormatError(f"unsupported PNG pixel mode {mode!r}")


def _encode_png(img: Image) -> bytes:
    from PIL import Image as PilImage

    out = io.BytesIO()
    PilImage.fromarray(img.data, mode="L").save(out, format="PNG")
    return out.getvalue()


_CODECS = {
    ".pgm": (_decode_pgm, _encode_pgm),
    ".png": (_decode_png, _encode_png),
}


def load_image(path) -> Image:
    """Read a PGM or PNG file as a grayscale image."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such image file: {path}")
    codec = _CODECS.get(path.suffix.lower())
    if codec is None:
        raise UnsupportedFormatError(
            f"unsupported extension {path.suffix!r} (expected .pgm or .png)"
        )
    return codec[0](path.read_bytes())


def save_image(img: Image, path) -> None:
    """Write an image to a PGM or PNG file, chosen by extension."""
    path = Path(path)
    codec = _CODECS.get(path.suffix.lower())
    if codec is None:
        raise UnsupportedFormatError(
            f"unsupported extension {path.suffix!r} (expected .pgm or .png)"
        )
    path.write_bytes(codec[1](img))
