"""End-to-end fusion of two aligned grayscale images.

Both pipelines are strictly pointwise: after cropping to the common
window, each fused pixel depends only on the co-located pixel pair and
the (immutable) engine, so runs are deterministic and order-free.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._version import __version__
from .anfis import (
    AnfisSettings,
    TrainingReport,
    default_training_data,
    grid_partition,
    predict,
    train_hybrid,
)
from .config import config_digest, engine_to_doc
from .errors import ConfigError
from .fuzzy import MamdaniFis, evaluate, evaluate_lut
from .image_io import Image, PixelColumn, crop_to_common, from_column, to_column

#: pixel count above which fuzzy fusion precomputes the 256x256 table
LUT_THRESHOLD = 4096


def fuse_fuzzy(a: Image, b: Image, fis: MamdaniFis, use_lut: bool | None = None) -> Image:
    """Fuse per pixel through a Mamdani engine.

    use_lut=None picks the table for large images; both paths produce
    bit-identical results because 8-bit inputs only ever hit the 65536
    integer pairs the table holds.
    """
    ac, bc = crop_to_common(a, b)
    if use_lut is None:
        use_lut = ac.rows * ac.cols >= LUT_THRESHOLD
    if use_lut:
        table = evaluate_lut(fis)
        fused = table[ac.pixels.astype(np.intp), bc.pixels.astype(np.intp)]
    else:
        fused = np.array(
            [
                evaluate(fis, float(x1), float(x2))
                for x1, x2 in zip(ac.pixels, bc.pixels)
            ]
        )
    return from_column(PixelColumn(fused, ac.rows, ac.cols))


def fuse_neuro_fuzzy(a: Image, b: Image, settings: AnfisSettings | None = None):
    """Train a Sugeno engine on synthetic data, then map the pixel pairs.

    Returns (fused image, training report). The engine is trained once
    per call on the preset target (identity by default) and applied to
    the two cropped images in column form; outputs are rounded and
    clamped on reshaping.
    """
    settings = settings or AnfisSettings()
    ac, bc = crop_to_common(a, b)
    model = grid_partition(settings.n_mfs, settings.shape)
    data = default_training_data(settings.target)
    trained, report = train_hybrid(model, data, settings.epochs, settings.step_size)
    pairs = np.column_stack([to_column(ac).values, to_column(bc).values])
    outputs = predict(trained, pairs)
    return from_column(PixelColumn(outputs, ac.rows, ac.cols)), report


@dataclass(frozen=True)
class FusionJob:
    """One fusion request binding a method, its engine config, and inputs."""

    method: str
    engine: object
    a: Image
    b: Image
    notes: tuple = ()

    def __post_init__(self):
        expected = {"fuzzy": MamdaniFis, "anfis": AnfisSettings}.get(self.method)
        if expected is None:
            raise ConfigError(f"unknown fusion method {self.method!r}")
        if not isinstance(self.engine, expected):
            raise ConfigError(
                f"method {self.method!r} needs a {expected.__name__} engine config, "
                f"got {type(self.engine).__name__}"
            )
        object.__setattr__(self, "notes", tuple(self.notes))


def run_job(job: FusionJob):
    """Dispatch a job; returns (fused image, provenance record).

    The provenance record is a plain JSON-serializable dict capturing
    the engine description, its digest, and the training report, so the
    run is reproducible from the sidecar alone.
    """
    report: TrainingReport | None = None
    if job.method == "fuzzy":
        fused = fuse_fuzzy(job.a, job.b, job.engine)
    else:
        fused, report = fuse_neuro_fuzzy(job.a, job.b, job.engine)
    provenance = {
        "tool": "fusecraft",
        "tool_version": __version__,
        "method": job.method,
        "engine": engine_to_doc(job.engine),
        "config_sha256": config_digest(job.engine),
        "input_dims": {"a": [job.a.rows, job.a.cols], "b": [job.b.rows, job.b.cols]},
        "output_dims": [fused.rows, fused.cols],
        "training": report.to_dict() if report is not None else None,
        "notes": list(job.notes),
    }
    return fused, provenance
