"""Learned dynamic sparse sampling (SLADS-Net) bindings."""

from ._slads import (
    DimensionError,
    ErdModel,
    IdwParams,
    MeasurementSet,
    distortion,
    extract_features,
    fit_linear,
    load_image,
    load_model,
    psnr,
    reconstruct,
    run_sampling,
    save_image,
    synth,
    train,
    training_database,
)

__all__ = [
    "DimensionError",
    "ErdModel",
    "IdwParams",
    "MeasurementSet",
    "distortion",
    "extract_features",
    "fit_linear",
    "load_image",
    "load_model",
    "psnr",
    "reconstruct",
    "run_sampling",
    "save_image",
    "synth",
    "train",
    "training_database",
]
