from ._core import (
    add_illumination_ramp,
    add_noise,
    auc,
    bottom_hat,
    bowler_hat,
    closing,
    dilate,
    direction_set,
    erode,
    extract_profile,
    fwhm,
    gaussian_smooth,
    generate_phantom,
    load_volume,
    neuriteness,
    normalize,
    opening,
    psnr,
    roc_curve,
    save_volume,
    top_hat,
    vesselness,
    volume_ratio,
)

__all__ = [
    "add_illumination_ramp",
    "add_noise",
    "auc",
    "bottom_hat",
    "bowler_hat",
    "closing",
    "dilate",
    "direction_set",
    "erode",
    "extract_profile",
    "fwhm",
    "gaussian_smooth",
    "generate_phantom",
    "load_volume",
    "neuriteness",
    "normalize",
    "opening",
    "psnr",
    "roc_curve",
    "save_volume",
    "top_hat",
    "vesselness",
    "volume_ratio",
]
