"""Chaos-based color image cipher: 3D Arnold scrambling plus hyper-chaotic CBC XOR."""
from .arnold import ArnoldParams, NonSquareImageError, derive_params, scramble, unscramble
from .cipher import CipherKey, decrypt, encrypt
from .hyperchaos import DEMO_PARAMS, PAPER_REFERENCE, ChaosParams, TrajectoryDivergedError, generate_keystreams
from .imagecore import ColorImage, ImageFormatError, load_image, save_image

__all__ = [
    "ArnoldParams",
    "ChaosParams",
    "CipherKey",
    "ColorImage",
    "DEMO_PARAMS",
    "ImageFormatError",
    "NonSquareImageError",
    "PAPER_REFERENCE",
    "TrajectoryDivergedError",
    "decrypt",
    "derive_params",
    "encrypt",
    "generate_keystreams",
    "load_image",
    "save_image",
    "scramble",
    "unscramble",
]
