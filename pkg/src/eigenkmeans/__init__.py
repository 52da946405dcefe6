"""Eigenface feature extraction with mean-shift (modified k-means) face identification."""

__version__ = "0.1.0"

from .imageio import GrayImage, encode_pgm, load_pgm, read_pgm, vectorize, write_pgm
from .persistence import load_model, save_model
from .recognizer import RecognitionResult, Verdict, recognize
from .trainer import EigenModel, TrainerConfig, TrainingSet, train

__all__ = [
    "GrayImage",
    "encode_pgm",
    "load_pgm",
    "read_pgm",
    "vectorize",
    "write_pgm",
    "EigenModel",
    "TrainerConfig",
    "TrainingSet",
    "train",
    "RecognitionResult",
    "Verdict",
    "recognize",
    "save_model",
    "load_model",
]
