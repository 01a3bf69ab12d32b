"""Image-to-feature extraction front end.

Runs a frozen vision backbone over an image manifest and writes the feature
vectors in the binary feature-file format consumed by the streamridge
engine. The backbone is inference-only and never fine-tuned.
"""

from .backbones import available_backbones, build_backbone
from .extract import extract
from .manifest import ManifestError, ManifestRow, read_manifest
from .writer import write_features

__version__ = "0.1.0"

__all__ = [
    "available_backbones",
    "build_backbone",
    "extract",
    "ManifestError",
    "ManifestRow",
    "read_manifest",
    "write_features",
]
