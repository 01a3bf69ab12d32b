"""Frozen vision backbones and their preprocessing.

Each backbone yields the pre-classification-head embedding: the class-token
representation for transformer encoders, the pooled features for residual
nets, and a small deterministic convolutional encoder ("tiny") for tests
and golden fixtures where no pretrained weights are reachable.

Weights modes: "pretrained" uses torchvision's default weights (requires
the weight files to be obtainable); "none" initializes randomly under a
fixed torch seed, which keeps runs reproducible offline.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import torch
from PIL import Image
from torch import nn
from torchvision import models, transforms

TINY_INPUT_SIZE = 64
IMAGENET_MEAN = [0.485, 0.456, 0.406]
IMAGENET_STD = [0.229, 0.224, 0.225]


class TinyEncoder(nn.Module):
    """Two strided convolutions and a global average pool; 32-wide output."""

    def __init__(self):
        super().__init__()
        self.body = nn.Sequential(
            nn.Conv2d(3, 16, kernel_size=3, stride=2, padding=1),
            nn.ReLU(),
            nn.Conv2d(16, 32, kernel_size=3, stride=2, padding=1),
            nn.ReLU(),
            nn.AdaptiveAvgPool2d(1),
            nn.Flatten(),
        )

    def forward(self, x):
        return self.body(x)


@dataclass
class Backbone:
    name: str
    model: nn.Module
    feature_width: int
    preprocess: Callable[[Image.Image], torch.Tensor]
    preprocess_info: dict


def _imagenet_eval_transform(resize: int, crop: int):
    return transforms.Compose(
        [
            transforms.Resize(resize),
            transforms.CenterCrop(crop),
            transforms.ToTensor(),
            transforms.Normalize(mean=IMAGENET_MEAN, std=IMAGENET_STD),
        ]
    )


def _tiny_transform():
    return transforms.Compose(
        [
            transforms.Resize((TINY_INPUT_SIZE, TINY_INPUT_SIZE)),
            transforms.ToTensor(),
        ]
    )


def available_backbones() -> list[str]:
    return ["tiny", "vit_b_16", "vit_l_16", "resnet18", "resnet50"]


def build_backbone(name: str, weights: str = "pretrained", seed: int = 0) -> Backbone:
    """Construct a frozen, eval-mode backbone by id."""
    if weights not in ("pretrained", "none"):
        raise ValueError(f"weights must be 'pretrained' or 'none', got {weights!r}")

    if name == "tiny":
        torch.manual_seed(seed)
        model = TinyEncoder()
        width = 32
        preprocess = _tiny_transform()
        info = {
            "resize": [TINY_INPUT_SIZE, TINY_INPUT_SIZE],
            "crop": None,
            "normalize": None,
            "scale": "0-1",
        }
    elif name.startswith("vit_"):
        torch.manual_seed(seed)
        weight_enum = "DEFAULT" if weights == "pretrained" else None
        model = models.get_model(name, weights=weight_enum)
        width = model.hidden_dim
        # the class-token embedding is the feature: drop the head
        model.heads = nn.Identity()
        preprocess = _imagenet_eval_transform(resize=256, crop=224)
        info = {
            "resize": 256,
            "crop": 224,
            "normalize": {"mean": IMAGENET_MEAN, "std": IMAGENET_STD},
        }
    elif name.startswith("resnet"):
        torch.manual_seed(seed)
        weight_enum = "DEFAULT" if weights == "pretrained" else None
        model = models.get_model(name, weights=weight_enum)
        width = model.fc.in_features
        model.fc = nn.Identity()
        preprocess = _imagenet_eval_transform(resize=256, crop=224)
        info = {
            "resize": 256,
            "crop": 224,
            "normalize": {"mean": IMAGENET_MEAN, "std": IMAGENET_STD},
        }
    else:
        raise ValueError(
            f"unknown backbone {name!r}; available: {available_backbones()}"
        )

    model.eval()
    for p in model.parameters():
        p.requires_grad_(False)
    return Backbone(
        name=name,
        model=model,
        feature_width=width,
        preprocess=preprocess,
        preprocess_info=info,
    )
