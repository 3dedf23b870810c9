"""Shared fixtures: synthetic face datasets written as PGM trees."""

from __future__ import annotations

from pathlib import Path

import pytest

from hogface.datasets import LabeledImage
from hogface.demo import (make_labeled_images, synthetic_face,  # noqa: F401
                          synthetic_variant, write_dataset_tree)


@pytest.fixture(scope="session")
def small_dataset() -> list[LabeledImage]:
    """5 persons x 4 images, in memory."""
    return make_labeled_images(seed=7, persons=5, per_person=4)


@pytest.fixture(scope="session")
def orl_like_root(tmp_path_factory) -> Path:
    """5x4 synthetic dataset on disk in the orl directory layout."""
    images = make_labeled_images(seed=7, persons=5, per_person=4)
    return write_dataset_tree(images, tmp_path_factory.mktemp("orl_like"), "orl")
