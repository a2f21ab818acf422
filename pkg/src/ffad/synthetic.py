"""Seeded synthetic two-class sinusoid data for tests and demos.

Class 0 and class 1 draw their fundamental frequencies from disjoint bands,
so the two classes are cleanly separable in the frequency domain while
individual series still vary in amplitude, phase, and additive noise.
"""

from __future__ import annotations

import numpy as np

from .dataset import LabeledDataset
from .fourier import TimeSeries

CLASS_BANDS = ((1.0, 3.0), (5.0, 8.0))


def sinusoid_mixture(rng, length: int, band: tuple[float, float], n_waves: int = 2,
                     noise: float = 0.02) -> np.ndarray:
    t = np.arange(length) / length
    x = np.zeros(length)
    for _ in range(n_waves):
        freq = rng.uniform(*band)
        amp = rng.uniform(0.6, 1.4)
        phase = rng.uniform(0.0, 2.0 * np.pi)
        x += amp * np.sin(2.0 * np.pi * freq * t + phase)
    return x + noise * rng.normal(size=length)


def two_class_dataset(
    name: str,
    split: str,
    n_per_class: int,
    length: int,
    rng,
    bands=CLASS_BANDS,
) -> LabeledDataset:
    series = []
    for label, band in zip(("0", "1"), bands):
        for _ in range(n_per_class):
            series.append(
                TimeSeries(
                    sinusoid_mixture(rng, length, band), label=label, dataset_id=name
                )
            )
    return LabeledDataset(name=name, series=tuple(series), split=split)


def two_class_pair(
    n_train_per_class: int = 50,
    n_test_per_class: int = 50,
    length: int = 60,
    seed: int = 0,
    name: str = "toy",
) -> tuple[LabeledDataset, LabeledDataset]:
    """Matching train/test datasets: two sinusoid classes, fixed length."""
    rng = np.random.default_rng(seed)
    train = two_class_dataset(name, "train", n_train_per_class, length, rng)
    test = two_class_dataset(name, "test", n_test_per_class, length, rng)
    return train, test
