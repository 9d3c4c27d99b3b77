"""Fixture builders shared by the test suites."""
import numpy as np

from mvsgrade.constants import PATTERN_SIZE
from mvsgrade.datasets.labels import labels_for
from mvsgrade.features.featurefile import FeatureSet
from mvsgrade.imaging.image import RgbImage, GrayImage


def disk_mask(size, radius, center=None):
    cy, cx = center if center is not None else (size // 2, size // 2)
    yy, xx = np.mgrid[0:size, 0:size]
    return (yy - cy) ** 2 + (xx - cx) ** 2 <= radius ** 2


def disk_image(size=100, radius=30, fg=(200, 60, 40), bg=(30, 30, 30)):
    pixels = np.empty((size, size, 3), dtype=np.uint8)
    pixels[:] = bg
    pixels[disk_mask(size, radius)] = fg
    return RgbImage(pixels)


def uniform_image(size=40, colour=(90, 120, 150)):
    pixels = np.empty((size, size, 3), dtype=np.uint8)
    pixels[:] = colour
    return RgbImage(pixels)


def step_gray(height=40, width=40, step=20, low=0, high=255):
    pixels = np.full((height, width), low, dtype=np.uint8)
    pixels[:, step:] = high
    return GrayImage(pixels)


def ring_edges(shape, boxes):
    """
    Edge map of one-pixel rectangular outlines; each box (top, left,
    height, width) is the interior the outline encloses.
    """
    edges = np.zeros(shape, dtype=bool)
    for top, left, height, width in boxes:
        edges[top - 1, left - 1:left + width + 1] = True
        edges[top + height, left - 1:left + width + 1] = True
        edges[top - 1:top + height + 1, left - 1] = True
        edges[top - 1:top + height + 1, left + width] = True
    return edges


def random_patterns(rng, count):
    """Rows of valid spectral patterns from random histograms."""
    rows = []
    for _ in range(count):
        counts = rng.integers(0, 5, size=PATTERN_SIZE).astype(np.float64)
        blocks = counts.reshape(3, -1)
        blocks[:, 0] += 1
        rows.append((blocks / blocks.sum(axis=1, keepdims=True)).ravel())
    return np.vstack(rows)


def cluster_features(task, per_class, seed=0, spread=0.002, prefix='x'):
    """
    Separable FeatureSet: every class gets its own intensity peak in each
    channel block, with small per-sample jitter.
    """
    rng = np.random.default_rng(seed)
    labels = labels_for(task)
    ids, names, rows = [], [], []
    for index, label in enumerate(labels):
        for i in range(per_class):
            values = np.zeros((3, PATTERN_SIZE // 3))
            centre = 20 + 40 * index
            values[:, centre] = 0.6
            values[:, centre + 1] = 0.4
            jitter = rng.uniform(0, spread, size=values.shape)
            values += jitter
            values /= values.sum(axis=1, keepdims=True)
            ids.append('%s-%d-%03d' % (prefix, index, i))
            names.append(label)
            rows.append(values.ravel())
    return FeatureSet(task, ids, names, np.vstack(rows))
