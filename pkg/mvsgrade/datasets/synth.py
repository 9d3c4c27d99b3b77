"""
Synthetic stand-ins for the produce corpora and the grader shift logs.

Each image shows one ellipse ("produce") on a dark, softly shaded table.
Tomato stages interpolate the skin colour from green to red; rejected eggs
carry dark blemish speckles. `noise` is the per-pixel channel standard
deviation in intensity units; it also jitters each image's base colour, so
classes separate cleanly at low noise and blur into each other at high noise.
"""
import logging
import os

import numpy as np
import pandas as pd

from mvsgrade.constants import TASK_TOMATO, SHIFT_HOURS, \
    SHIFT_BREAKS, BENCHMARK_HOUR
from mvsgrade.datasets.labels import TomatoStage, EggGrade, labels_for, \
    label_name, check_task
from mvsgrade.datasets.manifest import Manifest, ManifestRecord, \
    write_manifest
from mvsgrade.imaging.image import RgbImage, save_image
from mvsgrade.utils import derive_seed

LOG = logging.getLogger(__name__)

DEFAULT_SIZE = 64
DEFAULT_NOISE = 4.0

TABLE = np.array([28.0, 30.0, 38.0])
TABLE_SHADE = 6.0
TABLE_GRAIN = 2.0
UNRIPE = np.array([74.0, 150.0, 52.0])
RIPE = np.array([196.0, 38.0, 34.0])
SHELL = np.array([226.0, 204.0, 170.0])
BLEMISH = np.array([96.0, 72.0, 48.0])
FALLOFF = 0.1  # produce brightness drop from centre to rim
COLOUR_JITTER = 1.5  # per-image base colour sd, in units of `noise`


def base_colour(label):
    if isinstance(label, TomatoStage):
        t = int(label) / float(len(TomatoStage) - 1)
        return (1.0 - t) * UNRIPE + t * RIPE
    return SHELL.copy()


def _table(rng, size):
    yy, xx = np.mgrid[0:size, 0:size].astype(np.float64) / size
    phase = rng.uniform(0, 2 * np.pi)
    shade = TABLE_SHADE * np.sin(2 * np.pi * (0.7 * xx + 0.4 * yy) + phase)
    grain = rng.normal(0.0, TABLE_GRAIN, (size, size, 3))
    return TABLE + shade[:, :, np.newaxis] + grain


def _ellipse(rng, size):
    """Random ellipse: (inside mask, normalized radius squared, geometry)."""
    yy, xx = np.mgrid[0:size, 0:size].astype(np.float64)
    cy, cx = size / 2.0 + rng.uniform(-0.06, 0.06, 2) * size
    a = rng.uniform(0.28, 0.36) * size
    b = rng.uniform(0.24, 0.32) * size
    theta = rng.uniform(0, np.pi)
    dx, dy = xx - cx, yy - cy
    u = dx * np.cos(theta) + dy * np.sin(theta)
    v = -dx * np.sin(theta) + dy * np.cos(theta)
    radius2 = (u / a) ** 2 + (v / b) ** 2
    return radius2 <= 1.0, radius2, (cy, cx, a, b, theta)


def _speckle(rng, pixels, inside, geometry, noise):
    cy, cx, a, b, theta = geometry
    size = pixels.shape[0]
    yy, xx = np.mgrid[0:size, 0:size].astype(np.float64)
    for _ in range(rng.integers(6, 14)):
        r = 0.7 * np.sqrt(rng.uniform(0, 1))
        phi = rng.uniform(0, 2 * np.pi)
        u, v = r * a * np.cos(phi), r * b * np.sin(phi)
        sy = cy + u * np.sin(theta) + v * np.cos(theta)
        sx = cx + u * np.cos(theta) - v * np.sin(theta)
        spot = ((yy - sy) ** 2 + (xx - sx) ** 2 <=
                rng.uniform(1.5, 3.0) ** 2) & inside
        pixels[spot] = BLEMISH + rng.normal(0.0, noise + 4.0, 3)


def render(label, rng, noise=DEFAULT_NOISE, size=DEFAULT_SIZE):
    """Draw one synthetic produce image for `label`."""
    pixels = _table(rng, size)
    inside, radius2, geometry = _ellipse(rng, size)
    colour = base_colour(label) + rng.normal(0.0, COLOUR_JITTER * noise, 3)
    shading = 1.0 - FALLOFF * np.clip(radius2, 0, 1)
    produce = colour * shading[:, :, np.newaxis]
    produce = produce + rng.normal(0.0, noise, produce.shape) if noise > 0 \
        else produce
    pixels[inside] = produce[inside]
    if label is EggGrade.Reject:
        _speckle(rng, pixels, inside, geometry, noise)
    return RgbImage(np.clip(np.rint(pixels), 0, 255).astype(np.uint8))


def synth_generate(task, per_class, noise, seed, out_dir,
                   size=DEFAULT_SIZE, config=None):
    """
    Write `per_class` PNG images per label into `out_dir` together with
    `manifest.csv`. Every image has its own seed derived from (seed, class,
    index), so reruns write byte-identical files.
    :return: the Manifest of the written images
    """
    check_task(task)
    if per_class < 1:
        raise ValueError('per_class must be positive')
    os.makedirs(out_dir, exist_ok=True)
    manifest = Manifest(task)
    for class_index, label in enumerate(labels_for(task)):
        for i in range(per_class):
            rng = np.random.default_rng(derive_seed(seed, class_index, i))
            image_id = '%s-%s-%04d' % (task, label_name(label), i)
            path = os.path.join(out_dir, image_id + '.png')
            save_image(render(label, rng, noise, size), path)
            manifest.add(ManifestRecord(image_id, path, label))
    write_manifest(manifest, os.path.join(out_dir, 'manifest.csv'),
                   relative_to=out_dir, config=config)
    LOG.info('Generated %d synthetic %s images in %s', len(manifest), task,
             out_dir)
    return manifest


def shift_accuracy(hour, decay, recovery, breaks=SHIFT_BREAKS):
    """
    Expected grader accuracy in `hour`: fatigue grows by `decay` each hour
    and a break before the hour removes a `recovery` share of it.
    """
    fatigue = 0.0
    for h in range(BENCHMARK_HOUR + 1, hour + 1):
        if h in breaks:
            fatigue *= 1.0 - recovery
        fatigue += decay
    return max(0.0, 1.0 - fatigue)


def _mistake(label, task, rng):
    if task == TASK_TOMATO:
        stage = int(label)
        options = [s for s in (stage - 1, stage + 1)
                   if 0 <= s < len(TomatoStage)]
        return TomatoStage(options[rng.integers(len(options))])
    return EggGrade.Reject if label is EggGrade.Accept else EggGrade.Accept


def synth_grader_log(task, items, graders, seed, decay=0.03, recovery=0.5,
                     hours=SHIFT_HOURS):
    """
    Simulate a shift of `graders` re-grading the same `items` benchmark
    items each hour. Hour 1 reproduces the benchmark exactly; tomato slips
    land on a neighbouring stage, egg slips flip the grade.
    :return: DataFrame with columns item, hour, grader, label
    """
    check_task(task)
    rng = np.random.default_rng(seed)
    labels = labels_for(task)
    truth = [labels[i % len(labels)] for i in range(items)]
    rows = []
    for g in range(graders):
        grader = 'grader%d' % (g + 1)
        for hour in range(1, hours + 1):
            accuracy = shift_accuracy(hour, decay, recovery)
            for i, label in enumerate(truth):
                given = label
                if hour != BENCHMARK_HOUR and rng.uniform() >= accuracy:
                    given = _mistake(label, task, rng)
                rows.append(('%s-%04d' % (task, i), hour, grader,
                             label_name(given)))
    return pd.DataFrame(rows, columns=['item', 'hour', 'grader', 'label'])
