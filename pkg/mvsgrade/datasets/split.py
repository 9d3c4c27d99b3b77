import logging

import numpy as np

from mvsgrade.constants import TASK_TOMATO, TOMATO_SPLIT, EGG_SPLIT
from mvsgrade.datasets.labels import labels_for, label_name, check_task
from mvsgrade.datasets.manifest import Manifest
from mvsgrade.utils import derive_seed

LOG = logging.getLogger(__name__)

SPLIT_NAMES = ('train', 'test', 'validation')


class InsufficientClassError(ValueError):
    def __init__(self, label, requested, available):
        super(InsufficientClassError, self).__init__(
            'class %s needs %d items but only %d are available' %
            (label_name(label), requested, available))
        self.label = label
        self.requested = requested
        self.available = available


class SplitSpec(object):
    """
    Per-class (train, test, validation) counts. A single tuple applies to
    every class; a dict maps labels to their own tuples.
    """

    def __init__(self, counts, seed=0):
        self.counts = counts
        self.seed = int(seed)

    def counts_for(self, label):
        counts = self.counts
        if isinstance(counts, dict):
            counts = counts[label]
        counts = tuple(int(c) for c in counts)
        if len(counts) != 3 or any(c < 0 for c in counts):
            raise ValueError('split counts must be three non-negative '
                             'integers, got %r' % (counts,))
        return counts

    @classmethod
    def for_task(cls, task, seed=0):
        """Default per-class (train, test, validation) counts for a task."""
        check_task(task)
        return cls(TOMATO_SPLIT if task == TASK_TOMATO else EGG_SPLIT, seed)

    @classmethod
    def from_fractions(cls, manifest, fractions, seed=0):
        """Counts as floor(fraction * class size) for each class."""
        if len(fractions) != 3 or sum(fractions) > 1 + 1e-12 or \
                any(f < 0 for f in fractions):
            raise ValueError('split fractions must be three non-negative '
                             'values summing to at most 1')
        groups = manifest.by_label()
        counts = {}
        for label in labels_for(manifest.task):
            size = len(groups.get(label, ()))
            counts[label] = tuple(int(np.floor(f * size + 1e-9))
                                  for f in fractions)
        return cls(counts, seed)

    def to_dict(self):
        if isinstance(self.counts, dict):
            counts = {label_name(k): list(v) for k, v in self.counts.items()}
        else:
            counts = list(self.counts)
        return {'counts': counts, 'seed': self.seed}


def stratified_split(manifest, spec):
    """
    Split into (train, test, validation) manifests with exact per-class
    counts. Each class's ids are sorted, then shuffled with a seed derived
    from (spec.seed, class index), so the result does not depend on the
    manifest's row order.
    :raise InsufficientClassError: a class has fewer items than requested.
    """
    groups = manifest.by_label()
    parts = [[], [], []]
    for index, label in enumerate(labels_for(manifest.task)):
        counts = spec.counts_for(label)
        records = sorted(groups.get(label, ()), key=lambda r: r.image_id)
        needed = sum(counts)
        if needed > len(records):
            raise InsufficientClassError(label, needed, len(records))
        if needed == 0:
            continue
        rng = np.random.default_rng(derive_seed(spec.seed, index))
        order = rng.permutation(len(records))
        start = 0
        for part, count in zip(parts, counts):
            part.extend(records[i] for i in order[start:start + count])
            start += count
    result = tuple(Manifest(manifest.task,
                            sorted(part, key=lambda r: r.image_id))
                   for part in parts)
    LOG.info('Split %d records into %s', len(manifest),
             ', '.join('%s=%d' % (name, len(m))
                       for name, m in zip(SPLIT_NAMES, result)))
    return result
