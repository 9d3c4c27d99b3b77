import logging
import os

import numpy as np
import pandas as pd

from mvsgrade.constants import PATTERN_SIZE
from mvsgrade.datasets.labels import parse_label, label_name, \
    target_vector, check_task
from mvsgrade.utils import atomic_write, write_provenance

LOG = logging.getLogger(__name__)

ID_COLUMN = 'id'
LABEL_COLUMN = 'label'
VALUE_COLUMNS = ['v%d' % i for i in range(PATTERN_SIZE)]


class FeatureSet(object):
    """
    Labeled spectral patterns for one task, row i belonging to ids[i].
    """

    def __init__(self, task, ids, labels, values):
        self.task = check_task(task)
        self.ids = [str(i) for i in ids]
        self.labels = [parse_label(label, task) for label in labels]
        values = np.asarray(values, dtype=np.float64)
        if values.size == 0:
            values = values.reshape(0, PATTERN_SIZE)
        if values.ndim != 2 or values.shape[1] != PATTERN_SIZE:
            raise ValueError('feature matrix must be n x %d, got %s' %
                             (PATTERN_SIZE, values.shape))
        if not len(self.ids) == len(self.labels) == values.shape[0]:
            raise ValueError('ids, labels and values differ in length')
        if len(set(self.ids)) != len(self.ids):
            raise ValueError('duplicate ids in feature set')
        self.values = values
        self._index = {image_id: row for row, image_id in enumerate(self.ids)}

    @classmethod
    def from_patterns(cls, task, records):
        """:param records: iterable of (id, label, SpectralPattern)."""
        records = list(records)
        values = [pattern.values for _, _, pattern in records]
        return cls(task, [r[0] for r in records], [r[1] for r in records],
                   np.vstack(values) if values else np.zeros((0,
                                                              PATTERN_SIZE)))

    def __len__(self):
        return len(self.ids)

    def __contains__(self, image_id):
        return image_id in self._index

    def row(self, image_id):
        return self.values[self._index[image_id]]

    def subset(self, ids):
        ids = list(ids)
        missing = [i for i in ids if i not in self._index]
        if missing:
            raise KeyError('ids not in feature set: %s' %
                           ', '.join(missing[:5]))
        rows = [self._index[i] for i in ids]
        return FeatureSet(self.task, ids, [self.labels[r] for r in rows],
                          self.values[rows])

    def targets(self):
        if not self.labels:
            return np.zeros((0, 0))
        return np.vstack([target_vector(label, self.task)
                          for label in self.labels])

    def to_frame(self):
        frame = pd.DataFrame(self.values, columns=VALUE_COLUMNS)
        frame.insert(0, LABEL_COLUMN, [label_name(l) for l in self.labels])
        frame.insert(0, ID_COLUMN, self.ids)
        return frame


def write_feature_file(features, path, config=None):
    """
    One record per image: id, label, then 768 decimal fractions. Floats are
    written in shortest round-trip form, so reading them back is exact.
    """
    with atomic_write(path) as fout:
        features.to_frame().to_csv(fout, index=False, lineterminator='\n')
    write_provenance(path, config)
    LOG.info('Wrote %d feature records to %s', len(features), path)
    return path


def read_feature_file(path, task):
    path = os.fspath(path)
    frame = pd.read_csv(path, dtype={ID_COLUMN: str, LABEL_COLUMN: str},
                        float_precision='round_trip')
    expected = [ID_COLUMN, LABEL_COLUMN] + VALUE_COLUMNS
    if list(frame.columns) != expected:
        raise ValueError('%s is not a feature file (bad header)' % path)
    labels = [parse_label(name, task,
                          err_msg='%s line %d:' % (path, row + 2))
              for row, name in enumerate(frame[LABEL_COLUMN])]
    return FeatureSet(task, frame[ID_COLUMN].tolist(), labels,
                      frame[VALUE_COLUMNS].to_numpy(dtype=np.float64))
