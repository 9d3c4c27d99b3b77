import os

import numpy as np
import pandas as pd
from sklearn.metrics import confusion_matrix

from mvsgrade.constants import TASK_TOMATO
from mvsgrade.datasets.labels import TomatoStage, EggGrade, labels_for, \
    label_name, parse_label, check_task


class BinaryConfusion(object):
    """Egg grading tallies, Accept being the positive class."""

    def __init__(self, tp, fp, fn, tn):
        counts = [int(c) for c in (tp, fp, fn, tn)]
        if any(c < 0 for c in counts):
            raise ValueError('confusion counts must be non-negative')
        self.tp, self.fp, self.fn, self.tn = counts

    @property
    def total(self):
        return self.tp + self.fp + self.fn + self.tn

    def grid(self):
        """Rows are true labels, columns predicted, Accept first."""
        return np.array([[self.tp, self.fn], [self.fp, self.tn]])

    def to_frame(self):
        names = [label_name(g) for g in EggGrade]
        return pd.DataFrame(self.grid(), index=names, columns=names)

    def __eq__(self, other):
        return isinstance(other, BinaryConfusion) and \
            (self.tp, self.fp, self.fn, self.tn) == \
            (other.tp, other.fp, other.fn, other.tn)

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        return 'BinaryConfusion(tp=%d, fp=%d, fn=%d, tn=%d)' % (
            self.tp, self.fp, self.fn, self.tn)


class StageConfusion(object):
    """6x6 maturity-stage tallies, rows true stage, columns predicted."""

    def __init__(self, counts):
        counts = np.array(counts, dtype=np.int64)
        size = len(TomatoStage)
        if counts.shape != (size, size):
            raise ValueError('stage confusion must be %dx%d, got %s' %
                             (size, size, counts.shape))
        if np.any(counts < 0):
            raise ValueError('confusion counts must be non-negative')
        counts.setflags(write=False)
        self.counts = counts

    @property
    def total(self):
        return int(self.counts.sum())

    def grid(self):
        return self.counts

    def to_frame(self):
        names = [label_name(s) for s in TomatoStage]
        return pd.DataFrame(self.counts, index=names, columns=names)

    def __eq__(self, other):
        return isinstance(other, StageConfusion) and \
            np.array_equal(self.counts, other.counts)

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        return 'StageConfusion(total=%d, diagonal=%d)' % (
            self.total, int(np.trace(self.counts)))


def confusion(preds, truth, task):
    """
    Tally predicted against true labels; labels may be enum members or
    their names.
    :return: BinaryConfusion for eggs, StageConfusion for tomatoes
    """
    check_task(task)
    preds = list(preds)
    truth = list(truth)
    if len(preds) != len(truth):
        raise ValueError('%d predictions for %d true labels' %
                         (len(preds), len(truth)))
    if not preds:
        raise ValueError('nothing to tally')
    labels = labels_for(task)
    codes = {label: index for index, label in enumerate(labels)}
    y_pred = [codes[parse_label(p, task)] for p in preds]
    y_true = [codes[parse_label(t, task)] for t in truth]
    grid = confusion_matrix(y_true, y_pred, labels=list(range(len(labels))))
    if task == TASK_TOMATO:
        return StageConfusion(grid)
    # labels_for(egg) lists Accept first
    (tp, fn), (fp, tn) = grid
    return BinaryConfusion(tp, fp, fn, tn)


def read_labels(path, task, column='label'):
    """
    Read an (id, label) table: a prediction file, a manifest or a feature
    file.
    :return: dict id -> label, in file order
    """
    path = os.fspath(path)
    frame = pd.read_csv(path, dtype=str, keep_default_na=False,
                        usecols=lambda c: c in ('id', column))
    if 'id' not in frame.columns or column not in frame.columns:
        raise ValueError('%s needs columns id and %s' % (path, column))
    labels = {}
    for row, (image_id, name) in enumerate(zip(frame['id'], frame[column])):
        if image_id in labels:
            raise ValueError('%s line %d: duplicate id %r' %
                             (path, row + 2, image_id))
        labels[image_id] = parse_label(
            name, task, err_msg='%s line %d:' % (path, row + 2))
    return labels


def pair_labels(predicted, truth):
    """
    Align two id -> label dicts on the predicted ids.
    :raise KeyError: a predicted id has no true label.
    """
    missing = [i for i in predicted if i not in truth]
    if missing:
        raise KeyError('no true label for %d predicted id(s), e.g. %s' %
                       (len(missing), missing[0]))
    ids = list(predicted)
    return [predicted[i] for i in ids], [truth[i] for i in ids]
