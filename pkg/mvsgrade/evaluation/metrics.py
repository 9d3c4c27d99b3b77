"""
Classifier metric battery. A rate whose denominator is zero is undefined
and reported as None, never as 0 or 1.
"""
import numpy as np
import pandas as pd

from mvsgrade.datasets.labels import TomatoStage, label_name
from mvsgrade.evaluation.confusion import BinaryConfusion, StageConfusion
from mvsgrade.utils import atomic_write, write_provenance, round_half_up, \
    format_percent

METRIC_NAMES = ('accuracy', 'sensitivity', 'specificity',
                'false_positive_rate', 'false_negative_rate',
                'positive_predictive_value', 'negative_predictive_value')


def _rate(numerator, denominator):
    if denominator == 0:
        return None
    return numerator / float(denominator)


class MetricsReport(object):
    def __init__(self, accuracy, sensitivity, specificity,
                 false_positive_rate, false_negative_rate,
                 positive_predictive_value, negative_predictive_value):
        self.accuracy = accuracy
        self.sensitivity = sensitivity
        self.specificity = specificity
        self.false_positive_rate = false_positive_rate
        self.false_negative_rate = false_negative_rate
        self.positive_predictive_value = positive_predictive_value
        self.negative_predictive_value = negative_predictive_value

    def is_defined(self, name):
        return getattr(self, name) is not None

    def to_dict(self):
        return {name: getattr(self, name) for name in METRIC_NAMES}

    def __repr__(self):
        return 'MetricsReport(%s)' % ', '.join(
            '%s=%s' % (name, format_percent(getattr(self, name)))
            for name in METRIC_NAMES)


def metrics(cm):
    if not isinstance(cm, BinaryConfusion):
        raise TypeError('metrics needs a BinaryConfusion, got %s' %
                        type(cm).__name__)
    positives = cm.tp + cm.fn
    negatives = cm.tn + cm.fp
    return MetricsReport(
        accuracy=_rate(cm.tp + cm.tn, cm.total),
        sensitivity=_rate(cm.tp, positives),
        specificity=_rate(cm.tn, negatives),
        false_positive_rate=_rate(cm.fp, negatives),
        false_negative_rate=_rate(cm.fn, positives),
        positive_predictive_value=_rate(cm.tp, cm.tp + cm.fp),
        negative_predictive_value=_rate(cm.tn, cm.tn + cm.fn))


class OrdinalErrors(object):
    """counts[d] = samples whose predicted stage is d stages off."""

    def __init__(self, counts):
        self.counts = tuple(int(c) for c in counts)

    @property
    def total(self):
        return sum(self.counts)

    @property
    def accuracy(self):
        return _rate(self.counts[0], self.total)

    @property
    def max_distance(self):
        """Largest distance with any mass; None for an empty tally."""
        nonzero = [d for d, c in enumerate(self.counts) if c]
        return nonzero[-1] if nonzero else None

    def within(self, distance):
        """Fraction of samples at most `distance` stages off."""
        return _rate(sum(self.counts[:distance + 1]), self.total)

    def to_frame(self):
        return pd.DataFrame({'distance': list(range(len(self.counts))),
                             'count': list(self.counts)})


def ordinal_errors(cm):
    """
    Histogram of |true - predicted| index distance. A BinaryConfusion is
    read as a 2x2 grid, so its distance-0 mass is tp + tn.
    """
    grid = np.asarray(cm.grid())
    size = grid.shape[0]
    rows, cols = np.indices(grid.shape)
    distance = np.abs(rows - cols)
    counts = np.bincount(distance.ravel(), weights=grid.ravel(),
                         minlength=size)
    return OrdinalErrors(np.rint(counts).astype(np.int64))


class StageSummary(object):
    def __init__(self, stage, support, recall, neighbours):
        self.stage = stage
        self.support = support
        self.recall = recall
        self.neighbours = neighbours

    def __repr__(self):
        return 'StageSummary<%s recall=%s, confused with %s>' % (
            label_name(self.stage), format_percent(self.recall),
            ', '.join('%s:%d' % (label_name(s), c)
                      for s, c in self.neighbours) or 'none')


def stage_breakdown(cm):
    """
    Per maturity stage: support, recall and the stages its items were
    mistaken for, most frequent first (ties by stage order).
    """
    if not isinstance(cm, StageConfusion):
        raise TypeError('stage_breakdown needs a StageConfusion')
    summaries = []
    for stage in TomatoStage:
        row = cm.counts[int(stage)]
        support = int(row.sum())
        mistakes = [(TomatoStage(j), int(c)) for j, c in enumerate(row)
                    if j != int(stage) and c > 0]
        mistakes.sort(key=lambda item: (-item[1], int(item[0])))
        summaries.append(StageSummary(stage, support,
                                      _rate(int(row[int(stage)]), support),
                                      mistakes))
    return summaries


def report_frame(report):
    """One row per metric: raw fraction plus its rounded display."""
    rows = []
    for name in METRIC_NAMES:
        value = getattr(report, name)
        rows.append({'metric': name,
                     'value': value,
                     'rounded': round_half_up(value),
                     'display': format_percent(value)})
    return pd.DataFrame(rows, columns=['metric', 'value', 'rounded',
                                       'display'])


def format_table(frame):
    return frame.to_string(index=False, na_rep='undefined')


def write_report(frame, path, config=None):
    with atomic_write(path) as fout:
        frame.to_csv(fout, index=False, lineterminator='\n')
    write_provenance(path, config)
    return path
