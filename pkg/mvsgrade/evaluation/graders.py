import logging
import os

import pandas as pd

from mvsgrade.constants import SHIFT_HOURS, BENCHMARK_HOUR
from mvsgrade.datasets.labels import parse_label, label_name, check_task
from mvsgrade.utils import atomic_write, write_provenance

LOG = logging.getLogger(__name__)

LOG_COLUMNS = ['item', 'hour', 'grader', 'label']


class GraderLogError(ValueError):
    pass


class GraderLog(object):
    """
    Labels human graders assigned to benchmark items over a shift. The
    labels each grader gave in the first hour are that grader's benchmark
    for later hours.
    """

    def __init__(self, task, frame):
        self.task = check_task(task)
        missing = [c for c in LOG_COLUMNS if c not in frame.columns]
        if missing:
            raise GraderLogError('grader log lacks column(s) %s' %
                                 ', '.join(missing))
        frame = frame[LOG_COLUMNS].copy()
        frame['item'] = frame['item'].astype(str)
        frame['grader'] = frame['grader'].astype(str)
        try:
            frame['hour'] = frame['hour'].astype(int)
        except (TypeError, ValueError) as e:
            raise GraderLogError('bad hour value: %s' % e)
        bad = frame[(frame['hour'] < 1) | (frame['hour'] > SHIFT_HOURS)]
        if len(bad):
            raise GraderLogError('hour %d outside 1..%d' %
                                 (bad['hour'].iloc[0], SHIFT_HOURS))
        try:
            frame['label'] = [label_name(parse_label(name, task))
                              for name in frame['label']]
        except ValueError as e:
            raise GraderLogError(str(e))
        self.frame = frame.reset_index(drop=True)

    def __len__(self):
        return len(self.frame)

    @property
    def graders(self):
        return sorted(self.frame['grader'].unique())

    def benchmark(self):
        """
        Each grader is measured against their own first hour, so graders
        may disagree with each other on an item.
        :return: Series (grader, item) -> hour-1 label
        :raise GraderLogError: one grader gave an item two hour-1 labels.
        """
        first = self.frame[self.frame['hour'] == BENCHMARK_HOUR]
        spread = first.groupby(['grader', 'item'])['label'].nunique()
        conflicts = spread[spread > 1]
        if len(conflicts):
            grader, item = conflicts.index[0]
            raise GraderLogError('grader %r gave item %r conflicting '
                                 'hour-%d labels' %
                                 (grader, item, BENCHMARK_HOUR))
        return first.drop_duplicates(['grader', 'item']).set_index(
            ['grader', 'item'])['label']


def load_grader_log(path, task):
    path = os.fspath(path)
    frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    log = GraderLog(task, frame)
    LOG.info('Loaded %d grader records from %s', len(log), path)
    return log


def write_grader_log(log, path, config=None):
    with atomic_write(path) as fout:
        log.frame.to_csv(fout, index=False, lineterminator='\n')
    write_provenance(path, config)
    return path


class HourlyAccuracy(object):
    def __init__(self, per_grader, per_hour):
        self.per_grader = per_grader
        self.per_hour = per_hour

    @property
    def daily_average(self):
        return float(self.per_hour.mean())

    def __getitem__(self, hour):
        return float(self.per_hour.loc[hour])

    def to_frame(self):
        """hour, mean accuracy, then one column per grader."""
        table = self.per_grader.unstack('grader')
        table.insert(0, 'accuracy', self.per_hour)
        return table.reset_index()


def hourly_accuracy(log):
    """
    Per hour, the fraction of each grader's labels that match the hour-1
    benchmark, averaged over the graders working that hour.
    :raise GraderLogError: a grader graded an item they never graded in
        hour 1.
    """
    if not len(log):
        raise GraderLogError('grader log is empty')
    benchmark = log.benchmark()
    frame = log.frame.copy()
    keys = pd.MultiIndex.from_frame(frame[['grader', 'item']])
    expected = pd.Series(benchmark.reindex(keys).to_numpy(),
                         index=frame.index)
    orphans = frame.loc[expected.isna(), ['grader', 'item']]
    if len(orphans):
        raise GraderLogError('item %r has no hour-%d record from %r' %
                             (orphans['item'].iloc[0], BENCHMARK_HOUR,
                              orphans['grader'].iloc[0]))
    frame['correct'] = (frame['label'] == expected).astype(float)
    per_grader = frame.groupby(['hour', 'grader'])['correct'].mean()
    per_hour = per_grader.groupby(level='hour').mean()
    result = HourlyAccuracy(per_grader, per_hour)
    LOG.info('Daily grader accuracy %.4f over %d hour(s)',
             result.daily_average, len(per_hour))
    return result
