import numpy as np
import pytest

from mvsgrade.datasets.labels import TomatoStage
from mvsgrade.evaluation.confusion import BinaryConfusion, StageConfusion
from mvsgrade.evaluation.metrics import METRIC_NAMES, format_table, \
    metrics, ordinal_errors, report_frame, stage_breakdown, write_report
from mvsgrade.utils import format_percent


def _egg():
    return BinaryConfusion(tp=44, fp=4, fn=12, tn=52)


def test_published_egg_battery():
    report = metrics(_egg())
    shown = {name: format_percent(value)
             for name, value in report.to_dict().items()}
    assert shown == {'accuracy': '86%',
                     'false_positive_rate': '7%',
                     'false_negative_rate': '21%',
                     'sensitivity': '79%',
                     'specificity': '93%',
                     'positive_predictive_value': '92%',
                     'negative_predictive_value': '81%'}
    assert report.accuracy == pytest.approx(96 / 112.0)


def test_rates_pair_up():
    report = metrics(_egg())
    assert report.sensitivity + report.false_negative_rate == \
        pytest.approx(1.0)
    assert report.specificity + report.false_positive_rate == \
        pytest.approx(1.0)


def test_undefined_rates():
    report = metrics(BinaryConfusion(tp=5, fp=0, fn=0, tn=0))
    assert report.accuracy == 1.0 and report.sensitivity == 1.0
    for name in ('specificity', 'false_positive_rate',
                 'negative_predictive_value'):
        assert not report.is_defined(name)
    frame = report_frame(report)
    assert frame.loc[frame.metric == 'specificity', 'display'].item() == \
        'undefined'
    assert 'undefined' in format_table(frame)
    assert 'specificity=undefined' in repr(report)


def test_metrics_rejects_stage_matrix():
    with pytest.raises(TypeError):
        metrics(StageConfusion(np.eye(6)))


def test_published_tomato_distances():
    counts = np.diag([194, 194, 194, 194, 194, 194])
    # 36 mistakes, each one stage away
    counts[0, 1] = counts[1, 2] = counts[2, 3] = 6
    counts[3, 4] = counts[4, 5] = counts[5, 4] = 6
    errors = ordinal_errors(StageConfusion(counts))
    assert errors.total == 1200
    assert errors.counts[:2] == (1164, 36)
    assert errors.accuracy == pytest.approx(0.97)
    assert format_percent(errors.accuracy) == '97%'
    assert errors.max_distance == 1
    assert errors.within(1) == 1.0


def test_far_mistakes():
    counts = np.zeros((6, 6), dtype=int)
    counts[0, 5] = 2
    counts[3, 3] = 2
    errors = ordinal_errors(StageConfusion(counts))
    assert errors.counts == (2, 0, 0, 0, 0, 2)
    assert errors.max_distance == 5
    assert errors.within(4) == 0.5
    assert errors.to_frame()['count'].tolist() == [2, 0, 0, 0, 0, 2]


def test_empty_and_binary_distances():
    errors = ordinal_errors(StageConfusion(np.zeros((6, 6))))
    assert errors.max_distance is None and errors.accuracy is None
    binary = ordinal_errors(_egg())
    assert binary.counts == (96, 16)


def test_stage_breakdown():
    counts = np.zeros((6, 6), dtype=int)
    counts[2, 2] = 6
    counts[2, 1] = 2
    counts[2, 3] = 2
    counts[2, 4] = 1
    summaries = stage_breakdown(StageConfusion(counts))
    turning = summaries[int(TomatoStage.Turning)]
    assert turning.support == 11
    assert turning.recall == pytest.approx(6 / 11.0)
    assert turning.neighbours == [(TomatoStage.Breakers, 2),
                                  (TomatoStage.Pink, 2),
                                  (TomatoStage.LightRed, 1)]
    assert summaries[0].recall is None
    with pytest.raises(TypeError):
        stage_breakdown(_egg())


def test_report_csv(tmp_path):
    path = tmp_path / 'report.csv'
    write_report(report_frame(metrics(_egg())), path, config={'task': 'egg'})
    lines = path.read_text().splitlines()
    assert lines[0] == 'metric,value,rounded,display'
    assert len(lines) == 1 + len(METRIC_NAMES)
    assert lines[1].startswith('accuracy,') and lines[1].endswith(',0.86,86%')
