import io
import json

import pandas as pd
import pytest

from mvsgrade.achem.molecule import Molecule
from mvsgrade.achem.reactor import STOP_CONSENSUS
from mvsgrade.cli import commands
from mvsgrade.config import ConfigError, PipelineConfig
from mvsgrade.constants import PROVENANCE_SUFFIX
from mvsgrade.datasets.labels import EggGrade
from mvsgrade.features.featurefile import read_feature_file, \
    write_feature_file
from mvsgrade.neuralnet.serialization import load_model
from mvsgrade.tests.tester import seeded_trials
from mvsgrade.tests.utils import cluster_features

SMALL = {
    'task': 'egg',
    'seed': 3,
    'split': {'train': 3, 'test': 1, 'validation': 2},
    'structure': {'hidden_layers': [4]},
    'training': {'max_epochs': 20, 'patience': 5},
    'search': {'min_layers': 1, 'max_layers': 1, 'min_width': 2,
               'max_width': 6, 'capacity': 2, 'max_cycles': 1,
               'consensus_threshold': None, 'max_epochs': 3,
               'patience': 3},
    'synth': {'count': 6, 'noise': 2.0, 'size': 48},
}


@pytest.fixture
def config():
    return PipelineConfig(SMALL)


@pytest.fixture
def corpus(tmp_path, config):
    out = tmp_path / 'corpus'
    manifest = commands.cmd_synth(config, str(out))
    return out, manifest


@pytest.fixture
def feature_path(tmp_path):
    path = str(tmp_path / 'features.csv')
    write_feature_file(cluster_features('egg', 6), path)
    return path


def test_preprocess_synthetic_corpus(tmp_path, config, corpus):
    out, manifest = corpus
    features_path = str(tmp_path / 'features.csv')
    features, failures = commands.cmd_preprocess(
        config, str(out / 'manifest.csv'), features_path,
        mask_dir=str(tmp_path / 'masks'))
    assert failures == []
    assert features.ids == manifest.ids
    assert read_feature_file(features_path, 'egg').ids == manifest.ids
    assert len(list((tmp_path / 'masks').glob('*.pgm'))) == 12
    failure_file = pd.read_csv(features_path + commands.FAILURES_SUFFIX)
    assert list(failure_file.columns) == ['id', 'path', 'error']
    assert len(failure_file) == 0
    provenance = (tmp_path / ('features.csv' + PROVENANCE_SUFFIX)).read_text()
    assert 'egg' in provenance
    failure_provenance = tmp_path / (
        'features.csv' + commands.FAILURES_SUFFIX + PROVENANCE_SUFFIX)
    assert failure_provenance.read_text() == provenance


def test_preprocess_skips_broken_images(tmp_path, config, corpus):
    out, manifest = corpus
    broken = manifest.records[0]
    (out / (broken.image_id + '.png')).write_bytes(b'not a png')
    features_path = str(tmp_path / 'features.csv')
    features, failures = commands.cmd_preprocess(
        config, str(out / 'manifest.csv'), features_path, workers=2)
    assert len(features) == 11 and broken.image_id not in features
    assert [f[0] for f in failures] == [broken.image_id]
    failure_file = pd.read_csv(features_path + commands.FAILURES_SUFFIX)
    assert failure_file['id'].tolist() == [broken.image_id]


def test_preprocess_needs_a_manifest(config):
    with pytest.raises(ConfigError):
        commands.cmd_preprocess(config, None, 'out.csv')


def test_train_and_grade(tmp_path, config, feature_path):
    model_path = str(tmp_path / 'model.json')
    history_path = str(tmp_path / 'history.csv')
    net, history, accuracy = commands.cmd_train(config, feature_path,
                                                model_path, history_path)
    assert net.structure.layer_sizes == (768, 4, 1)
    assert 0.0 <= accuracy <= 1.0
    doc = json.loads(open(model_path).read())
    assert doc['task'] == 'egg' and doc['best_epoch'] == history.best_epoch
    assert doc['config']['seed'] == 3
    assert len(pd.read_csv(history_path)) == len(history)

    stream = io.StringIO()
    report_path = str(tmp_path / 'grades.csv')
    graded = commands.cmd_grade(config, model_path,
                                features_path=feature_path,
                                report_path=report_path, stream=stream)
    assert len(graded) == 12
    lines = stream.getvalue().splitlines()
    assert lines[0].split(',')[0] == graded[0][0]
    commands.cmd_grade(config, model_path, features_path=feature_path,
                       report_path=report_path, stream=io.StringIO())
    grades = pd.read_csv(report_path)
    assert list(grades.columns) == ['id', 'label'] and len(grades) == 24


def test_train_is_reproducible(tmp_path, config, feature_path):
    for name in ('a.json', 'b.json'):
        commands.cmd_train(config, feature_path, str(tmp_path / name))
    a = load_model(str(tmp_path / 'a.json'))
    b = load_model(str(tmp_path / 'b.json'))
    assert all((p == q).all() for p, q in zip(a.parameters(),
                                               b.parameters()))


def test_grade_images_by_file_stem(tmp_path, config, corpus):
    out, manifest = corpus
    features_path = str(tmp_path / 'features.csv')
    commands.cmd_preprocess(config, str(out / 'manifest.csv'), features_path)
    model_path = str(tmp_path / 'model.json')
    commands.cmd_train(config, features_path, model_path)
    images = [manifest.records[0].path, manifest.records[-1].path]
    graded = commands.cmd_grade(config, model_path, images,
                                stream=io.StringIO())
    assert [g[0] for g in graded] == [manifest.records[0].image_id,
                                      manifest.records[-1].image_id]
    assert all(g[1] in list(EggGrade) for g in graded)


def test_grade_rejects_other_task(tmp_path, config, feature_path):
    model_path = str(tmp_path / 'model.json')
    commands.cmd_train(config, feature_path, model_path)
    tomato = PipelineConfig(dict(SMALL, task='tomato'))
    with pytest.raises(ConfigError):
        commands.cmd_grade(tomato, model_path, stream=io.StringIO())


def test_search_then_grade(tmp_path, config, feature_path):
    out_path = str(tmp_path / 'search.json')
    log_path = str(tmp_path / 'search.csv')
    result = commands.cmd_search(config, feature_path, out_path, log_path)
    assert result.cycles == 1
    doc = json.loads(open(out_path).read())
    assert Molecule.from_dict(doc['best']) == result.best
    assert doc['model']['task'] == 'egg'
    assert pd.read_csv(log_path)['cycle'].tolist() == [0, 1]
    net, task = commands.load_grading_model(out_path)
    assert task == 'egg'
    assert net.structure.hidden_layers == result.best.expressed_widths
    graded = commands.cmd_grade(config, out_path,
                                features_path=feature_path,
                                stream=io.StringIO())
    assert len(graded) == 12


def _label_file(path, rows):
    pd.DataFrame(rows, columns=['id', 'label']).to_csv(path, index=False)
    return str(path)


def test_egg_report_with_revenue(tmp_path, config):
    rows = [('e%03d' % i, 'Accept') for i in range(56)] + \
        [('r%03d' % i, 'Reject') for i in range(56)]
    truth = _label_file(tmp_path / 'truth.csv', rows)
    predicted = [(i, 'Reject' if i.startswith('r') and int(i[1:]) >= 4
                  else 'Accept' if i.startswith('r') or int(i[1:]) < 44
                  else 'Reject') for i, _ in rows]
    predictions = _label_file(tmp_path / 'pred.csv', predicted)
    out_path = str(tmp_path / 'report.csv')
    result = commands.cmd_report(config, predictions, truth, out_path,
                                 human_accuracy=0.73, daily_volume=10000,
                                 unit_price=4, stream=io.StringIO())
    cm = result['confusion']
    assert (cm.tp, cm.fp, cm.fn, cm.tn) == (44, 4, 12, 52)
    assert result['accuracy_gain'] == pytest.approx(0.1271, abs=1e-4)
    frame = pd.read_csv(out_path)
    assert frame['metric'].tolist()[-3:] == ['accuracy_gain',
                                              'extra_items',
                                              'extra_revenue']
    items, revenue = result['revenue_gain']
    assert revenue == 4 * items


def test_tomato_report(tmp_path):
    config = PipelineConfig({'task': 'tomato'})
    truth = _label_file(tmp_path / 'truth.csv',
                        [('a', 'Green'), ('b', 'Pink'), ('c', 'Red')])
    predictions = _label_file(tmp_path / 'pred.csv',
                              [('a', 'Green'), ('b', 'Turning'),
                               ('c', 'Red')])
    stream = io.StringIO()
    result = commands.cmd_report(config, predictions, truth,
                                 stream=stream)
    assert result['ordinal_errors'].counts[:2] == (2, 1)
    assert result['frame']['metric'].tolist() == [
        'accuracy', 'within_one_stage', 'max_distance']
    assert 'Pink' in stream.getvalue()


def test_report_needs_truth_for_every_prediction(tmp_path, config):
    truth = _label_file(tmp_path / 'truth.csv', [('a', 'Accept')])
    predictions = _label_file(tmp_path / 'pred.csv', [('b', 'Accept')])
    with pytest.raises(KeyError):
        commands.cmd_report(config, predictions, truth,
                            stream=io.StringIO())


def test_graders_simulated_shift(tmp_path, config):
    stream = io.StringIO()
    out_path = str(tmp_path / 'hours.csv')
    curve = commands.cmd_graders(config, synth=True, items=40, graders=2,
                                 out_path=out_path, stream=stream)
    assert curve[1] == 1.0
    assert 'daily average' in stream.getvalue()
    assert pd.read_csv(out_path)['hour'].tolist() == list(range(1, 9))


def _egg_features(tmp_path, config):
    corpus = tmp_path / 'corpus'
    commands.cmd_synth(config, str(corpus))
    features_path = str(tmp_path / 'features.csv')
    _, failures = commands.cmd_preprocess(config,
                                          str(corpus / 'manifest.csv'),
                                          features_path, workers=2)
    assert failures == []
    return features_path


@pytest.mark.slow
def test_train_on_synthetic_eggs(tmp_path):
    config = PipelineConfig({
        'task': 'egg', 'seed': 0,
        'split': {'train': 0.5, 'test': 0.25, 'validation': 0.25},
        'structure': {'hidden_layers': [32]},
        'training': {'max_epochs': 500, 'patience': 50},
        'synth': {'count': 100, 'noise': 2.0, 'size': 64}})
    features_path = _egg_features(tmp_path, config)
    net, history, accuracy = commands.cmd_train(
        config, features_path, str(tmp_path / 'egg.json'))
    assert net.structure.layer_sizes == (768, 32, 1)
    # 25 held-out eggs per grade
    assert len(commands.split_features(
        config, read_feature_file(features_path, 'egg'))[2]) == 50
    assert accuracy >= 0.9


DESK_SEARCH = {'min_layers': 1, 'max_layers': 2, 'min_width': 4,
               'max_width': 16, 'capacity': 20, 'max_cycles': 100,
               'consensus_threshold': 0.8, 'max_epochs': 30, 'patience': 10,
               'workers': 2}


@pytest.mark.slow
def test_search_on_synthetic_eggs(tmp_path):
    base = {'task': 'egg', 'seed': 0,
            'split': {'train': 0.5, 'test': 0.25, 'validation': 0.25},
            'search': DESK_SEARCH,
            'synth': {'count': 20, 'noise': 2.0, 'size': 48}}
    features_path = _egg_features(tmp_path, PipelineConfig(base))

    @seeded_trials(10, 8)
    def search_run(seed):
        config = PipelineConfig(dict(base, seed=seed))
        result = commands.cmd_search(
            config, features_path, str(tmp_path / ('search%d.json' % seed)))
        best = result.log['best'].tolist()
        assert best == sorted(best)
        assert result.stopped_reason == STOP_CONSENSUS or \
            result.cycles == DESK_SEARCH['max_cycles']
        if result.stopped_reason == STOP_CONSENSUS:
            assert result.log['consensus'].iloc[-1] >= 0.8
        return result.best.molecular_weight >= 0.9

    search_run()
