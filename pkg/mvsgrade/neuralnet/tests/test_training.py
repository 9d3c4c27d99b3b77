import numpy as np
import pytest

from mvsgrade.constants import STOP_MAX_EPOCHS, STOP_PATIENCE
from mvsgrade.neuralnet.network import NetworkStructure, classify_batch, \
    init_network, mean_error
from mvsgrade.neuralnet.training import TrainingParams, train, \
    write_history
from mvsgrade.tests.tester import seeded_trials
from mvsgrade.tests.utils import cluster_features

XOR_INPUTS = np.array([[0., 0.], [0., 1.], [1., 0.], [1., 1.]])
XOR_TARGETS = np.array([[0.], [1.], [1.], [0.]])


@pytest.mark.slow
@seeded_trials(repeat=10, required=8)
def test_xor_converges(seed):
    net = init_network(NetworkStructure(2, (4,), 1), seed)
    params = TrainingParams(learning_rate=0.5, momentum=0.9,
                            max_epochs=10000, patience=10000,
                            shuffle_seed=seed)
    data = (XOR_INPUTS, XOR_TARGETS)
    best, history = train(net, data, data, params)
    return history.best_test_error < 0.05 and \
        mean_error(best, XOR_INPUTS, XOR_TARGETS) < 0.05


def test_zero_learning_rate_stops_after_patience():
    net = init_network(NetworkStructure(2, (3,), 1), seed=0)
    params = TrainingParams(learning_rate=0.0, momentum=0.0,
                            max_epochs=1000, patience=5)
    data = (XOR_INPUTS, XOR_TARGETS)
    best, history = train(net, data, data, params)
    assert history.best_epoch == 0
    assert len(history) == 6
    assert history.stopped_reason == STOP_PATIENCE
    assert len(set(history.test_errors)) == 1
    for p, q in zip(best.parameters(), net.parameters()):
        assert np.array_equal(p, q)


def test_zero_epochs_returns_the_initial_network():
    net = init_network(NetworkStructure(2, (3,), 1), seed=0)
    data = (XOR_INPUTS, XOR_TARGETS)
    best, history = train(net, data, data, TrainingParams(max_epochs=0))
    assert len(history) == 0 and history.best_epoch is None
    assert history.stopped_reason == STOP_MAX_EPOCHS
    assert np.array_equal(best.layers[0][0], net.layers[0][0])


def test_input_network_is_untouched():
    net = init_network(NetworkStructure(2, (3,), 1), seed=0)
    before = [p.copy() for p in net.parameters()]
    data = (XOR_INPUTS, XOR_TARGETS)
    train(net, data, data, TrainingParams(max_epochs=5))
    assert all(np.array_equal(p, q) for p, q in
               zip(before, net.parameters()))


def test_best_epoch_has_the_lowest_test_error():
    features = cluster_features('egg', 8, seed=1)
    train_set = features.subset(features.ids[::2])
    test_set = features.subset(features.ids[1::2])
    net = init_network(NetworkStructure(768, (), 1), seed=2)
    params = TrainingParams(learning_rate=0.2, momentum=0.5, max_epochs=60,
                            patience=10, shuffle_seed=3)
    best, history = train(net, train_set, test_set, params)
    errors = history.test_errors
    assert history.best_test_error == min(errors)
    assert errors.index(min(errors)) == history.best_epoch
    assert mean_error(best, test_set.values, test_set.targets()) == \
        pytest.approx(history.best_test_error)
    assert classify_batch(best, test_set.values, 'egg') == test_set.labels


def test_training_is_reproducible():
    features = cluster_features('egg', 4)
    train_set = features.subset(features.ids[::2])
    test_set = features.subset(features.ids[1::2])
    params = TrainingParams(max_epochs=15, shuffle_seed=9)
    runs = [train(init_network(NetworkStructure(768, (4,), 1), 5),
                  train_set, test_set, params) for _ in range(2)]
    assert runs[0][1].test_errors == runs[1][1].test_errors
    for p, q in zip(runs[0][0].parameters(), runs[1][0].parameters()):
        assert np.array_equal(p, q)


def test_rejects_bad_sets():
    features = cluster_features('egg', 2)
    net = init_network(NetworkStructure(768, (2,), 1), seed=0)
    with pytest.raises(ValueError):
        train(net, features, features, TrainingParams(max_epochs=1))
    empty = (np.zeros((0, 768)), np.zeros((0, 1)))
    with pytest.raises(ValueError):
        train(net, empty, features, TrainingParams(max_epochs=1))


def test_params_validation():
    with pytest.raises(ValueError):
        TrainingParams(learning_rate=-1)
    with pytest.raises(ValueError):
        TrainingParams(momentum=1.0)
    with pytest.raises(ValueError):
        TrainingParams(patience=0)
    params = TrainingParams.from_dict({'learning_rate': 0.2})
    assert params.replace(momentum=0.1).to_dict() == {
        'learning_rate': 0.2, 'momentum': 0.1, 'max_epochs': 1000,
        'patience': 100, 'shuffle_seed': 0}


def test_history_csv(tmp_path):
    data = (XOR_INPUTS, XOR_TARGETS)
    net = init_network(NetworkStructure(2, (2,), 1), seed=0)
    _, history = train(net, data, data, TrainingParams(max_epochs=3))
    path = tmp_path / 'history.csv'
    write_history(history, path)
    lines = path.read_text().splitlines()
    assert lines[0] == 'epoch,train_error,test_error'
    assert len(lines) == 4 and lines[1].startswith('0,')
