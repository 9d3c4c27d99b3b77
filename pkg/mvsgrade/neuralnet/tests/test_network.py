import itertools

import numpy as np
import pytest

from mvsgrade.datasets.labels import EggGrade, TomatoStage
from mvsgrade.neuralnet.network import ActivationKind, NetworkShapeError, \
    NetworkStructure, TrainingDivergedError, backprop_step, classify, \
    classify_batch, decode_output, forward, gradients, init_network, \
    mean_error, task_structure
from mvsgrade.neuralnet.training import TrainingParams


def _numeric_gradients(net, x, target, h=1e-5):
    numeric = []
    for param in net.parameters():
        grad = np.zeros_like(param)
        for index in np.ndindex(param.shape):
            saved = param[index]
            param[index] = saved + h
            plus = gradients(net, x, target)[1]
            param[index] = saved - h
            minus = gradients(net, x, target)[1]
            param[index] = saved
            grad[index] = (plus - minus) / (2 * h)
        numeric.append(grad)
    return numeric


def _random_structure(rng, activation, jump):
    hidden = tuple(int(w) for w in rng.integers(1, 6, rng.integers(1, 3)))
    output_activation = list(ActivationKind)[rng.integers(3)]
    return NetworkStructure(int(rng.integers(2, 6)), hidden,
                            int(rng.integers(1, 4)), jump_connections=jump,
                            activation=activation,
                            output_activation=output_activation)


def test_gradients_match_finite_differences():
    rng = np.random.default_rng(0)
    # four random shapes per (hidden activation, jump) pair
    cases = list(itertools.product(list(ActivationKind), (False, True))) * 4
    for activation, jump in cases:
        structure = _random_structure(rng, activation, jump)
        net = init_network(structure, seed=int(rng.integers(2 ** 31)))
        x = rng.uniform(-1, 1, structure.input_size)
        target = rng.uniform(0, 1, structure.output_size)
        analytic, _ = gradients(net, x, target)
        numeric = _numeric_gradients(net, x, target)
        assert len(analytic) == len(net.parameters())
        for a, n in zip(analytic, numeric):
            assert np.allclose(a, n, rtol=1e-4, atol=1e-7), structure
    assert len(cases) >= 20


def test_structure_shapes():
    structure = NetworkStructure(4, (3,), 2, jump_connections=True)
    assert structure.layer_sizes == (4, 3, 2)
    assert structure.block_shapes() == [(3, 4), (2, 3), (2, 4)]
    assert structure.weight_count() == 4 * 3 + 3 + 3 * 2 + 2 + 4 * 2
    net = init_network(structure, seed=1)
    assert net.weight_count() == structure.weight_count()
    assert repr(structure) == '4-[3]-2+jump(sigmoid/sigmoid)'
    assert NetworkStructure.from_dict(structure.to_dict()) == structure


def test_no_hidden_layers_is_allowed():
    net = init_network(NetworkStructure(3, (), 1), seed=0)
    assert len(net.layers) == 1
    assert forward(net, np.zeros(3)).shape == (1,)


def test_structure_validation():
    with pytest.raises(ValueError):
        NetworkStructure(0, (3,), 1)
    with pytest.raises(ValueError):
        NetworkStructure(4, (3, 0), 1)
    with pytest.raises(ValueError):
        NetworkStructure(4, (3,), 1, activation='relu')


def test_published_structures():
    assert task_structure('tomato').layer_sizes == (768, 768, 768, 6)
    assert task_structure('egg').layer_sizes == (768, 768, 1)


def test_init_is_seeded_and_bounded():
    structure = NetworkStructure(16, (8,), 2, jump_connections=True)
    a = init_network(structure, seed=3)
    b = init_network(structure, seed=3)
    for p, q in zip(a.parameters(), b.parameters()):
        assert np.array_equal(p, q)
    assert np.all(np.abs(a.layers[0][0]) <= 1 / 4.0)
    # output neurons count the jump inputs in their fan-in
    assert np.all(np.abs(a.jump) <= 1 / np.sqrt(8 + 16))


def test_forward_shapes_and_errors():
    net = init_network(NetworkStructure(4, (3,), 2), seed=0)
    assert forward(net, np.zeros(4)).shape == (2,)
    assert forward(net, np.zeros((5, 4))).shape == (5, 2)
    with pytest.raises(NetworkShapeError):
        forward(net, np.zeros(3))
    with pytest.raises(NetworkShapeError):
        gradients(net, np.zeros(4), np.zeros(3))


def test_plain_gradient_step_without_momentum():
    net = init_network(NetworkStructure(3, (2,), 1), seed=4)
    x, target = np.array([0.2, -0.1, 0.5]), np.array([1.0])
    before = [p.copy() for p in net.parameters()]
    grads, _ = gradients(net, x, target)
    params = TrainingParams(learning_rate=0.3, momentum=0.0)
    backprop_step(net, x, target, params)
    for old, new, g in zip(before, net.parameters(), grads):
        assert np.allclose(new, old - 0.3 * g)


def test_momentum_carries_the_previous_step():
    net = init_network(NetworkStructure(3, (2,), 1), seed=4)
    x, target = np.array([0.2, -0.1, 0.5]), np.array([1.0])
    params = TrainingParams(learning_rate=0.3, momentum=0.5)
    _, velocity, _ = backprop_step(net, x, target, params)
    before = [p.copy() for p in net.parameters()]
    grads, _ = gradients(net, x, target)
    _, second, _ = backprop_step(net, x, target, params, velocity)
    for old, new, g, v in zip(before, net.parameters(), grads, velocity):
        assert np.allclose(new, old + 0.5 * v - 0.3 * g)
    assert all(np.allclose(s, n - o) for s, n, o in
               zip(second, net.parameters(), before))


def test_divergence_is_reported():
    structure = NetworkStructure(2, (2,), 1, activation='linear',
                                 output_activation='linear')
    net = init_network(structure, seed=0)
    params = TrainingParams(learning_rate=1e3, momentum=0.0)
    with pytest.raises(TrainingDivergedError):
        for _ in range(200):
            backprop_step(net, np.array([1e3, -1e3]), np.array([1e3]),
                          params)


def test_decode_output():
    assert decode_output([0.1, 0.9, 0.9, 0, 0, 0], 'tomato') is \
        TomatoStage.Breakers
    assert decode_output([0.5], 'egg') is EggGrade.Accept
    assert decode_output([0.4999], 'egg') is EggGrade.Reject


def test_classify_checks_output_width():
    net = init_network(NetworkStructure(4, (3,), 1), seed=0)
    assert classify(net, np.zeros(4), 'egg') in list(EggGrade)
    with pytest.raises(NetworkShapeError):
        classify(net, np.zeros(4), 'tomato')
    assert classify_batch(net, np.zeros((0, 4)), 'egg') == []
    assert len(classify_batch(net, np.zeros((3, 4)), 'egg')) == 3


def test_mean_error():
    structure = NetworkStructure(1, (), 1, output_activation='linear')
    net = init_network(structure, seed=0)
    net.layers[0][0][:] = 0.0
    net.layers[0][1][:] = 0.0
    assert mean_error(net, [[1.0], [2.0]], [[1.0], [3.0]]) == \
        pytest.approx((0.5 + 4.5) / 2)
