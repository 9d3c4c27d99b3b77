import enum
import logging

import numpy as np
from scipy.special import expit

from mvsgrade.constants import PATTERN_SIZE, TASK_TOMATO, \
    EGG_ACCEPT_THRESHOLD
from mvsgrade.datasets.labels import TomatoStage, EggGrade, output_size, \
    check_task

LOG = logging.getLogger(__name__)


class NetworkShapeError(ValueError):
    pass


class TrainingDivergedError(ArithmeticError):
    pass


class ActivationKind(enum.Enum):
    SIGMOID = 'sigmoid'
    TANH = 'tanh'
    LINEAR = 'linear'

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError('unknown activation %r (expected one of %s)' %
                             (value, ', '.join(k.value for k in cls)))

    def apply(self, z):
        if self is ActivationKind.SIGMOID:
            return expit(z)
        if self is ActivationKind.TANH:
            return np.tanh(z)
        return z

    def derivative(self, a):
        """Derivative expressed through the activation value `a`."""
        if self is ActivationKind.SIGMOID:
            return a * (1.0 - a)
        if self is ActivationKind.TANH:
            return 1.0 - a * a
        return np.ones_like(a)


class NetworkStructure(object):
    """
    Layer widths and wiring of a feed-forward network. With jump
    connections the input layer also feeds the output layer directly.
    """

    def __init__(self, input_size, hidden_layers, output_size,
                 jump_connections=False, activation=ActivationKind.SIGMOID,
                 output_activation=ActivationKind.SIGMOID):
        self.input_size = int(input_size)
        self.hidden_layers = tuple(int(w) for w in hidden_layers)
        self.output_size = int(output_size)
        self.jump_connections = bool(jump_connections)
        self.activation = ActivationKind.parse(activation)
        self.output_activation = ActivationKind.parse(output_activation)
        if self.input_size < 1 or self.output_size < 1:
            raise ValueError('input and output sizes must be >= 1')
        if any(w < 1 for w in self.hidden_layers):
            raise ValueError('hidden layer widths must be >= 1, got %s' %
                             (self.hidden_layers,))

    @property
    def layer_sizes(self):
        return (self.input_size,) + self.hidden_layers + (self.output_size,)

    @property
    def total_neurons(self):
        return sum(self.hidden_layers)

    def block_shapes(self):
        """(rows, cols) of each weight block, jump block last."""
        sizes = self.layer_sizes
        shapes = [(sizes[i + 1], sizes[i]) for i in range(len(sizes) - 1)]
        if self.jump_connections:
            shapes.append((self.output_size, self.input_size))
        return shapes

    def weight_count(self):
        sizes = self.layer_sizes
        count = sum(sizes[i] * sizes[i + 1] + sizes[i + 1]
                    for i in range(len(sizes) - 1))
        if self.jump_connections:
            count += self.input_size * self.output_size
        return count

    def to_dict(self):
        return {'input_size': self.input_size,
                'hidden_layers': list(self.hidden_layers),
                'output_size': self.output_size,
                'jump_connections': self.jump_connections,
                'activation': self.activation.value,
                'output_activation': self.output_activation.value}

    @classmethod
    def from_dict(cls, data):
        return cls(data['input_size'], data['hidden_layers'],
                   data['output_size'],
                   jump_connections=data.get('jump_connections', False),
                   activation=data.get('activation', 'sigmoid'),
                   output_activation=data.get('output_activation',
                                              'sigmoid'))

    def __eq__(self, other):
        return isinstance(other, NetworkStructure) and \
            self.to_dict() == other.to_dict()

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash((self.input_size, self.hidden_layers, self.output_size,
                     self.jump_connections, self.activation,
                     self.output_activation))

    def __repr__(self):
        return '%d-%s-%d%s(%s/%s)' % (
            self.input_size, list(self.hidden_layers), self.output_size,
            '+jump' if self.jump_connections else '',
            self.activation.value, self.output_activation.value)


def task_structure(task):
    """Two 768-wide hidden layers for tomatoes, one for eggs."""
    if check_task(task) == TASK_TOMATO:
        hidden = (768, 768)
    else:
        hidden = (768,)
    return NetworkStructure(PATTERN_SIZE, hidden, output_size(task))


class Network(object):
    """
    Weights of a structure: layers[i] = (W, b) with W shaped (out, in), plus
    an optional (output, input) jump block feeding the output layer.
    """

    def __init__(self, structure, layers, jump=None):
        self.structure = structure
        self.layers = [(np.asarray(w, dtype=np.float64),
                        np.asarray(b, dtype=np.float64)) for w, b in layers]
        self.jump = None if jump is None else np.asarray(jump,
                                                         dtype=np.float64)
        shapes = [w.shape for w, _ in self.layers]
        if self.jump is not None:
            shapes.append(self.jump.shape)
        if shapes != structure.block_shapes():
            raise NetworkShapeError('weight blocks %s do not match %r' %
                                    (shapes, structure))
        for w, b in self.layers:
            if b.shape != (w.shape[0],):
                raise NetworkShapeError('bias shape %s for block %s' %
                                        (b.shape, w.shape))

    def parameters(self):
        """Weight arrays in a fixed order: W1, b1, ..., WL, bL[, jump]."""
        params = []
        for w, b in self.layers:
            params.extend((w, b))
        if self.jump is not None:
            params.append(self.jump)
        return params

    def copy(self):
        jump = None if self.jump is None else self.jump.copy()
        return Network(self.structure,
                       [(w.copy(), b.copy()) for w, b in self.layers], jump)

    def is_finite(self):
        return all(np.all(np.isfinite(p)) for p in self.parameters())

    def weight_count(self):
        return sum(p.size for p in self.parameters())


def init_network(structure, seed):
    """
    Uniform weights and biases in [-r, r] with r = 1/sqrt(fan-in) of the
    receiving neuron; output neurons count jump inputs in their fan-in.
    """
    rng = np.random.default_rng(seed)
    layers = []
    sizes = structure.layer_sizes
    last = len(sizes) - 2
    output_radius = None
    for i in range(len(sizes) - 1):
        fan_in = sizes[i]
        if i == last and structure.jump_connections:
            fan_in += structure.input_size
        radius = 1.0 / np.sqrt(fan_in)
        w = rng.uniform(-radius, radius, (sizes[i + 1], sizes[i]))
        b = rng.uniform(-radius, radius, sizes[i + 1])
        layers.append((w, b))
        output_radius = radius
    jump = None
    if structure.jump_connections:
        jump = rng.uniform(-output_radius, output_radius,
                           (structure.output_size, structure.input_size))
    return Network(structure, layers, jump)


def _as_batch(net, inputs):
    x = np.asarray(getattr(inputs, 'values', inputs), dtype=np.float64)
    single = x.ndim == 1
    if single:
        x = x[np.newaxis, :]
    if x.ndim != 2 or x.shape[1] != net.structure.input_size:
        raise NetworkShapeError('input length %s does not match %d inputs' %
                                (x.shape[-1:], net.structure.input_size))
    return x, single


def propagate(net, batch):
    """Activations of every layer for a 2-D batch, input layer first."""
    structure = net.structure
    activations = [batch]
    a = batch
    last = len(net.layers) - 1
    for i, (w, b) in enumerate(net.layers):
        z = a @ w.T + b
        if i == last:
            if net.jump is not None:
                z = z + batch @ net.jump.T
            a = structure.output_activation.apply(z)
        else:
            a = structure.activation.apply(z)
        activations.append(a)
    return activations


def forward(net, inputs):
    """
    Output activations for one input vector (or SpectralPattern), or for
    each row of a 2-D batch.
    """
    x, single = _as_batch(net, inputs)
    out = propagate(net, x)[-1]
    return out[0] if single else out


def gradients(net, inputs, target):
    """
    Gradient of E = sum((output - target)**2) / 2 for one sample.
    :return: (gradients in `Network.parameters()` order, E)
    """
    x, _ = _as_batch(net, inputs)
    target = np.asarray(target, dtype=np.float64).reshape(-1)
    structure = net.structure
    if target.shape != (structure.output_size,):
        raise NetworkShapeError('target length %d does not match %d '
                                'outputs' % (target.size,
                                             structure.output_size))
    acts = [a[0] for a in propagate(net, x)]
    output = acts[-1]
    error = 0.5 * float(np.sum((output - target) ** 2))

    delta = (output - target) * structure.output_activation.derivative(
        output)
    layer_grads = [None] * len(net.layers)
    for i in range(len(net.layers) - 1, -1, -1):
        layer_grads[i] = (np.outer(delta, acts[i]), delta)
        if i > 0:
            w = net.layers[i][0]
            delta = (w.T @ delta) * structure.activation.derivative(acts[i])
    grads = []
    for gw, gb in layer_grads:
        grads.extend((gw, gb))
    if net.jump is not None:
        output_delta = layer_grads[-1][1]
        grads.append(np.outer(output_delta, acts[0]))
    return grads, error


def zero_velocity(net):
    return [np.zeros_like(p) for p in net.parameters()]


def backprop_step(net, inputs, target, params, velocity=None):
    """
    One online update: v = momentum * v - learning_rate * grad, w += v.
    Updates `net` in place; callers train a private copy.
    :return: (net, velocity, sample error before the update)
    """
    grads, error = gradients(net, inputs, target)
    if not np.isfinite(error) or \
            not all(np.all(np.isfinite(g)) for g in grads):
        raise TrainingDivergedError('non-finite error or gradient')
    if velocity is None:
        velocity = zero_velocity(net)
    new_velocity = []
    for param, grad, previous in zip(net.parameters(), grads, velocity):
        step = params.momentum * previous - params.learning_rate * grad
        param += step
        new_velocity.append(step)
    if not net.is_finite():
        raise TrainingDivergedError('weights became non-finite')
    return net, new_velocity, error


def _check_task_shape(net, task):
    expected = output_size(task)
    if net.structure.output_size != expected:
        raise NetworkShapeError('%s grading needs %d outputs, network has %d'
                                % (task, expected,
                                   net.structure.output_size))


def decode_output(output, task):
    """Tomato: argmax, lowest stage wins ties. Egg: Accept iff >= 0.5."""
    output = np.asarray(output)
    if task == TASK_TOMATO:
        return TomatoStage(int(np.argmax(output)))
    check_task(task)
    return EggGrade.Accept if output[0] >= EGG_ACCEPT_THRESHOLD \
        else EggGrade.Reject


def classify(net, pattern, task):
    _check_task_shape(net, task)
    return decode_output(forward(net, pattern), task)


def classify_batch(net, inputs, task):
    _check_task_shape(net, task)
    x, _ = _as_batch(net, inputs)
    if x.shape[0] == 0:
        return []
    return [decode_output(row, task) for row in forward(net, x)]


def mean_error(net, inputs, targets):
    """Mean over samples of sum((output - target)**2) / 2."""
    outputs = forward(net, np.atleast_2d(inputs))
    targets = np.asarray(targets, dtype=np.float64).reshape(outputs.shape)
    return float(np.mean(0.5 * np.sum((outputs - targets) ** 2, axis=1)))

