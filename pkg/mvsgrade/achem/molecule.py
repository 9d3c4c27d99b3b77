"""
Molecules encode one candidate network: hidden layer count, a width for
every possible hidden layer, the jump-connection flag, the hidden
activation, and the learning rate and momentum used to train it.
"""
import numpy as np

from mvsgrade.constants import MIN_LAYERS, MAX_LAYERS, MIN_WIDTH, \
    MAX_WIDTH, WIDTH_STEP, MIN_LEARNING_RATE, MAX_LEARNING_RATE, \
    MIN_MOMENTUM, MAX_MOMENTUM
from mvsgrade.neuralnet.network import ActivationKind, NetworkStructure

FACTORS = ('layers', 'widths', 'jump', 'activation', 'learning_rate',
           'momentum')
NUMERIC_FACTORS = ('layers', 'widths', 'learning_rate', 'momentum')


class SearchBounds(object):
    def __init__(self, min_layers=MIN_LAYERS, max_layers=MAX_LAYERS,
                 min_width=MIN_WIDTH, max_width=MAX_WIDTH,
                 width_step=WIDTH_STEP,
                 min_learning_rate=MIN_LEARNING_RATE,
                 max_learning_rate=MAX_LEARNING_RATE,
                 min_momentum=MIN_MOMENTUM, max_momentum=MAX_MOMENTUM,
                 activations=tuple(ActivationKind),
                 jump_options=(False, True)):
        self.min_layers = int(min_layers)
        self.max_layers = int(max_layers)
        self.min_width = int(min_width)
        self.max_width = int(max_width)
        self.width_step = int(width_step)
        self.min_learning_rate = float(min_learning_rate)
        self.max_learning_rate = float(max_learning_rate)
        self.min_momentum = float(min_momentum)
        self.max_momentum = float(max_momentum)
        self.activations = tuple(ActivationKind.parse(a)
                                 for a in activations)
        self.jump_options = tuple(sorted(set(bool(j)
                                             for j in jump_options)))
        self._check()

    def _check(self):
        if not 1 <= self.min_layers <= self.max_layers:
            raise ValueError('need 1 <= min_layers <= max_layers')
        if not 1 <= self.min_width <= self.max_width:
            raise ValueError('need 1 <= min_width <= max_width')
        if self.width_step < 1:
            raise ValueError('width_step must be >= 1')
        if not 0 < self.min_learning_rate <= self.max_learning_rate:
            raise ValueError('need 0 < min_learning_rate <= '
                             'max_learning_rate')
        if not 0 <= self.min_momentum <= self.max_momentum < 1:
            raise ValueError('need 0 <= min_momentum <= max_momentum < 1')
        if not self.activations:
            raise ValueError('at least one activation must be allowed')
        if not self.jump_options:
            raise ValueError('at least one jump option must be allowed')

    def clamp(self, molecule):
        """Copy of `molecule` with every factor forced into bounds."""
        widths = np.clip(molecule.layer_widths, self.min_width,
                         self.max_width)
        activation = molecule.activation
        if activation not in self.activations:
            activation = self.activations[0]
        jump = molecule.jump
        if jump not in self.jump_options:
            jump = self.jump_options[0]
        return Molecule(
            int(np.clip(molecule.hidden_layer_count, self.min_layers,
                        self.max_layers)),
            _resize(widths, self.max_layers, self.min_width),
            jump, activation,
            float(np.clip(molecule.learning_rate, self.min_learning_rate,
                          self.max_learning_rate)),
            float(np.clip(molecule.momentum, self.min_momentum,
                          self.max_momentum)))

    def contains(self, molecule):
        return molecule == self.clamp(molecule)

    def to_dict(self):
        return {'min_layers': self.min_layers,
                'max_layers': self.max_layers,
                'min_width': self.min_width,
                'max_width': self.max_width,
                'width_step': self.width_step,
                'min_learning_rate': self.min_learning_rate,
                'max_learning_rate': self.max_learning_rate,
                'min_momentum': self.min_momentum,
                'max_momentum': self.max_momentum,
                'activations': [a.value for a in self.activations],
                'jump_options': list(self.jump_options)}

    @classmethod
    def from_dict(cls, data):
        return cls(**data)


def _resize(widths, length, fill):
    widths = [int(w) for w in widths][:length]
    return tuple(widths + [int(fill)] * (length - len(widths)))


class Molecule(object):
    """
    Only the first `hidden_layer_count` widths are expressed; the rest stay
    in the genome so a later layer-count change can bring them back.
    Molecules compare equal when their encodings are equal.
    """

    def __init__(self, hidden_layer_count, layer_widths, jump, activation,
                 learning_rate, momentum, molecular_weight=None,
                 eval_seed=None):
        self.hidden_layer_count = int(hidden_layer_count)
        self.layer_widths = tuple(int(w) for w in layer_widths)
        self.jump = bool(jump)
        self.activation = ActivationKind.parse(activation)
        self.learning_rate = float(learning_rate)
        self.momentum = float(momentum)
        self.molecular_weight = molecular_weight
        self.eval_seed = eval_seed
        if not 1 <= self.hidden_layer_count <= len(self.layer_widths):
            raise ValueError('%d hidden layers but %d encoded widths' %
                             (self.hidden_layer_count,
                              len(self.layer_widths)))

    @property
    def expressed_widths(self):
        return self.layer_widths[:self.hidden_layer_count]

    @property
    def total_neurons(self):
        return sum(self.expressed_widths)

    def structure_key(self):
        """Structural identity; learning rate and momentum are excluded."""
        return (self.hidden_layer_count, self.expressed_widths, self.jump,
                self.activation.value)

    def genome(self):
        return (self.hidden_layer_count, self.layer_widths, self.jump,
                self.activation, self.learning_rate, self.momentum)

    def factor(self, name):
        return self.genome()[FACTORS.index(name)]

    def structure(self, input_size, output_size):
        return NetworkStructure(input_size, self.expressed_widths,
                                output_size, jump_connections=self.jump,
                                activation=self.activation)

    def replace(self, **changes):
        values = {'hidden_layer_count': self.hidden_layer_count,
                  'layer_widths': self.layer_widths,
                  'jump': self.jump,
                  'activation': self.activation,
                  'learning_rate': self.learning_rate,
                  'momentum': self.momentum}
        values.update(changes)
        return Molecule(**values)

    def evaluated(self, weight, eval_seed=None):
        molecule = self.replace()
        molecule.molecular_weight = float(weight)
        molecule.eval_seed = eval_seed
        return molecule

    def to_dict(self):
        return {'hidden_layer_count': self.hidden_layer_count,
                'layer_widths': list(self.layer_widths),
                'jump': self.jump,
                'activation': self.activation.value,
                'learning_rate': self.learning_rate,
                'momentum': self.momentum,
                'molecular_weight': self.molecular_weight,
                'eval_seed': self.eval_seed}

    @classmethod
    def from_dict(cls, data):
        return cls(**data)

    def __eq__(self, other):
        return isinstance(other, Molecule) and self.genome() == other.genome()

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash(self.genome())

    def __repr__(self):
        weight = '-' if self.molecular_weight is None \
            else '%.4f' % self.molecular_weight
        return 'Molecule<%s%s %s lr=%.4g m=%.3f w=%s>' % (
            list(self.expressed_widths), '+jump' if self.jump else '',
            self.activation.value, self.learning_rate, self.momentum, weight)


def differing_factors(a, b):
    return [name for name in FACTORS if a.factor(name) != b.factor(name)]


def random_molecule(bounds, rng):
    """
    Draw every factor independently: uniform integers and momentum,
    log-uniform learning rate. `rng` is a Generator or a seed.
    """
    rng = np.random.default_rng(rng)
    layers = rng.integers(bounds.min_layers, bounds.max_layers + 1)
    widths = rng.integers(bounds.min_width, bounds.max_width + 1,
                          size=bounds.max_layers)
    jump = bounds.jump_options[rng.integers(len(bounds.jump_options))]
    activation = bounds.activations[rng.integers(len(bounds.activations))]
    log_rate = rng.uniform(np.log(bounds.min_learning_rate),
                           np.log(bounds.max_learning_rate))
    momentum = rng.uniform(bounds.min_momentum, bounds.max_momentum)
    if bounds.min_learning_rate == bounds.max_learning_rate:
        learning_rate = bounds.min_learning_rate
    else:
        learning_rate = float(np.exp(log_rate))
    return bounds.clamp(Molecule(layers, widths, jump, activation,
                                 learning_rate, momentum))
