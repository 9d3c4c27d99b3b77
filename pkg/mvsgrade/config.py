"""
Pipeline configuration: one YAML document per run. Missing keys take the
defaults below, unknown keys are rejected, and the effective settings are
echoed into every artifact the pipeline writes.
"""
import copy
import logging
import numbers
import os

import yaml

from mvsgrade.constants import TASK_TOMATO, MVSGRADE_CONFIG, \
    DEFAULT_BLUR_SIGMA, DEFAULT_LOW_THRESHOLD, DEFAULT_HIGH_THRESHOLD, \
    DEFAULT_LEARNING_RATE, DEFAULT_MOMENTUM, DEFAULT_MAX_EPOCHS, \
    DEFAULT_PATIENCE, DEFAULT_CAPACITY, DEFAULT_MAX_CYCLES, \
    DEFAULT_CONSENSUS, DEFAULT_REACTION_RATE, DEFAULT_COLLISION_RATE, \
    BLEND_PROBABILITY, MIN_LAYERS, MAX_LAYERS, MIN_WIDTH, MAX_WIDTH, \
    WIDTH_STEP, MIN_LEARNING_RATE, MAX_LEARNING_RATE, MIN_MOMENTUM, \
    MAX_MOMENTUM, PATTERN_SIZE
from mvsgrade.datasets.labels import check_task, output_size
from mvsgrade.datasets.split import SplitSpec
from mvsgrade.datasets.synth import DEFAULT_NOISE, DEFAULT_SIZE
from mvsgrade.imaging.edges import EdgeParams
from mvsgrade.neuralnet.network import NetworkStructure, ActivationKind, \
    task_structure
from mvsgrade.neuralnet.training import TrainingParams
from mvsgrade.achem.molecule import SearchBounds
from mvsgrade.achem.reactor import Reactor

LOG = logging.getLogger(__name__)

DEFAULTS = {
    'task': TASK_TOMATO,
    'seed': 0,
    'paths': {
        'manifest': None,
        'features': None,
        'model': None,
        'reports': None,
        'out': None,
    },
    'edges': {
        'blur_sigma': DEFAULT_BLUR_SIGMA,
        'low_threshold': DEFAULT_LOW_THRESHOLD,
        'high_threshold': DEFAULT_HIGH_THRESHOLD,
        'relative_thresholds': True,
    },
    'training': {
        'learning_rate': DEFAULT_LEARNING_RATE,
        'momentum': DEFAULT_MOMENTUM,
        'max_epochs': DEFAULT_MAX_EPOCHS,
        'patience': DEFAULT_PATIENCE,
        'shuffle_seed': 0,
    },
    'structure': {
        # None selects the task's published structure
        'hidden_layers': None,
        'jump_connections': False,
        'activation': ActivationKind.SIGMOID.value,
        'output_activation': ActivationKind.SIGMOID.value,
    },
    'split': {
        # None selects the task's published per-class counts
        'train': None,
        'test': None,
        'validation': None,
    },
    'search': {
        'min_layers': MIN_LAYERS,
        'max_layers': MAX_LAYERS,
        'min_width': MIN_WIDTH,
        'max_width': MAX_WIDTH,
        'width_step': WIDTH_STEP,
        'min_learning_rate': MIN_LEARNING_RATE,
        'max_learning_rate': MAX_LEARNING_RATE,
        'min_momentum': MIN_MOMENTUM,
        'max_momentum': MAX_MOMENTUM,
        'activations': [k.value for k in ActivationKind],
        'jump_options': [False, True],
        'capacity': DEFAULT_CAPACITY,
        'max_cycles': DEFAULT_MAX_CYCLES,
        'consensus_threshold': DEFAULT_CONSENSUS,
        'reaction_rate': DEFAULT_REACTION_RATE,
        'collision_rate': DEFAULT_COLLISION_RATE,
        'blend_probability': BLEND_PROBABILITY,
        'max_epochs': DEFAULT_MAX_EPOCHS,
        'patience': DEFAULT_PATIENCE,
        'workers': 1,
    },
    'synth': {
        'count': 100,
        'noise': DEFAULT_NOISE,
        'size': DEFAULT_SIZE,
    },
}

_BOUND_KEYS = ('min_layers', 'max_layers', 'min_width', 'max_width',
               'width_step', 'min_learning_rate', 'max_learning_rate',
               'min_momentum', 'max_momentum', 'activations', 'jump_options')
_REACTOR_KEYS = ('capacity', 'max_cycles', 'consensus_threshold',
                 'reaction_rate', 'collision_rate', 'blend_probability',
                 'workers')


class ConfigError(ValueError):
    pass


def _merge(defaults, values, where):
    if not isinstance(values, dict):
        raise ConfigError('%s must be a mapping, got %r' % (where, values))
    merged = copy.deepcopy(defaults)
    for key, value in values.items():
        if key not in defaults:
            raise ConfigError('unknown configuration key %s%s' %
                              (where + '.' if where else '', key))
        if isinstance(defaults[key], dict):
            merged[key] = _merge(defaults[key], value or {},
                                 (where + '.' if where else '') + key)
        else:
            merged[key] = value
    return merged


class PipelineConfig(object):
    def __init__(self, values=None, source=None):
        self.source = source
        self.values = _merge(DEFAULTS, values or {}, '')
        self.validate()

    @classmethod
    def load(cls, path=None):
        """
        Read `path`, or the default location when it exists. No file at the
        default location yields the built-in defaults.
        """
        explicit = path is not None
        path = os.path.expanduser(os.fspath(path) if explicit
                                  else MVSGRADE_CONFIG)
        if not os.path.exists(path):
            if explicit:
                raise ConfigError('no configuration file at %s' % path)
            return cls()
        try:
            with open(path, 'r', encoding='utf-8') as fin:
                values = yaml.safe_load(fin)
        except yaml.YAMLError as e:
            raise ConfigError('%s: %s' % (path, e))
        LOG.info('Loaded configuration from %s', path)
        return cls(values or {}, source=path)

    def validate(self):
        try:
            check_task(self.task)
            self.edge_params()
            self.training_params()
            self.bounds()
            self.reactor()
            self.structure()
        except (TypeError, ValueError) as e:
            if isinstance(e, ConfigError):
                raise
            raise ConfigError('invalid configuration: %s' % e)
        split = [self.values['split'][k]
                 for k in ('train', 'test', 'validation')]
        if any(v is not None for v in split) and \
                any(v is None for v in split):
            raise ConfigError('split needs train, test and validation '
                              'together')
        synth = self.values['synth']
        if int(synth['count']) < 1 or float(synth['noise']) < 0 or \
                int(synth['size']) < 1:
            raise ConfigError('synth count and size must be positive and '
                              'noise non-negative')

    def set(self, section, key, value):
        return self.update(section, {key: value})

    def update(self, section, values):
        """
        Set several keys of one section, validating once. A rejected update
        leaves the configuration unchanged.
        """
        target = self.values if section is None else self.values[section]
        known = DEFAULTS if section is None else DEFAULTS[section]
        for key in values:
            if key not in known:
                raise ConfigError('unknown configuration key %s' %
                                  (key if section is None
                                   else '%s.%s' % (section, key)))
        saved = copy.deepcopy(target)
        target.update(values)
        try:
            self.validate()
        except ConfigError:
            target.clear()
            target.update(saved)
            raise
        return self

    @property
    def task(self):
        return self.values['task']

    @property
    def seed(self):
        return int(self.values['seed'])

    def path(self, name):
        value = self.values['paths'][name]
        return os.path.expanduser(value) if value else None

    def edge_params(self):
        return EdgeParams.from_dict(self.values['edges'])

    def training_params(self):
        return TrainingParams.from_dict(self.values['training'])

    def structure(self):
        section = self.values['structure']
        hidden = section['hidden_layers']
        if hidden is None:
            hidden = task_structure(self.task).hidden_layers
        return NetworkStructure(PATTERN_SIZE, hidden, output_size(self.task),
                                jump_connections=section['jump_connections'],
                                activation=section['activation'],
                                output_activation=section[
                                    'output_activation'])

    def split_spec(self, manifest=None):
        """
        Integer values are per-class counts; fractions need the manifest
        they apply to.
        """
        section = self.values['split']
        parts = [section[k] for k in ('train', 'test', 'validation')]
        if all(v is None for v in parts):
            return SplitSpec.for_task(self.task, self.seed)
        if all(isinstance(v, numbers.Integral) and not isinstance(v, bool)
               for v in parts):
            return SplitSpec(tuple(parts), self.seed)
        if manifest is None:
            raise ConfigError('fractional split needs a manifest')
        return SplitSpec.from_fractions(manifest,
                                        tuple(float(v) for v in parts),
                                        self.seed)

    def bounds(self):
        search = self.values['search']
        return SearchBounds(**{k: search[k] for k in _BOUND_KEYS})

    def reactor(self):
        search = self.values['search']
        return Reactor(self.bounds(), rng_seed=self.seed,
                       **{k: search[k] for k in _REACTOR_KEYS})

    def to_dict(self):
        return copy.deepcopy(self.values)

    def dump(self):
        return yaml.safe_dump(self.values, default_flow_style=False,
                              sort_keys=True)
