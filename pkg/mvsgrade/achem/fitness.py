import logging

import numpy as np

from mvsgrade.constants import DEFAULT_MAX_EPOCHS, DEFAULT_PATIENCE
from mvsgrade.datasets.labels import output_size
from mvsgrade.neuralnet.network import TrainingDivergedError, \
    init_network, classify_batch
from mvsgrade.neuralnet.training import TrainingParams, train
from mvsgrade.utils import derive_seed

LOG = logging.getLogger(__name__)


class SearchData(object):
    """Disjoint train/test/validation FeatureSets of one task."""

    def __init__(self, train, test, validation):
        tasks = {train.task, test.task, validation.task}
        if len(tasks) != 1:
            raise ValueError('feature sets mix tasks %s' % sorted(tasks))
        for name, part in (('training', train), ('test', test),
                           ('validation', validation)):
            if not len(part):
                raise ValueError('%s set is empty' % name)
        self.train = train
        self.test = test
        self.validation = validation
        self.task = tasks.pop()

    @property
    def input_size(self):
        return self.train.values.shape[1]


def train_molecule(molecule, data, eval_seed, max_epochs=DEFAULT_MAX_EPOCHS,
                   patience=DEFAULT_PATIENCE):
    """
    Build and train the network a molecule encodes. Deterministic in
    `eval_seed`, so the search's best molecule can be retrained exactly.
    :return: (network at its best test epoch, TrainingHistory)
    """
    structure = molecule.structure(data.input_size, output_size(data.task))
    net = init_network(structure, derive_seed(eval_seed, 0))
    params = TrainingParams(molecule.learning_rate, molecule.momentum,
                            max_epochs, patience,
                            shuffle_seed=derive_seed(eval_seed, 1))
    return train(net, data.train, data.test, params)


def validation_rate(net, data):
    predicted = classify_batch(net, data.validation.values, data.task)
    return float(np.mean([p is t for p, t in
                          zip(predicted, data.validation.labels)]))


def evaluate_molecule(molecule, data, task, eval_seed,
                      max_epochs=DEFAULT_MAX_EPOCHS,
                      patience=DEFAULT_PATIENCE):
    """
    Train the encoded network and score it by its validation
    classification rate. A diverged training scores 0.
    :return: copy of `molecule` with molecular_weight and eval_seed set
    """
    if task != data.task:
        raise ValueError('molecule evaluated for %s on %s features' %
                         (task, data.task))
    try:
        net, _ = train_molecule(molecule, data, eval_seed, max_epochs,
                                patience)
        weight = validation_rate(net, data)
    except TrainingDivergedError as e:
        LOG.debug('%r diverged: %s', molecule, e)
        weight = 0.0
    LOG.debug('%r scored %.4f', molecule, weight)
    return molecule.evaluated(weight, eval_seed)


class DatasetFitness(object):
    """Picklable fitness callable for the reactor's worker processes."""

    def __init__(self, data, max_epochs=DEFAULT_MAX_EPOCHS,
                 patience=DEFAULT_PATIENCE):
        self.data = data
        self.max_epochs = max_epochs
        self.patience = patience

    def __call__(self, molecule, eval_seed):
        return evaluate_molecule(molecule, self.data, self.data.task,
                                 eval_seed, self.max_epochs,
                                 self.patience).molecular_weight
