import logging

import numpy as np
import pandas as pd

from mvsgrade.constants import DEFAULT_LEARNING_RATE, DEFAULT_MOMENTUM, \
    DEFAULT_MAX_EPOCHS, DEFAULT_PATIENCE, STOP_PATIENCE, STOP_MAX_EPOCHS
from mvsgrade.neuralnet.network import backprop_step, mean_error, \
    zero_velocity, TrainingDivergedError
from mvsgrade.utils import atomic_write, write_provenance

LOG = logging.getLogger(__name__)

_PROGRESS_INTERVAL = 100


class TrainingParams(object):
    """
    Online backpropagation settings. Samples are visited in a fresh
    shuffled order every epoch, drawn from `shuffle_seed`.
    """

    def __init__(self, learning_rate=DEFAULT_LEARNING_RATE,
                 momentum=DEFAULT_MOMENTUM, max_epochs=DEFAULT_MAX_EPOCHS,
                 patience=DEFAULT_PATIENCE, shuffle_seed=0):
        if not learning_rate >= 0:
            raise ValueError('learning_rate must be >= 0, got %r' %
                             learning_rate)
        if not 0 <= momentum < 1:
            raise ValueError('momentum must lie in [0, 1), got %r' % momentum)
        if int(max_epochs) < 0:
            raise ValueError('max_epochs must be >= 0')
        if int(patience) < 1:
            raise ValueError('patience must be >= 1')
        self.learning_rate = float(learning_rate)
        self.momentum = float(momentum)
        self.max_epochs = int(max_epochs)
        self.patience = int(patience)
        self.shuffle_seed = int(shuffle_seed)

    def replace(self, **changes):
        values = self.to_dict()
        values.update(changes)
        return TrainingParams(**values)

    def to_dict(self):
        return {'learning_rate': self.learning_rate,
                'momentum': self.momentum,
                'max_epochs': self.max_epochs,
                'patience': self.patience,
                'shuffle_seed': self.shuffle_seed}

    @classmethod
    def from_dict(cls, data):
        return cls(**data)


class EpochRecord(object):
    def __init__(self, epoch, train_error, test_error):
        self.epoch = epoch
        self.train_error = train_error
        self.test_error = test_error

    def to_dict(self):
        return {'epoch': self.epoch,
                'train_error': self.train_error,
                'test_error': self.test_error}


class TrainingHistory(object):
    def __init__(self):
        self.records = []
        self.best_epoch = None
        self.stopped_reason = None

    def __len__(self):
        return len(self.records)

    @property
    def best_test_error(self):
        if self.best_epoch is None:
            return None
        return self.records[self.best_epoch].test_error

    @property
    def test_errors(self):
        return [r.test_error for r in self.records]

    def to_frame(self):
        return pd.DataFrame([r.to_dict() for r in self.records],
                            columns=['epoch', 'train_error', 'test_error'])


def _arrays(data, name):
    """Accept a FeatureSet or an (inputs, targets) pair."""
    if hasattr(data, 'targets') and hasattr(data, 'values'):
        inputs, targets, ids = data.values, data.targets(), data.ids
    else:
        inputs, targets = data[0], data[1]
        ids = data[2] if len(data) > 2 else None
    inputs = np.atleast_2d(np.asarray(inputs, dtype=np.float64))
    targets = np.asarray(targets, dtype=np.float64)
    if targets.ndim == 1:
        targets = targets[:, np.newaxis]
    if inputs.shape[0] == 0:
        raise ValueError('%s set is empty' % name)
    if targets.shape[0] != inputs.shape[0]:
        raise ValueError('%s set has %d inputs but %d targets' %
                         (name, inputs.shape[0], targets.shape[0]))
    return inputs, targets, ids


def train(net, train_set, test_set, params):
    """
    Online backpropagation with test-set early stopping.

    Training stops once the mean test error has not improved for
    `params.patience` consecutive epochs, or after `params.max_epochs`.
    :return: (copy of the network at its best test-error epoch, history)
    """
    x_train, t_train, train_ids = _arrays(train_set, 'training')
    x_test, t_test, test_ids = _arrays(test_set, 'test')
    if train_ids is not None and test_ids is not None:
        shared = set(train_ids) & set(test_ids)
        if shared:
            raise ValueError('training and test sets share %d ids, e.g. %s'
                             % (len(shared), sorted(shared)[0]))

    work = net.copy()
    best = work.copy()
    best_error = np.inf
    history = TrainingHistory()
    velocity = zero_velocity(work)
    rng = np.random.default_rng(params.shuffle_seed)
    history.stopped_reason = STOP_MAX_EPOCHS

    for epoch in range(params.max_epochs):
        total = 0.0
        for i in rng.permutation(x_train.shape[0]):
            _, velocity, error = backprop_step(work, x_train[i], t_train[i],
                                               params, velocity)
            total += error
        train_error = total / x_train.shape[0]
        test_error = mean_error(work, x_test, t_test)
        if not np.isfinite(test_error):
            raise TrainingDivergedError('test error became non-finite at '
                                        'epoch %d' % epoch)
        history.records.append(EpochRecord(epoch, train_error, test_error))
        LOG.debug('epoch %d: train %.6f test %.6f', epoch, train_error,
                  test_error)
        if epoch % _PROGRESS_INTERVAL == 0:
            LOG.info('epoch %d: train error %.6f, test error %.6f', epoch,
                     train_error, test_error)

        if test_error < best_error:
            best_error = test_error
            history.best_epoch = epoch
            best = work.copy()
        elif epoch - history.best_epoch >= params.patience:
            history.stopped_reason = STOP_PATIENCE
            break

    LOG.info('Training stopped (%s) after %d epochs; best epoch %s, test '
             'error %s', history.stopped_reason, len(history),
             history.best_epoch, history.best_test_error)
    return best, history


def write_history(history, path, config=None):
    with atomic_write(path) as fout:
        history.to_frame().to_csv(fout, index=False, lineterminator='\n')
    write_provenance(path, config)
    return path
