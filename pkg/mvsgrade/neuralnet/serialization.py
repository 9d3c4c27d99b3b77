"""
Model documents: versioned JSON with the structure and one flat weight
array per block. Python's float repr round-trips binary64 exactly, so a
saved model reloads bit-for-bit and reruns write identical bytes.
"""
import json
import os

import numpy as np

from mvsgrade.constants import MODEL_FORMAT, MODEL_VERSION
from mvsgrade.neuralnet.network import Network, NetworkStructure
from mvsgrade.utils import atomic_write


class ModelFormatError(ValueError):
    pass


def _flat(array):
    return [float(v) for v in np.asarray(array).ravel()]


def model_to_dict(net, config=None, extra=None):
    blocks = []
    for i, (w, b) in enumerate(net.layers):
        blocks.append({'name': 'layer%d' % (i + 1),
                       'shape': list(w.shape),
                       'weights': _flat(w),
                       'bias': _flat(b)})
    doc = {'format': MODEL_FORMAT,
           'version': MODEL_VERSION,
           'structure': net.structure.to_dict(),
           'blocks': blocks,
           'jump': None}
    if net.jump is not None:
        doc['jump'] = {'shape': list(net.jump.shape),
                       'weights': _flat(net.jump)}
    if config is not None:
        doc['config'] = config
    if extra:
        doc.update(extra)
    return doc


def model_from_dict(doc):
    if doc.get('format') != MODEL_FORMAT:
        raise ModelFormatError('not a model document (format %r)' %
                               doc.get('format'))
    if doc.get('version') != MODEL_VERSION:
        raise ModelFormatError('unsupported model version %r' %
                               doc.get('version'))
    try:
        structure = NetworkStructure.from_dict(doc['structure'])
        layers = []
        for block in doc['blocks']:
            shape = tuple(block['shape'])
            layers.append((np.array(block['weights'],
                                    dtype=np.float64).reshape(shape),
                           np.array(block['bias'], dtype=np.float64)))
        jump = None
        if doc.get('jump') is not None:
            jump = np.array(doc['jump']['weights'],
                            dtype=np.float64).reshape(doc['jump']['shape'])
        return Network(structure, layers, jump)
    except (KeyError, TypeError, ValueError) as e:
        raise ModelFormatError('malformed model document: %s' % e)


def dumps_model(net, config=None, extra=None):
    return json.dumps(model_to_dict(net, config, extra), sort_keys=True)


def save_model(net, path, config=None, extra=None):
    with atomic_write(path) as fout:
        fout.write(dumps_model(net, config, extra))
        fout.write('\n')
    return path


def load_model_document(path):
    path = os.fspath(path)
    try:
        with open(path, 'r', encoding='utf-8') as fin:
            return json.load(fin)
    except ValueError as e:
        raise ModelFormatError('%s: %s' % (path, e))


def load_model(path):
    """:raise FileNotFoundError: no such model file."""
    return model_from_dict(load_model_document(path))
