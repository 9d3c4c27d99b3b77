import enum

import numpy as np

from mvsgrade.constants import TASK_TOMATO, TASK_EGG, TASKS, \
    TOMATO_OUTPUTS, EGG_OUTPUTS


class TomatoStage(enum.IntEnum):
    """USDA color-chart maturity stages, ordered from least to most ripe."""
    Green = 0
    Breakers = 1
    Turning = 2
    Pink = 3
    LightRed = 4
    Red = 5

    def distance(self, other):
        return abs(int(self) - int(other))


class EggGrade(enum.Enum):
    Accept = 'Accept'
    Reject = 'Reject'


_ALIASES = {'light red': 'LightRed', 'light_red': 'LightRed',
            'lightred': 'LightRed', 'accepted': 'Accept',
            'rejected': 'Reject'}


def check_task(task, err_msg=None):
    if task not in TASKS:
        msg = 'unknown task %r (expected one of %s)' % (task,
                                                        ', '.join(TASKS))
        if err_msg is not None:
            msg = '%s %s' % (err_msg, msg)
        raise ValueError(msg)
    return task


def labels_for(task):
    check_task(task)
    return list(TomatoStage) if task == TASK_TOMATO else list(EggGrade)


def output_size(task):
    check_task(task)
    return TOMATO_OUTPUTS if task == TASK_TOMATO else EGG_OUTPUTS


def parse_label(name, task, err_msg=None):
    """
    Map a canonical label name ('Breakers', 'Accept', ...) to its enum
    member. Matching ignores case and accepts 'Light Red'.
    """
    check_task(task, err_msg)
    if isinstance(name, (TomatoStage, EggGrade)):
        if name in labels_for(task):
            return name
        name = name.name
    text = str(name).strip()
    text = _ALIASES.get(text.lower(), text)
    for label in labels_for(task):
        if label.name.lower() == text.lower():
            return label
    msg = 'unknown %s label %r' % (task, name)
    if err_msg is not None:
        msg = '%s %s' % (err_msg, msg)
    raise ValueError(msg)


def label_name(label):
    return label.name


def target_vector(label, task):
    """One-hot stage for tomatoes; 1.0 for Accept, 0.0 for Reject."""
    if task == TASK_TOMATO:
        target = np.zeros(TOMATO_OUTPUTS)
        target[int(parse_label(label, task))] = 1.0
        return target
    check_task(task)
    return np.array([1.0 if parse_label(label, task) is EggGrade.Accept
                     else 0.0])


def is_positive(label):
    """Accept is the positive class for egg grading."""
    return label is EggGrade.Accept
