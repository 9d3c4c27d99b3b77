import contextlib
import logging
import os
import tempfile
from decimal import Decimal, ROUND_HALF_UP

import numpy as np
import yaml

from mvsgrade.constants import LOG_LEVEL_ENV, PROVENANCE_SUFFIX, \
    DISPLAY_PLACES

ROOT_LOGGER = 'mvsgrade'


class UnixTimeStampFormatter(logging.Formatter):
    def formatTime(self, record, datefmt=None):
        return "{0:.6f}".format(record.created)


def config_logger(logger):
    if getattr(logger, '_mvsgrade_configured', False):
        return logger
    formatter = UnixTimeStampFormatter(
        '[%(asctime)s][%(name)s][%(levelname)s]: %(message)s')
    handler = logging.StreamHandler()
    handler.setFormatter(formatter)
    logger.addHandler(handler)
    logger.propagate = False
    logger._mvsgrade_configured = True
    return logger


def setup_logging(level=None):
    """
    Configure the package root logger.
    :param level: level name or number; read from MVSGRADE_LOG_LEVEL when
    None.
    """
    if level is None:
        level = os.environ.get(LOG_LEVEL_ENV, 'INFO')
    if isinstance(level, str):
        name = level.upper()
        level = logging.getLevelName(name)
        if not isinstance(level, int):
            raise ValueError('unknown log level %r' % name)
    logger = config_logger(logging.getLogger(ROOT_LOGGER))
    logger.setLevel(level)
    return logger


@contextlib.contextmanager
def atomic_write(path, mode='w', encoding='utf-8'):
    """
    Write to a temporary file next to `path` and rename it into place once
    the block exits cleanly.
    """
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(prefix='.%s.' % os.path.basename(path),
                                    dir=directory)
    kwargs = {} if 'b' in mode else {'encoding': encoding, 'newline': ''}
    try:
        with os.fdopen(fd, mode, **kwargs) as fout:
            yield fout
        os.replace(tmp_path, path)
    except BaseException:
        with contextlib.suppress(OSError):
            os.unlink(tmp_path)
        raise


def write_provenance(artifact_path, config):
    """Dump the effective configuration as a YAML sidecar of a CSV artifact."""
    if config is None:
        return None
    sidecar = os.fspath(artifact_path) + PROVENANCE_SUFFIX
    with atomic_write(sidecar) as fout:
        yaml.safe_dump(config, fout, default_flow_style=False, sort_keys=True)
    return sidecar


def derive_seed(*keys):
    """
    Derive a 32-bit seed from integer keys, e.g. (run seed, cycle, index).
    The result depends only on the keys, never on call order.
    """
    return int(np.random.SeedSequence([int(k) for k in keys])
               .generate_state(1)[0])


def round_half_up(value, places=DISPLAY_PLACES):
    if value is None:
        return None
    quantum = Decimal(1).scaleb(-places)
    return float(Decimal(repr(float(value))).quantize(quantum,
                                                      rounding=ROUND_HALF_UP))


def format_percent(value, places=DISPLAY_PLACES):
    """
    0.857 -> '86%' with two places of the fraction, half-up.
    Undefined values render as 'undefined'.
    """
    if value is None:
        return 'undefined'
    rounded = Decimal(repr(float(value))).quantize(
        Decimal(1).scaleb(-places), rounding=ROUND_HALF_UP)
    percent = rounded * 100
    shown = max(places - 2, 0)
    return '%.*f%%' % (shown, percent)
