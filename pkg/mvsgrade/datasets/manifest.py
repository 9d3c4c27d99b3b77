import logging
import os
import re

import pandas as pd

from mvsgrade.constants import SHIFT_HOURS
from mvsgrade.datasets.labels import parse_label, label_name, check_task
from mvsgrade.utils import atomic_write, write_provenance

LOG = logging.getLogger(__name__)

COLUMNS = ['id', 'path', 'label', 'grader', 'hour']
REQUIRED_COLUMNS = ['id', 'path', 'label']

_LINE_RE = re.compile(r'line (\d+)')


class ManifestError(ValueError):
    def __init__(self, msg, line=None):
        if line is not None:
            msg = 'line %d: %s' % (line, msg)
        super(ManifestError, self).__init__(msg)
        self.line = line


class ManifestRecord(object):
    def __init__(self, image_id, path, label, grader=None, hour=None):
        self.image_id = image_id
        self.path = path
        self.label = label
        self.grader = grader
        self.hour = hour

    def to_dict(self):
        return {'id': self.image_id,
                'path': self.path,
                'label': label_name(self.label),
                'grader': self.grader,
                'hour': self.hour}

    def __repr__(self):
        return 'ManifestRecord<%s, %s>' % (self.image_id,
                                            label_name(self.label))


class Manifest(object):
    """Image records of one grading task, unique by id."""

    def __init__(self, task, records=()):
        self.task = check_task(task)
        self.records = []
        self._by_id = {}
        for record in records:
            self.add(record)

    def add(self, record):
        if record.image_id in self._by_id:
            raise ManifestError('duplicate id %r' % record.image_id)
        record.label = parse_label(record.label, self.task)
        self._by_id[record.image_id] = record
        self.records.append(record)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __contains__(self, image_id):
        return image_id in self._by_id

    def __getitem__(self, image_id):
        return self._by_id[image_id]

    @property
    def ids(self):
        return [r.image_id for r in self.records]

    def by_label(self):
        groups = {}
        for record in self.records:
            groups.setdefault(record.label, []).append(record)
        return groups

    def to_frame(self):
        return pd.DataFrame([r.to_dict() for r in self.records],
                            columns=COLUMNS)


def _optional(value):
    value = value.strip()
    return value if value else None


def load_manifest(path, task):
    """
    Read a comma-separated manifest with a header row. Relative image paths
    are resolved against the manifest's directory.
    :raise ManifestError: malformed row, unknown label or duplicate id.
    """
    path = os.fspath(path)
    base = os.path.dirname(os.path.abspath(path))
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False,
                            encoding='utf-8')
    except pd.errors.EmptyDataError:
        return Manifest(task)
    except pd.errors.ParserError as e:
        match = _LINE_RE.search(str(e))
        raise ManifestError('%s: %s' % (path, e),
                            int(match.group(1)) if match else None)
    missing = [c for c in REQUIRED_COLUMNS if c not in frame.columns]
    if missing:
        raise ManifestError('%s: missing column(s) %s' %
                            (path, ', '.join(missing)), line=1)

    manifest = Manifest(task)
    for row, data in enumerate(frame.to_dict('records')):
        line = row + 2
        try:
            label = parse_label(data['label'], task)
        except ValueError as e:
            raise ManifestError(str(e), line)
        hour = _optional(data.get('hour', ''))
        if hour is not None:
            try:
                hour = int(hour)
            except ValueError:
                raise ManifestError('bad hour %r' % hour, line)
            if not 1 <= hour <= SHIFT_HOURS:
                raise ManifestError('hour %d outside 1..%d' %
                                    (hour, SHIFT_HOURS), line)
        image_id = data['id'].strip()
        if not image_id:
            raise ManifestError('empty id', line)
        image_path = data['path'].strip()
        if image_path and not os.path.isabs(image_path):
            image_path = os.path.join(base, image_path)
        try:
            manifest.add(ManifestRecord(image_id, image_path, label,
                                        _optional(data.get('grader', '')),
                                        hour))
        except ManifestError as e:
            raise ManifestError(str(e), line)
    LOG.info('Loaded %d %s records from %s', len(manifest), task, path)
    return manifest


def write_manifest(manifest, path, relative_to=None, config=None):
    frame = manifest.to_frame()
    if relative_to is not None:
        frame['path'] = [os.path.relpath(p, relative_to) if p else p
                         for p in frame['path']]
    frame['hour'] = frame['hour'].astype('Int64')
    with atomic_write(path) as fout:
        frame.to_csv(fout, index=False, lineterminator='\n')
    write_provenance(path, config)
    return path
