"""
Pipeline commands. Each takes the effective PipelineConfig plus explicit
inputs and outputs, writes its artifacts atomically with the configuration
attached, and returns what it produced.
"""
import contextlib
import io
import logging
import multiprocessing
import os
import sys

import pandas as pd

from mvsgrade.constants import TASK_TOMATO, SEARCH_FORMAT
from mvsgrade.achem.fitness import SearchData, DatasetFitness, \
    train_molecule
from mvsgrade.achem.reactor import run_search, save_search_result, \
    write_search_log
from mvsgrade.config import ConfigError
from mvsgrade.datasets.labels import label_name
from mvsgrade.datasets.manifest import Manifest, ManifestRecord, \
    load_manifest
from mvsgrade.datasets.split import stratified_split
from mvsgrade.datasets.synth import synth_generate, synth_grader_log
from mvsgrade.evaluation.confusion import confusion, read_labels, \
    pair_labels
from mvsgrade.evaluation.graders import GraderLog, hourly_accuracy, \
    load_grader_log
from mvsgrade.evaluation.metrics import metrics, ordinal_errors, \
    stage_breakdown, report_frame, format_table, write_report
from mvsgrade.evaluation.revenue import accuracy_gain, revenue_gain
from mvsgrade.features.featurefile import FeatureSet, write_feature_file, \
    read_feature_file
from mvsgrade.features.spectral import extract_spectral_pattern
from mvsgrade.imaging.edges import ImageTooSmallError
from mvsgrade.imaging.foreground import ExtractionFailedError, segment
from mvsgrade.imaging.image import ImageDecodeError, load_image, \
    save_mask_pgm
from mvsgrade.neuralnet.network import init_network, classify, \
    classify_batch
from mvsgrade.neuralnet.serialization import ModelFormatError, \
    model_from_dict, model_to_dict, save_model, load_model_document
from mvsgrade.neuralnet.training import train, write_history
from mvsgrade.utils import atomic_write, write_provenance, derive_seed, \
    format_percent

LOG = logging.getLogger(__name__)

FAILURES_SUFFIX = '.failures.csv'
FAILURE_COLUMNS = ['id', 'path', 'error']
ITEM_ERRORS = (ImageDecodeError, ImageTooSmallError, ExtractionFailedError)


def _require(path, what):
    if not path:
        raise ConfigError('no %s given (flag or paths section)' % what)
    return path


def _pattern_for(path, edge_params, image_id=None, mask_dir=None):
    img = load_image(path)
    mask = segment(img, edge_params, image_id=image_id)
    if mask_dir is not None:
        save_mask_pgm(mask, os.path.join(mask_dir, '%s.pgm' % image_id))
    return extract_spectral_pattern(img, mask, image_id=image_id)


def _preprocess_one(job):
    record, edge_params, mask_dir = job
    try:
        pattern = _pattern_for(record.path, edge_params, record.image_id,
                               mask_dir)
    except ITEM_ERRORS as e:
        return record, None, str(e)
    return record, pattern, None


def cmd_preprocess(config, manifest_path=None, out_path=None, workers=1,
                   mask_dir=None):
    """
    Turn every manifest image into a feature record. Images that cannot be
    decoded or segmented are listed in `<out>.failures.csv` and skipped.
    :return: (FeatureSet, list of (id, path, error))
    """
    manifest_path = _require(manifest_path or config.path('manifest'),
                             'manifest')
    out_path = _require(out_path or config.path('features'),
                        'feature file')
    manifest = load_manifest(manifest_path, config.task)
    edge_params = config.edge_params()
    if mask_dir is not None:
        os.makedirs(mask_dir, exist_ok=True)
    jobs = [(record, edge_params, mask_dir) for record in manifest]

    with contextlib.ExitStack() as stack:
        if workers > 1 and len(jobs) > 1:
            pool = stack.enter_context(multiprocessing.Pool(workers))
            results = pool.map(_preprocess_one, jobs, chunksize=8)
        else:
            results = [_preprocess_one(job) for job in jobs]

    records, failures = [], []
    for record, pattern, error in results:
        if error is not None:
            LOG.warning('Skipping %s: %s', record.image_id, error)
            failures.append((record.image_id, record.path, error))
        else:
            records.append((record.image_id, record.label, pattern))
    features = FeatureSet.from_patterns(config.task, records)
    provenance = config.to_dict()
    write_feature_file(features, out_path, provenance)
    failure_path = out_path + FAILURES_SUFFIX
    with atomic_write(failure_path) as fout:
        pd.DataFrame(failures, columns=FAILURE_COLUMNS).to_csv(
            fout, index=False, lineterminator='\n')
    write_provenance(failure_path, provenance)
    LOG.info('Preprocessed %d image(s): %d feature record(s), %d failure(s)',
             len(manifest), len(features), len(failures))
    return features, failures


def split_features(config, features):
    """Stratified (train, test, validation) FeatureSets."""
    manifest = Manifest(features.task,
                        [ManifestRecord(i, '', label) for i, label in
                         zip(features.ids, features.labels)])
    parts = stratified_split(manifest, config.split_spec(manifest))
    return tuple(features.subset(part.ids) for part in parts)


def _accuracy(net, part):
    if not len(part):
        return None
    predicted = classify_batch(net, part.values, part.task)
    return sum(p is t for p, t in zip(predicted, part.labels)) / \
        float(len(part))


def cmd_train(config, features_path=None, out_path=None, history_path=None):
    """
    Train the configured structure on the training split with test-set
    early stopping and save the best-epoch model.
    :return: (network, TrainingHistory, validation accuracy or None)
    """
    features_path = _require(features_path or config.path('features'),
                             'feature file')
    out_path = _require(out_path or config.path('model'), 'model path')
    features = read_feature_file(features_path, config.task)
    train_set, test_set, validation_set = split_features(config, features)
    structure = config.structure()
    net = init_network(structure, derive_seed(config.seed, 0))
    best, history = train(net, train_set, test_set,
                          config.training_params())
    accuracy = _accuracy(best, validation_set)
    save_model(best, out_path, config=config.to_dict(),
               extra={'task': config.task,
                      'validation_accuracy': accuracy,
                      'best_epoch': history.best_epoch,
                      'stopped_reason': history.stopped_reason})
    if history_path:
        write_history(history, history_path, config.to_dict())
    LOG.info('Saved %r to %s; validation accuracy %s', structure, out_path,
             format_percent(accuracy))
    return best, history, accuracy


def cmd_search(config, features_path=None, out_path=None, log_path=None):
    """
    Structure search over the configured bounds. The best molecule is
    retrained from its evaluation seed and its model embedded in the
    result document.
    :return: SearchResult
    """
    features_path = _require(features_path or config.path('features'),
                             'feature file')
    out_path = _require(out_path or config.path('model'),
                        'search result path')
    features = read_feature_file(features_path, config.task)
    data = SearchData(*split_features(config, features))
    search = config.values['search']
    fitness = DatasetFitness(data, search['max_epochs'], search['patience'])
    result = run_search(config.reactor(), fitness)

    best = result.best
    net, _ = train_molecule(best, data, best.eval_seed,
                            search['max_epochs'], search['patience'])
    model = model_to_dict(net, extra={'task': config.task,
                                      'validation_accuracy':
                                          best.molecular_weight})
    save_search_result(result, out_path, model=model,
                       config=config.to_dict())
    if log_path:
        write_search_log(result, log_path, config.to_dict())
    LOG.info('Best molecule %r saved to %s', best, out_path)
    return result


def load_grading_model(path):
    """Read a model document, or the model embedded in a search result."""
    doc = load_model_document(path)
    if doc.get('format') == SEARCH_FORMAT:
        doc = doc.get('model')
        if doc is None:
            raise ModelFormatError('%s holds no trained model' % path)
    return model_from_dict(doc), doc.get('task')


def _append_rows(path, rows, config):
    previous = ''
    if os.path.exists(path):
        with open(path, 'r', encoding='utf-8') as fin:
            previous = fin.read()
    buf = io.StringIO()
    pd.DataFrame(rows, columns=['id', 'label']).to_csv(
        buf, index=False, header=not previous, lineterminator='\n')
    with atomic_write(path) as fout:
        fout.write(previous)
        fout.write(buf.getvalue())
    write_provenance(path, config)


def cmd_grade(config, model_path, images=(), features_path=None,
              report_path=None, stream=None):
    """
    Grade images (segmented and featurized on the fly) and/or the records
    of a feature file. Prints `id,label` lines.
    :return: list of (id, label)
    """
    stream = stream or sys.stdout
    net, model_task = load_grading_model(model_path)
    task = config.task
    if model_task is not None and model_task != task:
        raise ConfigError('model %s grades %s, configured task is %s' %
                          (model_path, model_task, task))
    edge_params = config.edge_params()
    graded = []
    for path in images:
        image_id = os.path.splitext(os.path.basename(path))[0]
        pattern = _pattern_for(path, edge_params, image_id)
        graded.append((image_id, classify(net, pattern, task)))
    if features_path:
        features = read_feature_file(features_path, task)
        graded.extend(zip(features.ids,
                          classify_batch(net, features.values, task)))
    rows = [(image_id, label_name(label)) for image_id, label in graded]
    for image_id, name in rows:
        stream.write('%s,%s\n' % (image_id, name))
    if report_path:
        _append_rows(report_path, rows, config.to_dict())
    return graded


def cmd_report(config, predictions_path, truth_path, out_path=None,
               human_accuracy=None, daily_volume=None, unit_price=None,
               stream=None):
    """
    Metric report of predictions against true labels: the binary battery
    for eggs, ordinal errors and per-stage recall for tomatoes.
    :return: dict with the confusion, the report frame and any gains
    """
    stream = stream or sys.stdout
    task = config.task
    predicted, truth = pair_labels(read_labels(predictions_path, task),
                                   read_labels(truth_path, task))
    cm = confusion(predicted, truth, task)
    result = {'confusion': cm}
    stream.write('%s\n\n' % cm.to_frame().to_string())

    if task == TASK_TOMATO:
        errors = ordinal_errors(cm)
        frame = pd.DataFrame([
            {'metric': 'accuracy', 'value': errors.accuracy,
             'display': format_percent(errors.accuracy)},
            {'metric': 'within_one_stage', 'value': errors.within(1),
             'display': format_percent(errors.within(1))},
            {'metric': 'max_distance', 'value': errors.max_distance,
             'display': str(errors.max_distance)}])
        accuracy = errors.accuracy
        result['ordinal_errors'] = errors
        result['stages'] = stage_breakdown(cm)
        stream.write('%s\n\n' % format_table(errors.to_frame()))
        for summary in result['stages']:
            stream.write('%r\n' % summary)
        stream.write('\n')
    else:
        report = metrics(cm)
        frame = report_frame(report)
        accuracy = report.accuracy
        result['metrics'] = report

    if human_accuracy is not None and accuracy is not None:
        gain = accuracy_gain(accuracy, human_accuracy)
        rows = [{'metric': 'accuracy_gain', 'value': gain,
                 'display': format_percent(gain)}]
        result['accuracy_gain'] = gain
        if daily_volume is not None and unit_price is not None:
            items, revenue = revenue_gain(daily_volume, max(gain, 0.0),
                                          unit_price)
            rows.extend([{'metric': 'extra_items', 'value': items,
                          'display': str(items)},
                         {'metric': 'extra_revenue', 'value': revenue,
                          'display': str(revenue)}])
            result['revenue_gain'] = (items, revenue)
        frame = pd.concat([frame, pd.DataFrame(rows)], ignore_index=True)

    result['frame'] = frame
    stream.write('%s\n' % format_table(frame))
    if out_path:
        write_report(frame, out_path, config.to_dict())
    return result


def cmd_graders(config, log_path=None, synth=False, items=100, graders=5,
                out_path=None, stream=None):
    """
    Hourly accuracy curve of human graders against their first hour, from
    a grader log or a simulated shift.
    :return: HourlyAccuracy
    """
    stream = stream or sys.stdout
    if synth:
        log = GraderLog(config.task, synth_grader_log(
            config.task, items, graders, config.seed))
    else:
        log = load_grader_log(_require(log_path, 'grader log'), config.task)
    curve = hourly_accuracy(log)
    table = curve.to_frame()
    stream.write('%s\n' % format_table(table))
    stream.write('daily average: %s (%.4f)\n' %
                 (format_percent(curve.daily_average), curve.daily_average))
    if out_path:
        write_report(table, out_path, config.to_dict())
    return curve


def cmd_synth(config, out_dir=None):
    """Generate the synthetic corpus for the configured task."""
    out_dir = _require(out_dir or config.path('out'), 'output directory')
    synth = config.values['synth']
    return synth_generate(config.task, int(synth['count']),
                          float(synth['noise']), config.seed, out_dir,
                          size=int(synth['size']), config=config.to_dict())
