import argparse
import logging
import sys

from mvsgrade import __version__
from mvsgrade.cli import commands
from mvsgrade.config import PipelineConfig
from mvsgrade.constants import TASKS
from mvsgrade.utils import setup_logging

LOG = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1

# dest -> (section, key); section None is top level
COMMON_OVERRIDES = {'seed': (None, 'seed'), 'task': (None, 'task')}
OVERRIDES = {
    'preprocess': {'blur_sigma': ('edges', 'blur_sigma'),
                   'low_threshold': ('edges', 'low_threshold'),
                   'high_threshold': ('edges', 'high_threshold'),
                   'relative_thresholds': ('edges', 'relative_thresholds')},
    'train': {'learning_rate': ('training', 'learning_rate'),
              'momentum': ('training', 'momentum'),
              'max_epochs': ('training', 'max_epochs'),
              'patience': ('training', 'patience'),
              'shuffle_seed': ('training', 'shuffle_seed'),
              'hidden_layers': ('structure', 'hidden_layers'),
              'jump': ('structure', 'jump_connections'),
              'activation': ('structure', 'activation')},
    'search': {'min_layers': ('search', 'min_layers'),
               'max_layers': ('search', 'max_layers'),
               'min_width': ('search', 'min_width'),
               'max_width': ('search', 'max_width'),
               'capacity': ('search', 'capacity'),
               'max_cycles': ('search', 'max_cycles'),
               'workers': ('search', 'workers'),
               'max_epochs': ('search', 'max_epochs'),
               'patience': ('search', 'patience')},
    'grade': {'blur_sigma': ('edges', 'blur_sigma')},
    'synth': {'count': ('synth', 'count'),
              'noise': ('synth', 'noise'),
              'size': ('synth', 'size')},
}
DISABLED = 'none'


def _int_list(text):
    try:
        return [int(v) for v in text.split(',') if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError('expected comma-separated '
                                         'integers, got %r' % text)


def _split(text):
    """'700,100,200' per-class counts or '0.5,0.25,0.25' fractions."""
    parts = [v.strip() for v in text.split(',')]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError('split needs three values')
    try:
        if all(p.isdigit() for p in parts):
            return [int(p) for p in parts]
        return [float(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError('bad split %r' % text)


def _threshold(text):
    if text.lower() == DISABLED:
        return DISABLED
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError('expected a fraction or "none"')


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', default=None,
                        help='YAML configuration file '
                             '(default ~/.mvsgrade/config.yml)')
    common.add_argument('--seed', type=int, default=None)
    common.add_argument('--task', choices=TASKS, default=None)
    common.add_argument('--out', default=None,
                        help='output file or directory of the command')

    parser = argparse.ArgumentParser(
        prog='mvsgrade', description='Produce grading from spectral '
                                     'color patterns.')
    parser.add_argument('--version', action='version',
                        version='%(prog)s ' + __version__)
    sub = parser.add_subparsers(dest='command')
    sub.required = True

    p = sub.add_parser('preprocess', parents=[common],
                       help='images to spectral feature file')
    p.add_argument('manifest', nargs='?')
    p.add_argument('--workers', type=int, default=1)
    p.add_argument('--debug-masks', metavar='DIR', default=None,
                   help='dump foreground masks as PGM files')
    p.add_argument('--blur-sigma', type=float, default=None)
    p.add_argument('--low-threshold', type=float, default=None)
    p.add_argument('--high-threshold', type=float, default=None)
    p.add_argument('--absolute-thresholds', dest='relative_thresholds',
                   action='store_const', const=False, default=None)

    p = sub.add_parser('train', parents=[common],
                       help='train one network on a feature file')
    p.add_argument('features', nargs='?')
    p.add_argument('--history', default=None,
                   help='per-epoch error CSV')
    p.add_argument('--learning-rate', type=float, default=None)
    p.add_argument('--momentum', type=float, default=None)
    p.add_argument('--max-epochs', type=int, default=None)
    p.add_argument('--patience', type=int, default=None)
    p.add_argument('--shuffle-seed', type=int, default=None)
    p.add_argument('--hidden-layers', type=_int_list, default=None,
                   help='comma-separated widths, e.g. 64 or 768,768')
    p.add_argument('--jump', action='store_const', const=True,
                   default=None)
    p.add_argument('--activation', default=None)
    p.add_argument('--split', type=_split, default=None,
                   help='per-class train,test,validation counts or '
                        'fractions')

    p = sub.add_parser('search', parents=[common],
                       help='search network structures')
    p.add_argument('features', nargs='?')
    p.add_argument('--log', default=None, help='per-cycle search log CSV')
    p.add_argument('--min-layers', type=int, default=None)
    p.add_argument('--max-layers', type=int, default=None)
    p.add_argument('--min-width', type=int, default=None)
    p.add_argument('--max-width', type=int, default=None)
    p.add_argument('--capacity', type=int, default=None)
    p.add_argument('--max-cycles', type=int, default=None)
    p.add_argument('--consensus-threshold', type=_threshold, default=None,
                   help='fraction, or "none" to run all cycles')
    p.add_argument('--workers', type=int, default=None)
    p.add_argument('--max-epochs', type=int, default=None)
    p.add_argument('--patience', type=int, default=None)
    p.add_argument('--split', type=_split, default=None)

    p = sub.add_parser('grade', parents=[common],
                       help='grade images or feature records')
    p.add_argument('model')
    p.add_argument('images', nargs='*')
    p.add_argument('--features', default=None)
    p.add_argument('--blur-sigma', type=float, default=None)

    p = sub.add_parser('report', parents=[common],
                       help='metric report of predictions')
    p.add_argument('predictions')
    p.add_argument('truth')
    p.add_argument('--human-accuracy', type=float, default=None)
    p.add_argument('--daily-volume', type=int, default=None)
    p.add_argument('--unit-price', type=float, default=None)

    p = sub.add_parser('graders', parents=[common],
                       help='hourly accuracy of human graders')
    p.add_argument('log', nargs='?')
    p.add_argument('--synth', action='store_true')
    p.add_argument('--items', type=int, default=100)
    p.add_argument('--graders', type=int, default=5)

    p = sub.add_parser('synth', parents=[common],
                       help='generate a synthetic corpus')
    p.add_argument('--count', type=int, default=None,
                   help='images per class')
    p.add_argument('--noise', type=float, default=None)
    p.add_argument('--size', type=int, default=None)
    return parser


def effective_config(args):
    """Configuration file plus command-line overrides, section by section."""
    config = PipelineConfig.load(args.config)
    overrides = dict(COMMON_OVERRIDES)
    overrides.update(OVERRIDES.get(args.command, {}))
    grouped = {}
    for dest, (section, key) in overrides.items():
        value = getattr(args, dest, None)
        if value is not None:
            grouped.setdefault(section, {})[key] = value
    split = getattr(args, 'split', None)
    if split is not None:
        grouped['split'] = dict(zip(('train', 'test', 'validation'), split))
    threshold = getattr(args, 'consensus_threshold', None)
    if threshold is not None:
        grouped.setdefault('search', {})['consensus_threshold'] = \
            None if threshold == DISABLED else threshold
    for section in sorted(grouped, key=lambda s: s or ''):
        config.update(section, grouped[section])
    return config


def run(args, config):
    if args.command == 'preprocess':
        commands.cmd_preprocess(config, args.manifest, args.out,
                                workers=args.workers,
                                mask_dir=args.debug_masks)
    elif args.command == 'train':
        commands.cmd_train(config, args.features, args.out, args.history)
    elif args.command == 'search':
        commands.cmd_search(config, args.features, args.out, args.log)
    elif args.command == 'grade':
        commands.cmd_grade(config, args.model, args.images,
                           features_path=args.features,
                           report_path=args.out)
    elif args.command == 'report':
        commands.cmd_report(config, args.predictions, args.truth,
                            out_path=args.out,
                            human_accuracy=args.human_accuracy,
                            daily_volume=args.daily_volume,
                            unit_price=args.unit_price)
    elif args.command == 'graders':
        commands.cmd_graders(config, args.log, synth=args.synth,
                             items=args.items, graders=args.graders,
                             out_path=args.out)
    elif args.command == 'synth':
        commands.cmd_synth(config, args.out)


def main(argv=None):
    """:return: process exit status; argument errors exit 2 via argparse."""
    args = build_parser().parse_args(argv)
    try:
        setup_logging()
        config = effective_config(args)
        run(args, config)
    except (ValueError, ArithmeticError, KeyError, OSError) as e:
        LOG.error('%s failed: %s', args.command, e)
        return EXIT_FAILURE
    return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
