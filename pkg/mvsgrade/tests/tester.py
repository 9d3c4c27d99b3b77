import logging

LOG = logging.getLogger(__name__)


def seeded_trials(repeat=10, required=None):
    """
    Run a seed-dependent check once per seed 0..repeat-1 and pass when at
    least `required` runs succeed. The decorated function takes the seed
    and returns a truthy value on success; an AssertionError counts as a
    failed run.
    """
    if required is None:
        required = repeat

    def _real_dec(func):
        def wrapper():
            name = func.__name__
            passed = 0
            for seed in range(repeat):
                LOG.info('Test %s, run %d', name, seed + 1)
                try:
                    ok = bool(func(seed))
                except AssertionError as e:
                    LOG.info('Test %s, run %d: %s', name, seed + 1, e)
                    ok = False
                if ok:
                    passed += 1
                    LOG.info('Success')
                else:
                    LOG.error('Failed')
            assert passed >= required, '%s: %d/%d runs passed, need %d' % (
                name, passed, repeat, required)

        wrapper.__name__ = func.__name__
        wrapper.__doc__ = func.__doc__
        wrapper.__module__ = func.__module__
        return wrapper

    return _real_dec
