import collections
import contextlib
import json
import logging
import multiprocessing

import numpy as np
import pandas as pd

from mvsgrade.constants import DEFAULT_CAPACITY, DEFAULT_MAX_CYCLES, \
    DEFAULT_CONSENSUS, DEFAULT_REACTION_RATE, DEFAULT_COLLISION_RATE, \
    BLEND_PROBABILITY, SEARCH_FORMAT, MODEL_VERSION
from mvsgrade.achem.molecule import SearchBounds, random_molecule
from mvsgrade.achem.reactions import react, wall_collision
from mvsgrade.utils import atomic_write, write_provenance, derive_seed

STOP_CONSENSUS = 'consensus'
STOP_MAX_CYCLES = 'max_cycles'

LOG_COLUMNS = ['cycle', 'best', 'mean', 'consensus']


def _count(rate, size):
    return max(1, int(np.floor(rate * size + 0.5)))


class Reactor(object):
    """
    Population container of the structure search. The population list
    keeps insertion order; filtering removes molecules without reordering
    the survivors.
    """

    def __init__(self, bounds=None, capacity=DEFAULT_CAPACITY,
                 max_cycles=DEFAULT_MAX_CYCLES,
                 consensus_threshold=DEFAULT_CONSENSUS,
                 reaction_rate=DEFAULT_REACTION_RATE,
                 collision_rate=DEFAULT_COLLISION_RATE,
                 blend_probability=BLEND_PROBABILITY, rng_seed=0,
                 workers=1):
        self.bounds = bounds if bounds is not None else SearchBounds()
        self.capacity = int(capacity)
        self.max_cycles = int(max_cycles)
        self.consensus_threshold = consensus_threshold
        self.reaction_rate = float(reaction_rate)
        self.collision_rate = float(collision_rate)
        self.blend_probability = float(blend_probability)
        self.rng_seed = int(rng_seed)
        self.workers = int(workers)
        self.population = []
        self.cycle = 0
        if self.capacity < 2:
            raise ValueError('reactor capacity must be >= 2')
        if self.max_cycles < 0:
            raise ValueError('max_cycles must be >= 0')
        if consensus_threshold is not None and \
                not 0 < consensus_threshold <= 1:
            raise ValueError('consensus_threshold must lie in (0, 1]')
        if self.workers < 1:
            raise ValueError('workers must be >= 1')

    def settings(self):
        return {'bounds': self.bounds.to_dict(),
                'capacity': self.capacity,
                'max_cycles': self.max_cycles,
                'consensus_threshold': self.consensus_threshold,
                'reaction_rate': self.reaction_rate,
                'collision_rate': self.collision_rate,
                'blend_probability': self.blend_probability,
                'rng_seed': self.rng_seed,
                'workers': self.workers}

    def __len__(self):
        return len(self.population)


def _rank_key(item):
    index, molecule = item
    return (-molecule.molecular_weight, molecule.total_neurons, index)


def rank(population):
    """Molecules best first: weight, then fewer neurons, then age."""
    if any(m.molecular_weight is None for m in population):
        raise ValueError('cannot rank unevaluated molecules')
    return [m for _, m in sorted(enumerate(population), key=_rank_key)]


def filter_population(reactor):
    """Keep the `capacity` best molecules, in their original order."""
    if len(reactor.population) <= reactor.capacity:
        return reactor
    if any(m.molecular_weight is None for m in reactor.population):
        raise ValueError('cannot filter unevaluated molecules')
    ranked = sorted(enumerate(reactor.population), key=_rank_key)
    keep = sorted(index for index, _ in ranked[:reactor.capacity])
    reactor.population = [reactor.population[i] for i in keep]
    return reactor


def consensus_fraction(reactor):
    """Share of the population encoding the most common structure."""
    population = getattr(reactor, 'population', reactor)
    if not population:
        raise ValueError('consensus of an empty population')
    counts = collections.Counter(m.structure_key() for m in population)
    return counts.most_common(1)[0][1] / float(len(population))


class SearchResult(object):
    def __init__(self, best, log, stopped_reason, reactor):
        self.best = best
        self.log = log
        self.stopped_reason = stopped_reason
        self.reactor = reactor

    @property
    def cycles(self):
        return self.reactor.cycle


class Search(object):
    """
    Runs a reactor: every cycle random pairs react and random singles hit
    the wall, the offspring are evaluated and the population is filtered
    back to capacity.

    `fitness(molecule, eval_seed)` returns a weight in [0, 1]. Each
    evaluation gets a seed derived from (rng_seed, cycle, index), and only
    this process draws from the reactor's generator, so worker processes do
    not change the outcome.
    """

    def __init__(self, reactor, fitness):
        self.reactor = reactor
        self.fitness = fitness
        self.rng = np.random.default_rng(reactor.rng_seed)
        self.best = None
        self.rows = []
        self._logger = logging.getLogger('%s.%s' % (
            __name__, self.__class__.__name__))
        self._pool = None

    def _evaluate(self, molecules):
        cycle = self.reactor.cycle
        seeds = [derive_seed(self.reactor.rng_seed, cycle, i)
                 for i in range(len(molecules))]
        if self._pool is not None:
            weights = self._pool.starmap(self.fitness,
                                         zip(molecules, seeds))
        else:
            weights = [self.fitness(m, s) for m, s in zip(molecules, seeds)]
        evaluated = []
        for molecule, weight, seed in zip(molecules, weights, seeds):
            weight = float(weight)
            if not 0 <= weight <= 1:
                raise ValueError('fitness %r outside [0, 1] for %r' %
                                 (weight, molecule))
            evaluated.append(molecule.evaluated(weight, seed))
            self._logger.debug('cycle %d: %r', cycle, evaluated[-1])
        return evaluated

    def _record(self):
        reactor = self.reactor
        leader = rank(reactor.population)[0]
        if self.best is None or \
                leader.molecular_weight > self.best.molecular_weight:
            self.best = leader
        weights = [m.molecular_weight for m in reactor.population]
        consensus = consensus_fraction(reactor)
        self.rows.append((reactor.cycle, self.best.molecular_weight,
                          float(np.mean(weights)), consensus))
        self._logger.info('cycle %d: best %.4f, mean %.4f, consensus %.2f',
                          reactor.cycle, self.best.molecular_weight,
                          self.rows[-1][2], consensus)
        return consensus

    def _converged(self, consensus):
        threshold = self.reactor.consensus_threshold
        return threshold is not None and consensus >= threshold

    def _offspring(self):
        reactor = self.reactor
        population = reactor.population
        size = len(population)
        offspring = []
        for _ in range(_count(reactor.reaction_rate / 2.0, size)):
            i, j = self.rng.choice(size, 2, replace=False)
            offspring.extend(react(population[i], population[j], self.rng,
                                   reactor.bounds,
                                   reactor.blend_probability))
        for _ in range(_count(reactor.collision_rate, size)):
            k = int(self.rng.integers(size))
            offspring.append(wall_collision(population[k], reactor.bounds,
                                            self.rng))
        return offspring

    def run(self):
        reactor = self.reactor
        with contextlib.ExitStack() as stack:
            if reactor.workers > 1:
                self._pool = stack.enter_context(
                    multiprocessing.Pool(reactor.workers))
            try:
                reason = self._run()
            finally:
                self._pool = None
        log = pd.DataFrame(self.rows, columns=LOG_COLUMNS)
        self._logger.info('Search stopped (%s) after %d cycle(s); best %r',
                          reason, reactor.cycle, self.best)
        return SearchResult(self.best, log, reason, reactor)

    def _run(self):
        reactor = self.reactor
        reactor.cycle = 0
        initial = [random_molecule(reactor.bounds, self.rng)
                   for _ in range(reactor.capacity)]
        reactor.population = self._evaluate(initial)
        if self._converged(self._record()):
            return STOP_CONSENSUS
        while reactor.cycle < reactor.max_cycles:
            reactor.cycle += 1
            offspring = self._offspring()
            reactor.population.extend(self._evaluate(offspring))
            filter_population(reactor)
            if self._converged(self._record()):
                return STOP_CONSENSUS
        return STOP_MAX_CYCLES


def run_search(reactor, fitness):
    """
    Search until consensus reaches the reactor's threshold or max_cycles
    pass. A threshold of None disables consensus termination.
    :return: SearchResult with the best molecule ever seen and the
    per-cycle log (cycle, best, mean, consensus), cycle 0 being the
    initial population
    """
    return Search(reactor, fitness).run()


def write_search_log(result, path, config=None):
    with atomic_write(path) as fout:
        result.log.to_csv(fout, index=False, lineterminator='\n')
    write_provenance(path, config)
    return path


def search_document(result, model=None, config=None):
    doc = {'format': SEARCH_FORMAT,
           'version': MODEL_VERSION,
           'best': result.best.to_dict(),
           'stopped_reason': result.stopped_reason,
           'cycles': result.cycles,
           'reactor': result.reactor.settings(),
           'model': model}
    if config is not None:
        doc['config'] = config
    return doc


def save_search_result(result, path, model=None, config=None):
    """
    :param model: model document of the best molecule's trained network
    """
    with atomic_write(path) as fout:
        json.dump(search_document(result, model, config), fout,
                  sort_keys=True)
        fout.write('\n')
    return path
