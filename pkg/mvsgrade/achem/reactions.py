import numpy as np

from mvsgrade.constants import BLEND_PROBABILITY, MUTATION_SIGMA, \
    MOMENTUM_FLOOR
from mvsgrade.achem.molecule import FACTORS, NUMERIC_FACTORS


def _round_mean(a, b):
    """Mean of two non-negative integers, rounded half up."""
    return (int(a) + int(b) + 1) // 2


def _blend(name, x, y):
    if name == 'layers':
        return _round_mean(x, y)
    if name == 'widths':
        return tuple(_round_mean(p, q) for p, q in zip(x, y))
    return (x + y) / 2.0


def _assemble(bounds, template, values):
    return bounds.clamp(template.replace(
        hidden_layer_count=values['layers'],
        layer_widths=values['widths'],
        jump=values['jump'],
        activation=values['activation'],
        learning_rate=values['learning_rate'],
        momentum=values['momentum']))


def react(a, b, rng, bounds, blend_probability=BLEND_PROBABILITY):
    """
    Uniform recombination of two molecules. Each factor comes from `a` or
    `b` with equal odds and the second offspring takes the other parent's
    value; a numeric factor is instead set to the parents' mean in both
    offspring with probability `blend_probability`.
    :return: two unevaluated offspring
    """
    first, second = {}, {}
    for name in FACTORS:
        x, y = a.factor(name), b.factor(name)
        swap = rng.random() < 0.5
        blend = rng.random() < blend_probability
        if name in NUMERIC_FACTORS and blend:
            first[name] = second[name] = _blend(name, x, y)
        elif swap:
            first[name], second[name] = y, x
        else:
            first[name], second[name] = x, y
    return _assemble(bounds, a, first), _assemble(bounds, a, second)


def mutate_factor(molecule, name, bounds, rng, sigma=MUTATION_SIGMA):
    """Perturb one named factor, then clamp to bounds."""
    if name == 'layers':
        step = 1 if rng.random() < 0.5 else -1
        changed = molecule.replace(
            hidden_layer_count=min(max(molecule.hidden_layer_count + step,
                                       1), len(molecule.layer_widths)))
    elif name == 'widths':
        index = int(rng.integers(molecule.hidden_layer_count))
        step = bounds.width_step if rng.random() < 0.5 \
            else -bounds.width_step
        widths = list(molecule.layer_widths)
        widths[index] += step
        changed = molecule.replace(layer_widths=widths)
    elif name == 'jump':
        changed = molecule.replace(jump=not molecule.jump)
    elif name == 'activation':
        others = [k for k in bounds.activations
                  if k is not molecule.activation]
        activation = others[rng.integers(len(others))] if others \
            else molecule.activation
        changed = molecule.replace(activation=activation)
    elif name == 'learning_rate':
        changed = molecule.replace(learning_rate=molecule.learning_rate *
                                   np.exp(rng.normal(0.0, sigma)))
    elif name == 'momentum':
        base = max(molecule.momentum, MOMENTUM_FLOOR)
        changed = molecule.replace(momentum=base *
                                   np.exp(rng.normal(0.0, sigma)))
    else:
        raise ValueError('unknown factor %r' % name)
    return bounds.clamp(changed)


def wall_collision(molecule, bounds, rng, sigma=MUTATION_SIGMA):
    """
    Mutate exactly one randomly chosen factor: integers step by one unit
    (widths by `bounds.width_step`, default 1, on one expressed layer),
    reals scale by exp(N(0, sigma)) with momentum 0 lifted to
    MOMENTUM_FLOOR first, the jump flag toggles, the activation switches to
    another allowed kind.
    """
    name = FACTORS[int(rng.integers(len(FACTORS)))]
    return mutate_factor(molecule, name, bounds, rng, sigma)
