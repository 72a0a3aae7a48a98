"""Markov chains on binary matrices with fixed row/column sums.

Thin wrapper over the compiled extension: instances are dicts (or JSON
strings) in the same shape as the CLI instance files, results are dicts.
"""

import json as _json

from . import _core

__version__ = _core.__version__


def _instance_text(instance):
    if isinstance(instance, str):
        return instance
    return _json.dumps(instance)


def enumerate_states(instance, max_states=200000):
    return _json.loads(_core.enumerate_states(_instance_text(instance),
                                              max_states))


def sample(instance, chain="curveball", steps=1000, count=1, seed=1):
    return _json.loads(_core.sample(_instance_text(instance), chain, steps,
                                    count, seed))


def transition_matrix(instance, chain="curveball", max_states=200000):
    return _json.loads(_core.transition_matrix(_instance_text(instance),
                                               chain, max_states))


def spectrum(instance, chain="curveball", max_states=200000):
    return _json.loads(_core.spectrum(_instance_text(instance), chain,
                                      max_states))


def compare(instance, theorem="sandwich", k=2, tolerance=1e-9,
            max_states=200000):
    return _json.loads(_core.compare(_instance_text(instance), theorem, k,
                                     tolerance, max_states))


def mix(instance, chain="curveball", epsilon=0.05, horizon=0,
        max_states=200000):
    return _json.loads(_core.mix(_instance_text(instance), chain, epsilon,
                                 horizon, max_states))


def verify(instance, k=2, epsilon=0.05, tolerance=1e-9, max_states=200000):
    return _json.loads(_core.verify(_instance_text(instance), k, epsilon,
                                    tolerance, max_states))
