"""Seed-stream management.

Every stochastic stage consumes an independent, named substream of one
master seed so that runs are reproducible end to end and stages can be
parallelized without sharing generator state. Substreams are derived with
``numpy.random.SeedSequence(master_seed, spawn_key=...)``, which is stable
across processes and numpy versions.

Stream ids (first element of the spawn key):

* SYNTH    - dataset synthesis
* FOLDS    - cross-validation fold assignment
* SEARCH   - hyperparameter sampling, keyed by trial index
* TREE     - tree fitting, keyed by (trial, fold) during search
* FOREST   - forest bootstraps and tree fits, keyed by (tree, attempt, role)
"""

import numpy as np

SYNTH = 1
FOLDS = 2
SEARCH = 3
TREE = 4
FOREST = 5


def substream(master_seed: int, stream: int, *key: int) -> np.random.Generator:
    """Return a generator for the named substream of ``master_seed``."""
    seq = np.random.SeedSequence(master_seed, spawn_key=(stream, *key))
    return np.random.Generator(np.random.PCG64(seq))
