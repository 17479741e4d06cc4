"""
Counter-based random streams.

Every draw made by the simulator comes from a Philox stream addressed by
(seed, trial, generation, couple type, slot). Streams never share state,
so trials can run in any order on any thread and still reproduce bit for
bit, and the k-th couple of a given type always receives the same
offspring draw however many couples precede or follow it.
"""

from __future__ import annotations
import numpy as np

SEED_BITS = 64

# slots inside one (trial, generation, type) address
SLOT_OFFSPRING = 0
SLOT_THINNING = 1
SLOT_SUPERPOSE = 2


def check_seed(seed: int) -> int:
    if isinstance(seed, bool) or int(seed) != seed or not 0 <= int(seed) < 2**SEED_BITS:
        raise ValueError(f"Seeds must be unsigned 64-bit integers, got {seed!r}")
    return int(seed)


def stream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for the address `key` under `seed`."""
    sequence = np.random.SeedSequence(check_seed(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(sequence))


class TrialStreams:
    """Stream factory bound to one trial of one run."""

    def __init__(self, seed: int, trial: int = 0):
        self.seed = check_seed(seed)
        self.trial = trial

    def offspring(self, generation: int, couple_type: int, slot: int = SLOT_OFFSPRING) -> np.random.Generator:
        return stream(self.seed, self.trial, generation, couple_type, slot)

    def __repr__(self) -> str:
        return f"TrialStreams(seed={self.seed}, trial={self.trial})"
