"""
Seeded random streams.

All randomness flows through numpy's PCG64 bit generator seeded by a
SeedSequence. The user seed is the entropy; each operation appends its own
stream id (and any per-call keys such as the scale) as the spawn key, so two
operations never share a stream and results do not depend on call order or on
the machine.
"""

import numpy as np

SPHERE = 1
EMBEDDING = 2
SWISS_ROLL = 3
BALL = 4
SPLIT = 5
FRESH_DRAW = 6
TASK = 7


def stream(seed: int, stream_id: int, *keys: int) -> np.random.Generator:
    """Return the generator for one operation's stream.

    Args:
        seed: User-facing 64-bit seed
        stream_id: Operation identifier from this module
        *keys: Further nonnegative integers distinguishing calls within the
            operation (scale, repetition, ...)
    """
    sequence = np.random.SeedSequence(
        entropy=int(seed) & 0xFFFFFFFFFFFFFFFF,
        spawn_key=(int(stream_id), *(int(key) for key in keys)),
    )
    return np.random.Generator(np.random.PCG64(sequence))


def derive_seed(seed: int, *keys: int) -> int:
    """Deterministically derive a child seed, e.g. one per repetition."""
    sequence = np.random.SeedSequence(
        entropy=int(seed) & 0xFFFFFFFFFFFFFFFF,
        spawn_key=(TASK, *(int(key) for key in keys)),
    )
    return int(sequence.generate_state(1, dtype=np.uint64)[0])
