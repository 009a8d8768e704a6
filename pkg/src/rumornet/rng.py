"""Deterministic random number generation shared by every backend.

All stochastic behaviour in the package flows through a single PCG32
generator so that compiled and pure-Python kernels consume the exact same
draw sequence and produce bit-identical results. The generator state is
two 64-bit words (``state``, ``inc``) which can be handed to a kernel as a
numpy array and picked back up afterwards.

Draw protocol (identical in every implementation):

* ``next_u32``     -- one PCG32-XSH-RR step.
* ``next_double``  -- ``next_u32() * 2**-32`` (32-bit resolution in [0, 1)).
* ``next_below(n)``-- Lemire bounded int: ``(next_u32() * n) >> 32``. The
  tiny bias is irrelevant for simulation but the mapping must stay fixed,
  because byte-for-byte reproducibility is part of the package contract.
"""

from __future__ import annotations

import numpy as np

MASK64 = 0xFFFFFFFFFFFFFFFF
MASK32 = 0xFFFFFFFF

PCG_MULT = 6364136223846793005
SPLITMIX_GAMMA = 0x9E3779B97F4A7C15

# Stream ids keep the independent draw sequences of one seed apart.
STREAM_GRAPH = 0
STREAM_AGENTS = 1
STREAM_SIR = 2


def mix64(x: int) -> int:
    """SplitMix64 finalizer; a bijection on 64-bit ints."""
    x = (x + SPLITMIX_GAMMA) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def derive_subseed(master_seed: int, index: int) -> int:
    """Child seed for run ``index``; injective in ``index`` for a fixed master.

    ``mix64`` is bijective, so distinct indices below 2**64 cannot collide
    for the same master seed.
    """
    return mix64((mix64(master_seed & MASK64) + index) & MASK64)


class Pcg32:
    """PCG32-XSH-RR with explicit state, cheap to copy and to hand to kernels.

    ``stream`` selects one of the independent sequences of the same seed
    (it parameterizes the LCG increment).
    """

    __slots__ = ("state", "inc")

    def __init__(self, seed: int, stream: int = 0):
        initseq = (mix64((seed & MASK64) ^ SPLITMIX_GAMMA) + stream) & MASK64
        self.state = 0
        self.inc = ((initseq << 1) | 1) & MASK64
        self.next_u32()
        self.state = (self.state + mix64(seed & MASK64)) & MASK64
        self.next_u32()

    def next_u32(self) -> int:
        old = self.state
        self.state = (old * PCG_MULT + self.inc) & MASK64
        xorshifted = (((old >> 18) ^ old) >> 27) & MASK32
        rot = old >> 59
        return ((xorshifted >> rot) | (xorshifted << ((-rot) & 31))) & MASK32

    def next_double(self) -> float:
        return self.next_u32() * 2.0**-32

    def next_below(self, n: int) -> int:
        return (self.next_u32() * n) >> 32

    def shuffle(self, values: list) -> None:
        """Fisher-Yates, high index down, one bounded draw per step."""
        for i in range(len(values) - 1, 0, -1):
            j = self.next_below(i + 1)
            values[i], values[j] = values[j], values[i]

    # -- kernel handoff -----------------------------------------------------

    def state_array(self) -> np.ndarray:
        """Export (state, inc) so a kernel can continue this draw sequence."""
        return np.array([self.state, self.inc], dtype=np.uint64)

    def load_state(self, arr: np.ndarray) -> None:
        self.state = int(arr[0])
        self.inc = int(arr[1])

    def uniform_batch(self, count: int) -> np.ndarray:
        """``count`` consecutive ``next_double`` values as one vector.

        Uses the closed form of the LCG recurrence (s_k = A^k s_0 + G_k c
        with G_k the geometric sum of A powers), so large batches run at
        numpy speed; uint64 overflow wraps exactly like scalar arithmetic.
        """
        if count == 0:
            return np.empty(0, dtype=np.float64)
        with np.errstate(over="ignore"):
            mult = np.uint64(PCG_MULT)
            # pows[k] = A^k for k = 0 .. count-1
            pows = np.empty(count, dtype=np.uint64)
            pows[0] = 1
            if count > 1:
                np.multiply.accumulate(
                    np.full(count - 1, mult, dtype=np.uint64), out=pows[1:]
                )
            # geo[k] = 1 + A + ... + A^(k-1), geo[0] = 0
            geo = np.zeros(count, dtype=np.uint64)
            if count > 1:
                np.cumsum(pows[:-1], out=geo[1:])
            states = pows * np.uint64(self.state) + geo * np.uint64(self.inc)
            self.state = (int(states[-1]) * PCG_MULT + self.inc) & MASK64
            xorshifted = (
                ((states >> np.uint64(18)) ^ states) >> np.uint64(27)
            ).astype(np.uint32)
            rot = (states >> np.uint64(59)).astype(np.uint32)
            out = (xorshifted >> rot) | (
                xorshifted << ((np.uint32(0) - rot) & np.uint32(31))
            )
        return out.astype(np.float64) * 2.0**-32
