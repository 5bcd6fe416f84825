"""Replayable randomness.

A :class:`RandomTape` owns one 64-bit seed and hands out independent named
sub-streams (learning-phase draw, membership coins, Linear's coins, ...).
Every stream is derived from ``(seed, name)`` alone, so two tapes with the
same seed make the same decisions on the same inputs no matter in which
order the streams are consulted.  Child tapes for trial ``i`` are derived
from ``(seed, i)`` the same way, which keeps trials reproducible
independently of execution order.
"""

from __future__ import annotations

import hashlib
import random
from typing import Any, Iterable, Mapping, Sequence

_MASK64 = (1 << 64) - 1


def derive_seed(seed: int, *key: Any) -> int:
    """Counter-based 64-bit seed derivation from ``seed`` and a key path."""
    text = "/".join([str(seed & _MASK64), *map(str, key)])
    digest = hashlib.blake2b(text.encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


class RandomTape:
    """Seeded source of named, independent random streams."""

    def __init__(self, seed: int = 0):
        self.seed = int(seed) & _MASK64
        self._streams: dict[str, random.Random] = {}

    def __repr__(self):
        return f"{type(self).__name__}(seed={self.seed})"

    def stream(self, name: str) -> random.Random:
        rng = self._streams.get(name)
        if rng is None:
            rng = random.Random(derive_seed(self.seed, "stream", name))
            self._streams[name] = rng
        return rng

    def child(self, *key: Any) -> "RandomTape":
        """Independent tape for a sub-experiment (e.g. trial ``i``)."""
        return RandomTape(derive_seed(self.seed, "child", *key))

    def fork(self, name: str) -> "RandomTape":
        """Independent tape handed to a sub-component such as ``Linear``."""
        return RandomTape(derive_seed(self.seed, "fork", name))

    # draws -------------------------------------------------------------

    def random(self, name: str) -> float:
        return self.stream(name).random()

    def coin(self, name: str, p: float) -> bool:
        """True with probability ``p``."""
        if p >= 1.0:
            # still consume a draw so the stream layout does not depend on p
            self.stream(name).random()
            return True
        return self.stream(name).random() < p

    def binomial(self, name: str, n: int, p: float) -> int:
        rng = self.stream(name)
        return sum(1 for _ in range(n) if rng.random() < p)

    def randrange(self, name: str, k: int) -> int:
        return self.stream(name).randrange(k)

    def permutation(self, name: str, items: Iterable[Any]) -> list:
        out = list(items)
        self.stream(name).shuffle(out)
        return out


class ScriptedTape(RandomTape):
    """Tape whose draws on selected streams are fixed in advance.

    ``script`` maps a stream name to the sequence of values returned by
    successive draws on that stream; once a script runs out the stream falls
    back to seeded randomness.  Values are interpreted per draw method:
    ``coin`` takes a bool, ``binomial``/``randrange`` an int, ``random`` a
    float and ``permutation`` a full sequence.  Keys of the form
    ``"fork/stream"`` script the tape returned by ``fork("fork")``.
    """

    def __init__(self, seed: int = 0, script: Mapping[str, Sequence[Any]] | None = None):
        super().__init__(seed)
        self._script = {k: list(v) for k, v in (script or {}).items()}

    def _next(self, name: str):
        queue = self._script.get(name)
        if queue:
            return True, queue.pop(0)
        return False, None

    def fork(self, name: str) -> "RandomTape":
        prefix = name + "/"
        sub = {k[len(prefix):]: v for k, v in self._script.items() if k.startswith(prefix)}
        return ScriptedTape(derive_seed(self.seed, "fork", name), sub)

    def random(self, name):
        hit, value = self._next(name)
        return float(value) if hit else super().random(name)

    def coin(self, name, p):
        hit, value = self._next(name)
        return bool(value) if hit else super().coin(name, p)

    def binomial(self, name, n, p):
        hit, value = self._next(name)
        return int(value) if hit else super().binomial(name, n, p)

    def randrange(self, name, k):
        hit, value = self._next(name)
        return int(value) if hit else super().randrange(name, k)

    def permutation(self, name, items):
        hit, value = self._next(name)
        if hit:
            items = list(items)
            if sorted(map(repr, value)) != sorted(map(repr, items)):
                raise ValueError(f"scripted permutation {value!r} does not permute {items!r}")
            return list(value)
        return super().permutation(name, items)
