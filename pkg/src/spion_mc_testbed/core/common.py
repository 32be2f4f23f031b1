import re
from typing import Iterable
from typing import Sequence
from typing import Tuple

import numpy as np

BitSequence = Tuple[int, ...]

_WHITESPACE = re.compile(r"\s+")


def parse_bits(text: str) -> BitSequence:
    """Parses a 0/1 string; whitespace (including group separators) is ignored."""
    compact = _WHITESPACE.sub("", text)
    if not re.fullmatch(r"[01]*", compact):
        raise ValueError(f"bit string may only contain '0' and '1', got {text!r}")
    return tuple(int(ch) for ch in compact)


def format_bits(bits: Iterable[int], group: int = 0) -> str:
    text = "".join(str(int(b)) for b in bits)
    if group <= 0:
        return text
    return " ".join(text[i : i + group] for i in range(0, len(text), group))


def as_bits(bits: Sequence[int]) -> BitSequence:
    result = tuple(int(b) for b in bits)
    invalid = sorted({b for b in result if b not in (0, 1)})
    if invalid:
        raise ValueError(f"bits must be 0 or 1, got {invalid}")
    return result


def validate_transmission_bits(bits: Sequence[int]) -> BitSequence:
    """Checks the receiver-sync precondition: non-empty and headed by a "1"."""
    result = as_bits(bits)
    if not result:
        raise ValueError("bit sequence for transmission must not be empty")
    if result[0] != 1:
        raise ValueError("bit sequence for transmission must start with '1' (receiver synchronisation)")
    return result


def hamming_distance(lhs: Sequence[int], rhs: Sequence[int]) -> int:
    if len(lhs) != len(rhs):
        raise ValueError(f"sequences differ in length ({len(lhs)} != {len(rhs)})")
    return int(np.count_nonzero(np.asarray(lhs) != np.asarray(rhs)))


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """Independent generator for ``stream`` (lane, run or row index) derived from ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(s) for s in stream)))
