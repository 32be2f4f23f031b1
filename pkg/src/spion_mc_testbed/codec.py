"""
Text coding table for the testbed.

Every capital Latin letter becomes a 6-bit codeword: a leading "1" that lets the receiver synchronise,
followed by the 5-bit index of the letter in the alphabet ("A" = 0, ..., "Z" = 25).
So "A" is 100000, "F" is 100101, "U" is 110100.
"""
import string
from typing import List
from typing import Sequence

from spion_mc_testbed.core.common import BitSequence
from spion_mc_testbed.core.common import as_bits
from spion_mc_testbed.core.common import format_bits
from spion_mc_testbed.errors import FramingError
from spion_mc_testbed.errors import InvalidLetterError
from spion_mc_testbed.errors import SyncBitError
from spion_mc_testbed.errors import UnsupportedCharacterError

CODEWORD_LENGTH = 6
INDEX_BITS = CODEWORD_LENGTH - 1
ALPHABET = string.ascii_uppercase
UNKNOWN_LETTER = "?"


def encode_letter(letter: str) -> BitSequence:
    index = ALPHABET.index(letter)
    return (1,) + tuple((index >> shift) & 1 for shift in reversed(range(INDEX_BITS)))


def encode_text(message: str) -> BitSequence:
    """
    Encodes an A-Z message, one codeword per character.

    Parameters
    ----------
    message : str
        Non-empty string of capital Latin letters.

    Returns
    -------
    BitSequence
        ``6 * len(message)`` bits, starting with "1".

    """
    if not message:
        raise ValueError("message must not be empty")

    bits: List[int] = []
    for position, character in enumerate(message):
        if character not in ALPHABET:
            raise UnsupportedCharacterError(position=position, character=character)
        bits.extend(encode_letter(character))

    return tuple(bits)


def _decode_codeword(codeword: BitSequence, position: int) -> str:
    if codeword[0] != 1:
        raise SyncBitError(f"codeword {position} ({format_bits(codeword)}) does not start with the sync bit '1'")

    index = 0
    for bit in codeword[1:]:
        index = (index << 1) | bit
    if index >= len(ALPHABET):
        raise InvalidLetterError(f"codeword {position} ({format_bits(codeword)}) encodes index {index} > 25")

    return ALPHABET[index]


def decode_bits(bits: Sequence[int], strict: bool = True) -> str:
    """
    Inverse of ``encode_text``.

    In strict mode any malformed codeword raises; with ``strict=False`` malformed codewords (and a trailing
    incomplete one) are rendered as ``"?"`` so partially corrupted receptions can still be inspected.
    """
    bits = as_bits(bits)
    if strict and len(bits) % CODEWORD_LENGTH != 0:
        raise FramingError(f"bit count {len(bits)} is not a multiple of {CODEWORD_LENGTH}")

    letters = []
    for position, offset in enumerate(range(0, len(bits), CODEWORD_LENGTH)):
        codeword = bits[offset : offset + CODEWORD_LENGTH]
        if len(codeword) < CODEWORD_LENGTH:
            letters.append(UNKNOWN_LETTER)
            continue
        try:
            letters.append(_decode_codeword(codeword, position))
        except (SyncBitError, InvalidLetterError):
            if strict:
                raise
            letters.append(UNKNOWN_LETTER)

    return "".join(letters)
