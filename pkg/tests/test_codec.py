import string

import numpy as np
import pytest

from spion_mc_testbed.codec import decode_bits
from spion_mc_testbed.codec import encode_letter
from spion_mc_testbed.codec import encode_text
from spion_mc_testbed.core.common import parse_bits
from spion_mc_testbed.errors import FramingError
from spion_mc_testbed.errors import InvalidLetterError
from spion_mc_testbed.errors import SyncBitError
from spion_mc_testbed.errors import UnsupportedCharacterError
from spion_mc_testbed.harness.sequences import FAU_BITS


class TestEncode:
    """Six-bit line code."""

    def test_fau(self):
        assert encode_text("FAU") == parse_bits("100101 100000 110100")
        assert encode_text("FAU") == FAU_BITS

    @pytest.mark.parametrize("letter, codeword", [("A", "100000"), ("Z", "111001"), ("F", "100101")])
    def test_letters(self, letter, codeword):
        assert encode_letter(letter) == parse_bits(codeword)

    def test_every_codeword_has_sync_bit(self):
        for letter in string.ascii_uppercase:
            assert encode_letter(letter)[0] == 1

    def test_empty(self):
        with pytest.raises(ValueError):
            encode_text("")

    def test_lowercase(self):
        with pytest.raises(UnsupportedCharacterError) as error:
            encode_text("FaU")
        assert error.value.position == 1
        assert error.value.character == "a"

    def test_space(self):
        with pytest.raises(UnsupportedCharacterError):
            encode_text("HI THERE")


class TestDecode:
    """Strict and lenient decoding."""

    def test_fau(self):
        assert decode_bits(FAU_BITS) == "FAU"

    def test_round_trip_random_text(self):
        """Random A-Z strings survive encode/decode."""
        rng = np.random.default_rng(2024)
        for _ in range(1000):
            length = int(rng.integers(1, 12))
            text = "".join(rng.choice(list(string.ascii_uppercase), size=length))
            assert decode_bits(encode_text(text)) == text

    def test_framing(self):
        with pytest.raises(FramingError):
            decode_bits(parse_bits("1001011"))

    def test_missing_sync_bit(self):
        with pytest.raises(SyncBitError):
            decode_bits(parse_bits("000101"))

    def test_index_out_of_alphabet(self):
        """Index 26..31 does not map to a letter."""
        with pytest.raises(InvalidLetterError):
            decode_bits(parse_bits("111010"))

    def test_lenient(self):
        bits = parse_bits("100101 000000 111111 110100 10")
        assert decode_bits(bits, strict=False) == "F??U?"

    def test_empty(self):
        assert decode_bits(()) == ""
