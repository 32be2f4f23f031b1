"""Reference transmissions of the testbed experiments."""
from spion_mc_testbed.core.common import parse_bits

FAU_TEXT = "FAU"
FAU_BITS = parse_bits("100101 100000 110100")

# 80-bit random sequence sent in the long transmission test; kept verbatim since its generator seed is unknown.
REFERENCE_80_BITS = parse_bits(
    "11001001 11111110 10110011 01101000 10001010 01011001 01100011 11111000 11010101 00001000"
)

SENSITIVITY_BITS = parse_bits("10101")
DILUTION_SERIES = (10.0, 5.0, 1.0, 0.5, 0.1)

CALIBRATION_TARGET_PEAK = 0.3
CALIBRATION_REFERENCE_CONCENTRATION = 10.0
