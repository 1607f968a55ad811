"""RS-SPC product codes with two-phase local/global iterative decoding."""

from .errors import ConfigurationError
from .galois import Field, build_field
from .rs import DecodeOutcome, RsCode, bm_decode, build_rs, encode, is_codeword, syndromes
from .binary_image import BinaryMatrix, density, expand, sparsify
from .product import ProductCode, build_product, check_product, encode_product
from .channel import ChannelConfig, ebn0_to_sigma, llr, modulate, transmit
from .decoder import DecoderConfig, DecoderState, IterativeDecoder
from .harness import SimConfig, SimResult, genie_sweep, run_sweep, write_csv

__version__ = "0.1.0"
