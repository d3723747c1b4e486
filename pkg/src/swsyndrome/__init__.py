"""Syndrome-based Slepian-Wolf coding with convolutional and turbo codes over GF(q)."""

from .bcjr import DecodeResult
from .channels import SourcePrior, SymbolChannel, SyndromeChannel, qsc
from .code import (
    ParityRealization,
    TurboCode,
    coset_representative,
    syndrome_form,
    systematic_encode,
    turbo_encode,
    turbo_syndrome_form,
)
from .codefile import load_code, parse_code
from .decoders import (
    STRATEGIES,
    decode,
    decode_complementary,
    decode_isf,
    decode_map,
    decode_parity_perspective,
    decode_syndrome_trellis,
    turbo_syndrome_decode,
)
from .fields import Field, pack, unpack
from .oracle import enumerate_coset, exact_marginals

__version__ = "0.1.0"

__all__ = [
    "DecodeResult",
    "Field",
    "ParityRealization",
    "STRATEGIES",
    "SourcePrior",
    "SymbolChannel",
    "SyndromeChannel",
    "TurboCode",
    "coset_representative",
    "decode",
    "decode_complementary",
    "decode_isf",
    "decode_map",
    "decode_parity_perspective",
    "decode_syndrome_trellis",
    "enumerate_coset",
    "exact_marginals",
    "load_code",
    "pack",
    "parse_code",
    "qsc",
    "syndrome_form",
    "systematic_encode",
    "turbo_encode",
    "turbo_syndrome_decode",
    "turbo_syndrome_form",
    "unpack",
]
