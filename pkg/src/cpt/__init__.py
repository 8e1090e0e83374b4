"""Coded packet transport: Reed-Solomon erasure coding striped over disjoint paths."""

from .analysis import (
    LossModel,
    check_constraints,
    evaluate_config,
    min_redundancy,
    operational_range,
    p_fail,
    p_fail_after_failure,
)
from .galois import GF, FieldSpec, build_field, default_field
from .rs_code import Codec, CodeParams, CodedSet, PacketSet, build_generator, decode, encode
from .transport import CptConfig, StripeFile, encode_and_stripe, plan_stripes, reassemble

__version__ = "0.1.0"
