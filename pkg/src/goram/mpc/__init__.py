"""Replicated three-party secret sharing."""
from .circuits import (
    and_fold,
    arith_to_bool,
    bit_to_arith,
    eq,
    gt,
    lt,
    mask_select,
    mux,
    neq,
    not_bit,
    oblivious_dot,
    or_fold,
    sign_bit,
)
from .prf import PrfStream, derive_key
from .session import IntegrityError, Metrics, PartyRuntime, Session, setup_parties
from .shares import ArithShares, BoolShares
from .transport import CLIENT, InProcessTransport, Transport

__all__ = [
    "ArithShares", "BoolShares", "CLIENT", "InProcessTransport", "IntegrityError", "Metrics",
    "PartyRuntime", "PrfStream", "Session", "Transport", "and_fold", "arith_to_bool",
    "bit_to_arith", "derive_key", "eq", "gt", "lt", "mask_select", "mux", "neq", "not_bit",
    "oblivious_dot", "or_fold", "setup_parties", "sign_bit",
]
