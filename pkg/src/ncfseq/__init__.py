"""Greedy N-continued fractions, their S-adic words and the associated dynamics."""

from .exact import RepresentationError, Surd
from .expansion import (
    Arithmetic,
    DomainError,
    EventuallyPeriodic,
    Explicit,
    FromReal,
    InsufficientDigits,
    convergents,
    cylinder,
    evaluate_cf,
    greedy_digits,
    parse_source,
    slow_digits,
    tn_step,
)
from .words import BinaryWord, limit_prefix, sigma_word, special_words
from .analysis import PrefixTooShort, balance_profile, factor_complexity

__all__ = [
    "Arithmetic", "BinaryWord", "DomainError", "EventuallyPeriodic", "Explicit", "FromReal",
    "InsufficientDigits", "PrefixTooShort", "RepresentationError", "Surd", "balance_profile",
    "convergents", "cylinder", "evaluate_cf", "factor_complexity", "greedy_digits",
    "limit_prefix", "parse_source", "sigma_word", "slow_digits", "special_words", "tn_step",
]
