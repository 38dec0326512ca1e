from .normalize import (
    NormalizationTrace,
    eliminate_constants,
    enforce_strong_obedience,
    normalize_program,
    split_multiheads,
)

__all__ = [
    "NormalizationTrace",
    "eliminate_constants",
    "enforce_strong_obedience",
    "normalize_program",
    "split_multiheads",
]
