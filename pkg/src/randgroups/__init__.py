"""Random groups in the Gromov density model, at desk scale.

Sampling, small cancellation verification, Dehn's algorithm, bounded
Cayley-ball geometry, van Kampen diagrams, universal-sentence evaluation
and position-unification probability bounds.
"""

__version__ = "0.1.0"

from .words import Word, TemplateWord, Presentation, free_reduce, cyclic_reduce, invert, substitute
from .sampler import DensityParams, sample_presentation, sample_reduced_word, relator_count, reduced_word_count
from .cancellation import (
    symmetrize,
    max_piece_length,
    satisfies_cprime,
    dehn_reduce,
    is_trivial,
    equal_in_group,
    first_moment_piece_bound,
)

__all__ = [
    "Word",
    "TemplateWord",
    "Presentation",
    "free_reduce",
    "cyclic_reduce",
    "invert",
    "substitute",
    "DensityParams",
    "sample_presentation",
    "sample_reduced_word",
    "relator_count",
    "reduced_word_count",
    "symmetrize",
    "max_piece_length",
    "satisfies_cprime",
    "dehn_reduce",
    "is_trivial",
    "equal_in_group",
    "first_moment_piece_bound",
]
