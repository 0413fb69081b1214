"""Exact computations for characterized subgroups of compact abelian groups.

Two constructions are covered: the p-adic integers paired with the Pruefer
group through u_k = 1/p^(n_k+1), and the product of cyclic groups Z(b_n)
paired with their direct sum through the canonical basis.
"""

from charseq.errors import (
    CharseqError,
    ContinuousCharacter,
    DomainError,
    HorizonError,
    Inconclusive,
    NotRefutable,
    SearchExhausted,
)
from charseq.padic import GapRule, PadicDigits, PruferElement, TSequence
from charseq.torus import CertifiedReal, Comparison, UnitRational, chord_length, chord_vs_threshold

__all__ = [
    "CertifiedReal",
    "CharseqError",
    "Comparison",
    "ContinuousCharacter",
    "DomainError",
    "GapRule",
    "HorizonError",
    "Inconclusive",
    "NotRefutable",
    "PadicDigits",
    "PruferElement",
    "SearchExhausted",
    "TSequence",
    "UnitRational",
    "chord_length",
    "chord_vs_threshold",
]
