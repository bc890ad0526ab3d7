"""Order indiscernibles and bounded truth over initial segments of the naturals."""

__version__ = "0.1.0"

from .errors import DomainError
from .grammar import parse_formula, render
from .indiscernibles import IndiscernibleWitness, mine_diagonal, mine_indiscernibles
from .satclass import sigma_membership, verify_nabla
from .star import star, star_pnf

__all__ = [
    "DomainError", "IndiscernibleWitness", "mine_diagonal", "mine_indiscernibles",
    "parse_formula", "render", "sigma_membership", "star", "star_pnf", "verify_nabla",
]
