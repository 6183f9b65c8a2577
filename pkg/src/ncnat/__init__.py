"""Noncommutative natural numbers: the free magma on one generator modulo
the medial identity ``(w+x)+(y+z) = (w+y)+(x+z)``."""

__version__ = "0.1.0"

from .arithmetic import Factorization, factorize, is_irreducible, multiply, multiply_classes, oplus
from .config import Config, configure, get_config
from .congruence import ClassId, Stratum, are_equal, class_count, class_of, close_stratum, list_classes
from .errors import NcnatError, ParseError, SiteError, StratumBudgetError
from .qinv import ELL, ELL_A, DeformationSpec, Polynomial, eval_morphism, invariant_table, magnitude_via_ell
from .search import (
    NonCancelWitness,
    RewriteChain,
    find_collisions,
    flanked_candidates,
    read_chain,
    search_noncancel,
    verify_chain,
)
from .terms import LEAF, RewriteSite, Term, apply_rewrite, enumerate_stratum, format_term, magnitude, parse, rewrite_sites
