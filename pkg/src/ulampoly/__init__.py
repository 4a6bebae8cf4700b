"""Enumeration and verification of Ulam polynomials.

A monic polynomial of degree ``n`` is an Ulam polynomial when its coefficient
vector, read as a tuple of roots, reproduces the polynomial.  This package
finds all of them for small ``n`` by homotopy continuation and cross-checks
the result with independent oracles.
"""
__version__ = "0.1.0"

from ._backend import BACKEND
from .core import (
    InputDomainError,
    Orbit,
    UlamSystem,
    elem_sym,
    hypersurface_f,
    iterate_map,
    jacobian,
    opposite_residual,
    pad_zero,
    residual,
    ulam_map,
    verify_fixed_point,
)
from .enumeration import Solution, SolutionSet, canonicalize, dedup_cluster, enumerate_ulam, summarize
from .homotopy import (
    PathResult,
    PathStatus,
    SingularEndpointError,
    StartSystem,
    TrackerConfig,
    build_start,
    homotopy_eval,
    refine_endpoint,
    track_all,
    track_path,
)
from .oracle import RationalTuple, exact_verify_rational, multistart_newton, oracle_u3
from .polyroots import (
    MonicPoly,
    RootFindConfig,
    RootFindError,
    eval_horner,
    multiset_match,
    roots_aberth,
    verify_ulam_by_roots,
)
