"""Polynomial phases over prime fields and the structure behind their Gowers norms."""
from .errors import DomainError, IntractableError, PartialProgressError, PolydistError, ResourceError
from .field import DEFAULT_LIMITS, Limits, PrimeFieldCtx
from .poly import Poly, parse_poly, resolve_poly, symmetric_poly

__version__ = "0.1.0"
__all__ = ["DomainError", "IntractableError", "PartialProgressError", "PolydistError",
           "ResourceError", "DEFAULT_LIMITS", "Limits", "PrimeFieldCtx", "Poly",
           "parse_poly", "resolve_poly", "symmetric_poly"]
