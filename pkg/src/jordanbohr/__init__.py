"""Numerical Jordan-triple toolkit for bounded symmetric domains and Bohr-type inequalities."""
from .jts_core import DomainError, DomainKind, DomainSpec, RealLinearOp, make_domain
from .kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = ["DomainError", "DomainKind", "DomainSpec", "RealLinearOp", "make_domain",
           "KERNEL_BACKEND", "__version__"]
