"""Numerics for period domains of K3 type.

Submodules: ``indefinite`` (forms of signature (3,p)), ``period_domain``
(D, Omega, metric, curvature), ``d2_model`` (the quadric model in
P^1 x P^1), ``disk_chains`` (positive disks and Kobayashi lengths),
``nevanlinna`` (characteristic functions) and ``lattice_transport``
(isometries fixing a subspace, chamber transport).
"""

from .errors import K3PeriodError, NumericalError, PreconditionError
from .indefinite import QuadraticSpace, Signature, signature

__version__ = "0.1.0"

__all__ = ["K3PeriodError", "NumericalError", "PreconditionError", "QuadraticSpace", "Signature", "signature"]
