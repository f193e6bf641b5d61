"""Spectra of a quantum particle on the Moebius strip.

Three models of the Dirichlet Laplacian on a strip of half-width a ruled
along a circle of radius R:

* flat ("fake"): the twisted rectangle without curvature, closed-form
  sine/cosine spectrum;
* effective ("not so fake"): the flat model plus the geometric potential
  -cos(s/R) / (8 R^2), closed-form spectrum through Mathieu characteristic
  values at q = -1/4;
* true: the curved Laplace-Beltrami operator, solved variationally by
  spectral Galerkin projection onto the flat eigenbasis.

The subpackages compute all three, cross-validate them against each other,
and measure the thin-strip convergence rate between the effective and true
models.
"""

from .convergence import SweepResult, eigenvalue_sweep, eigenvector_sweep, fit_rate
from .errors import CapacityError, InputError, MoebiusError, NumericalError
from .galerkin import (
    GalerkinConfig,
    GalerkinSolution,
    assemble,
    basis_modes,
    effective_in_basis,
    residual_norm,
    solve,
)
from .geometry import (
    StripParams,
    SurfacePoint,
    curvatures,
    embed,
    jacobian_f,
    jacobian_f_derivatives,
    potential_va,
    potential_veff,
)
from .linalg import (
    EigenDecomposition,
    SymmetricMatrix,
    TridiagonalSymmetric,
    eig_dense_symmetric,
    eig_tridiagonal,
)
from .mathieu import MathieuChar, char_value, char_values, fourier_coefficients
from .models import (
    ModeIndex,
    Spectrum,
    SpectrumEntry,
    effective_eigenfunction,
    effective_spectrum,
    fake_eigenfunction,
    fake_spectrum,
)
from .quadrature import QuadratureGrid, gauss_legendre, integrate_2d

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "CapacityError",
    "EigenDecomposition",
    "GalerkinConfig",
    "GalerkinSolution",
    "InputError",
    "MathieuChar",
    "MoebiusError",
    "ModeIndex",
    "NumericalError",
    "QuadratureGrid",
    "Spectrum",
    "SpectrumEntry",
    "StripParams",
    "SurfacePoint",
    "SweepResult",
    "SymmetricMatrix",
    "TridiagonalSymmetric",
    "assemble",
    "basis_modes",
    "char_value",
    "char_values",
    "curvatures",
    "effective_eigenfunction",
    "effective_in_basis",
    "effective_spectrum",
    "eig_dense_symmetric",
    "eig_tridiagonal",
    "eigenvalue_sweep",
    "eigenvector_sweep",
    "embed",
    "fake_eigenfunction",
    "fake_spectrum",
    "fit_rate",
    "fourier_coefficients",
    "gauss_legendre",
    "integrate_2d",
    "jacobian_f",
    "jacobian_f_derivatives",
    "potential_va",
    "potential_veff",
    "residual_norm",
    "solve",
]
