"""Spectral covers of commuting matrix tuples and their projective duals."""

__version__ = '0.1.0'

from .errors import (CommutativityError, ConvergenceError, InterpolationError,
                     JointSpectrumError, NotOnHypersurfaceError, NumericalError, ShapeError,
                     SingularPointError, SpectralCoverError)
from .matkernel import canonical_order, eigenvalues, hessenberg, schur
from .poly import (MultiPoly, ProjectivePoint, UniPoly, discriminant, evaluate, gradient,
                   interpolate_homogeneous, monomials, restrict_to_line, uni_roots)
from .higgs import (HiggsTuple, JointSpectrum, char_poly_direction, characteristic_polynomial,
                    check_commuting, exterior_trace, joint_spectrum, pencil_determinant,
                    power_traces, spectral_residuals)
from .duality import (Hyperplane, chart_distance, dual_point, gauss_map, hitchin_check,
                      incidence, linear_factorization, sample_hypersurface, verify_dual_cover)
from .cover import (ChartFamily, GridAxis, GridSpec, detect_ramification, match_sheets,
                    matching_distance, parse_grid, sweep_grid, track_sheets)

__all__ = [name for name in dir() if not name.startswith('_')]
