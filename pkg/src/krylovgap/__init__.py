"""Block Krylov convergence certificates for spectra without a gap at the target rank."""

__version__ = "0.1.0"

from .amplifier import (
    ChebyshevAmplifier, OddPolynomial, apply_odd_polynomial, build_amplifier,
    chebyshev_t, decay_factor, is_admissible, odd_monomial, tail_bound,
)
from .bounds import (
    BoundCertificate, Compatibility, DeflationCoefficient, DominantSubspace,
    GaplessProblem, best_dominant_subspace, cor32_bound, deflation_coefficient,
    is_h_compatible, proof_witness, residual_coefficient, search_witness,
    thm31_bound, thm33_bound, thm34_bound,
)
from .errors import (
    EmptyKrylov, InsufficientKrylovRank, InvalidArgument, InvalidInput,
    KrylovGapError, NoGapAtIndex, NotCompatible,
)
from .krylov import KrylovBasis, augmented_subspace, extend, krylov_basis, krylov_sequence
from .lowrank import (
    LowRankResult, approx_error, best_rank_i_from_range, gap_case_lowrank,
    lowrank_certificate, proto_algorithm,
)
from .matrix_core import (
    OrthonormalBasis, SVDFactorization, jacobi_svd, orthonormal_range,
    pseudoinverse, thin_svd, truncated_svd_approx,
)
from .spectrum import SpectrumPartition, cluster_spectrum, partition_at, partition_svd
from .subspace import (
    PrincipalAngles, orthogonal_difference, principal_angles, sin_tan_theta_norms,
    sin_theta, sin_theta_projector,
)
