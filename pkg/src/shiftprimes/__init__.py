"""Kubilius-type model for the prime factors of shifted primes p + a, with
exact desk-scale experiments comparing the model to the primes themselves.

Modules
-------
prime_engine
    SPF sieve, factorisation, smooth parts, Psi(x, y), pi(x; m, b).
model
    W_q / X_p laws, joint weights g_y / h_y, H functionals, R_T laws,
    Poisson pmf, seeded sampling, Dickman rho.
tv_lab
    Exact total variation distances and bound curves.
poisson_lab
    Joint laws of prime-divisor counts against independent Poissons.
transfer_lab
    Transference gaps, Lambda(n, t) profiles, omega moments, the
    smooth-moduli deviation scan.
kernels
    Backend switch between the compiled core and the numpy fallback.
"""
from .errors import (BudgetExceeded, CacheFormatError, DomainError, PartialResultError,
                     ResourceError, ShiftPrimesError)
from .kernels import BACKEND
from .model import (BIG_OMEGA, OMEGA, Pmf, PrimeSet, ShiftConfig, dickman_rho, exact_dist_R,
                    g_y, h1, h1_prime, h2, h_plain, h_y, poisson_pmf, sample_w_vector, w_pmf,
                    x_pmf)
from .poisson_lab import (JointDist, PrimePartition, dtv_poisson_pair, empirical_joint_integers,
                          empirical_joint_shifted, pgf_check, poisson_joint, theorem2_report)
from .prime_engine import (INFINITY, Factorization, SieveTable, SmoothEnumConfig, build_sieve,
                           enumerate_smooth, euler_phi, factorize, load_sieve, prime_count_ap,
                           prime_pi, psi, save_sieve, smooth_part)
from .transfer_lab import (LilConfig, RegionSpec, ZScanConfig, hypothesis_z_scan,
                           lambda_statistic, lil_profile, omega_moments_shifted,
                           transference_report)
from .tv_lab import (DistanceReport, SmoothPartHistogram, bound_curves, dtv_finite, dtv_integers,
                     dtv_shifted, phi_histogram)

__version__ = "0.1.0"

__all__ = [
    "BudgetExceeded", "CacheFormatError", "DomainError", "PartialResultError", "ResourceError",
    "ShiftPrimesError", "BACKEND", "BIG_OMEGA", "OMEGA", "Pmf", "PrimeSet", "ShiftConfig",
    "dickman_rho", "exact_dist_R", "g_y", "h1", "h1_prime", "h2", "h_plain", "h_y",
    "poisson_pmf", "sample_w_vector", "w_pmf", "x_pmf", "JointDist", "PrimePartition",
    "dtv_poisson_pair", "empirical_joint_integers", "empirical_joint_shifted", "pgf_check",
    "poisson_joint", "theorem2_report", "INFINITY", "Factorization", "SieveTable",
    "SmoothEnumConfig", "build_sieve", "enumerate_smooth", "euler_phi", "factorize",
    "load_sieve", "prime_count_ap", "prime_pi", "psi", "save_sieve", "smooth_part",
    "LilConfig", "RegionSpec", "ZScanConfig", "hypothesis_z_scan", "lambda_statistic",
    "lil_profile", "omega_moments_shifted", "transference_report", "DistanceReport",
    "SmoothPartHistogram", "bound_curves", "dtv_finite", "dtv_integers", "dtv_shifted",
    "phi_histogram",
]
