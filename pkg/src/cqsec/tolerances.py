"""Central numerical acceptance thresholds.

Every tolerance used to validate or certify a numerical object lives here,
so each acceptance rule is defined exactly once.
"""

HERMITIAN_TOL = 1e-12       # max entry of |M - M^dag| for Hermitian acceptance
PSD_TOL = 1e-10             # eigenvalues above -PSD_TOL count as nonnegative
RECONSTRUCTION_TOL = 1e-10  # spectral reconstruction budget, scaled by dim
TRACE_TOL = 1e-10           # |tr(rho) - 1| budget for density operators
PROB_SUM_TOL = 1e-10        # ensemble priors must sum to 1 within this
DIST_SUM_TOL = 1e-12        # classical distributions must sum to 1 within this
COMPLETENESS_TOL = 1e-8     # POVM elements must sum to identity within this
COMMUTE_TOL = 1e-8          # pairwise commutator bound for classical ensembles
SOLVER_TOL = 1e-8           # default optimality-certificate target
SOLVER_MAX_ITER = 5000
MAX_DIM = 256               # hard cap on any constructed matrix dimension
