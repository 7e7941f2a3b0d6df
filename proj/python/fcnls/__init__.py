"""Numerical laboratory for the fractional inhomogeneous Choquard equation.

The compiled extension carries the implementation; this package re-exports
its public names.  In an installed wheel the extension lives inside the
package; in a build tree it sits on sys.path next to the build products.
"""

try:
    from . import _core
except ImportError:  # build-tree layout: extension on sys.path
    import _core

Error = _core.Error
ProblemParams = _core.ProblemParams
DerivedExponents = _core.DerivedExponents
RegimeFlags = _core.RegimeFlags
Grid = _core.Grid
FunctionalBundle = _core.FunctionalBundle
GroundState = _core.GroundState
Indicators = _core.Indicators
RunStatus = _core.RunStatus
EvolutionConfig = _core.EvolutionConfig
TimeSeriesRow = _core.TimeSeriesRow
RunOutcome = _core.RunOutcome
VarianceRow = _core.VarianceRow
Label = _core.Label
Verdict = _core.Verdict
DichotomyRow = _core.DichotomyRow
DichotomyReport = _core.DichotomyReport

validate = _core.validate
derive = _core.derive
regime = _core.regime
frac_laplacian = _core.frac_laplacian
riesz_convolve = _core.riesz_convolve
homogeneous_norm = _core.homogeneous_norm
sup_norm = _core.sup_norm
bundle = _core.bundle
nonlocal_term = _core.nonlocal_term
gn_quotient = _core.gn_quotient
solve_ground_state = _core.solve_ground_state
gn_constant_formula = _core.gn_constant_formula
indicators = _core.indicators
linear_step = _core.linear_step
nonlinear_step = _core.nonlinear_step
evolve = _core.evolve
localized_variance = _core.localized_variance
variance_report = _core.variance_report
classify = _core.classify
dichotomy_sweep = _core.dichotomy_sweep
gn_sweep = _core.gn_sweep
snapshot_write = _core.snapshot_write
snapshot_read = _core.snapshot_read

__version__ = "0.1.0"

__all__ = [
    "Error", "ProblemParams", "DerivedExponents", "RegimeFlags", "Grid",
    "FunctionalBundle", "GroundState", "Indicators", "RunStatus",
    "EvolutionConfig", "TimeSeriesRow", "RunOutcome", "VarianceRow", "Label",
    "Verdict", "DichotomyRow", "DichotomyReport", "validate", "derive",
    "regime", "frac_laplacian", "riesz_convolve", "homogeneous_norm",
    "sup_norm", "bundle", "nonlocal_term", "gn_quotient",
    "solve_ground_state", "gn_constant_formula", "indicators", "linear_step",
    "nonlinear_step", "evolve", "localized_variance", "variance_report",
    "classify", "dichotomy_sweep", "gn_sweep", "snapshot_write",
    "snapshot_read",
]
