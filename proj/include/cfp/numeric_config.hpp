#pragma once

namespace cfp {

/// Central record of numeric tolerances. Every comparison of a floating
/// point result against an exact mathematical statement goes through one
/// of these knobs.
struct NumericConfig {
  /// Max allowed |in-weight sum - out-weight sum| per node for balance.
  double balance_tol = 1e-12;
  /// Eigenvalues with modulus below this count as the zero eigenvalue.
  double spectral_tol = 1e-8;
  /// Acceptable ||w^T L||_inf residual for the left null eigenvector.
  double null_residual_tol = 1e-10;
  /// Slack when comparing sliding-window weight integrals against delta.
  double integral_tol = 1e-12;
  /// Consensus error / feasibility residual threshold for convergence.
  double convergence_tol = 1e-6;
  /// Any ||x_i|| beyond this aborts the run as divergent.
  double divergence_threshold = 1e9;
};

}  // namespace cfp
