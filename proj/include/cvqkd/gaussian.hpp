#pragma once

// Convention-fixing Gaussian-state engine.
//
// Conventions used throughout the library:
//   * quadrature ordering (x_1, p_1, x_2, p_2, ...)
//   * shot-noise units: vacuum quadrature variance = 1
//   * symplectic form Omega = direct sum of [[0, 1], [-1, 0]] blocks
//   * covariance transforms as gamma -> S^T gamma S
// First moments are not tracked; entropies and key rates do not depend on
// them.

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "cvqkd/errors.hpp"

namespace cvqkd {

enum class Quadrature { X, P };

/// 2N x 2N real matrix of quadrature second moments in shot-noise units.
/// Construction checks the shape only; symmetry and physicality are
/// diagnosed by validate_cm so that broken matrices can still be inspected.
class CovarianceMatrix {
public:
  explicit CovarianceMatrix(Eigen::MatrixXd entries);

  int modes() const { return static_cast<int>(mat_.rows()) / 2; }
  int dim() const { return static_cast<int>(mat_.rows()); }
  const Eigen::MatrixXd& mat() const { return mat_; }
  double operator()(int i, int j) const { return mat_(i, j); }

private:
  Eigen::MatrixXd mat_;
};

/// Linear symplectic transform on N modes. Construction enforces
/// S * Omega * S^T = Omega to 1e-12 elementwise.
class SymplecticMatrix {
public:
  explicit SymplecticMatrix(Eigen::MatrixXd entries);

  int modes() const { return static_cast<int>(mat_.rows()) / 2; }
  int dim() const { return static_cast<int>(mat_.rows()); }
  const Eigen::MatrixXd& mat() const { return mat_; }

private:
  Eigen::MatrixXd mat_;
};

/// The symplectic form Omega for n_modes modes.
Eigen::MatrixXd symplectic_form(int n_modes);

/// (x+1)log2(x+1) - x log2 x, in bits; continuous at 0 with value 0.
/// Values in [-1e-12, 0) clamp to 0; smaller values raise std::domain_error.
double g_function(double x);

/// Vacuum state on n modes: identity.
CovarianceMatrix vacuum_cm(int n_modes);

/// Two-mode squeezed vacuum with symmetrized quadrature variance V >= 1:
/// diagonal blocks V*I, off-diagonal blocks sqrt(V^2-1)*Z.
CovarianceMatrix epr_cm(double V);

/// Single thermal mode diag(W, W), W >= 1.
CovarianceMatrix thermal_cm(double W);

/// Block direct sum; modes of `b` are appended after the modes of `a`.
CovarianceMatrix direct_sum(const CovarianceMatrix& a, const CovarianceMatrix& b);

/// Beam splitter of transmission T acting on modes (i, j):
///   x_i' =  sqrt(T) x_i + sqrt(1-T) x_j
///   x_j' = -sqrt(1-T) x_i + sqrt(T) x_j
/// (same for p), identity elsewhere. The sign convention on the reflected
/// arm is fixed so tests are deterministic; covariance predictions do not
/// depend on it.
SymplecticMatrix beam_splitter(double transmission, int mode_i, int mode_j,
                               int n_modes);

/// S^T * gamma * S, re-symmetrized against floating-point drift.
CovarianceMatrix apply_symplectic(const CovarianceMatrix& gamma,
                                  const SymplecticMatrix& s);

/// Principal submatrix on the kept modes, ordering preserved.
CovarianceMatrix partial_trace(const CovarianceMatrix& gamma,
                               std::span<const int> keep_modes);

/// State of the remaining modes after an ideal homodyne measurement of the
/// selected quadrature of `measured_mode`. The pseudoinverse of X gamma X is
/// applied structurally: only the measured quadrature entry is inverted.
CovarianceMatrix condition_homodyne(const CovarianceMatrix& gamma,
                                    int measured_mode, Quadrature q);

/// State of the remaining modes after an ideal heterodyne measurement of
/// `measured_mode`: gamma_rest - sigma (gamma_m + I)^-1 sigma^T. Must agree
/// with the explicit 50/50-splitter-plus-two-homodynes construction.
CovarianceMatrix condition_heterodyne(const CovarianceMatrix& gamma,
                                      int measured_mode);

/// Symplectic spectrum: moduli of the eigenvalues of Omega*gamma, one per
/// +/- pair, descending. Values in [1 - 1e-9, 1) clamp to 1. Throws
/// NumericalError if the moduli do not pair up.
std::vector<double> symplectic_eigenvalues(const CovarianceMatrix& gamma);

/// Sum of G((nu_k - 1)/2) over the symplectic spectrum, in bits.
/// Throws NumericalError when the state is unphysical (nu < 1 - 1e-9).
double von_neumann_entropy(const CovarianceMatrix& gamma);

struct CmReport {
  double symmetry_defect = 0.0;
  double min_symplectic_eigenvalue = 0.0;
  bool symmetric = false;
  bool physical = false;
  bool pass() const { return symmetric && physical; }
};

/// Diagnostic: symmetry defect and minimum symplectic eigenvalue. Never
/// throws on unphysical input; that is the point.
CmReport validate_cm(const CovarianceMatrix& gamma);

}  // namespace cvqkd
