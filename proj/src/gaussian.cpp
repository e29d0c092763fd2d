#include "cvqkd/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cvqkd {

namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kPhysicalTol = 1e-9;
constexpr double kPairTol = 1e-6;

// Moduli of the eigenvalues of Omega*gamma, pair-averaged, descending.
// No physicality clamp; callers decide what sub-unity values mean.
std::vector<double> raw_symplectic_spectrum(const Eigen::MatrixXd& g) {
  const int n = static_cast<int>(g.rows()) / 2;
  const Eigen::MatrixXd m = symplectic_form(n) * g;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("symplectic spectrum: eigensolver did not converge");
  }
  std::vector<double> moduli(2 * n);
  for (int k = 0; k < 2 * n; ++k) {
    moduli[k] = std::abs(solver.eigenvalues()[k]);
  }
  std::sort(moduli.begin(), moduli.end(), std::greater<>());
  std::vector<double> out(n);
  for (int k = 0; k < n; ++k) {
    const double hi = moduli[2 * k];
    const double lo = moduli[2 * k + 1];
    if (hi - lo > kPairTol * std::max(1.0, hi)) {
      throw NumericalError("symplectic spectrum: eigenvalue moduli do not pair (" +
                           std::to_string(hi) + " vs " + std::to_string(lo) + ")");
    }
    out[k] = 0.5 * (hi + lo);
  }
  return out;
}

Eigen::MatrixXd symmetrized(Eigen::MatrixXd m) {
  return 0.5 * (m + m.transpose()).eval();
}

// Indices of all quadratures except those of `mode`.
std::vector<int> rest_indices(int n_modes, int mode) {
  std::vector<int> rest;
  rest.reserve(2 * (n_modes - 1));
  for (int k = 0; k < 2 * n_modes; ++k) {
    if (k != 2 * mode && k != 2 * mode + 1) rest.push_back(k);
  }
  return rest;
}

Eigen::MatrixXd select(const Eigen::MatrixXd& g, const std::vector<int>& rows,
                       const std::vector<int>& cols) {
  Eigen::MatrixXd out(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      out(i, j) = g(rows[i], cols[j]);
    }
  }
  return out;
}

}  // namespace

CovarianceMatrix::CovarianceMatrix(Eigen::MatrixXd entries) : mat_(std::move(entries)) {
  if (mat_.rows() != mat_.cols() || mat_.rows() < 2 || mat_.rows() % 2 != 0) {
    throw std::invalid_argument("CovarianceMatrix: expected even square dimension >= 2");
  }
}

SymplecticMatrix::SymplecticMatrix(Eigen::MatrixXd entries) : mat_(std::move(entries)) {
  if (mat_.rows() != mat_.cols() || mat_.rows() < 2 || mat_.rows() % 2 != 0) {
    throw std::invalid_argument("SymplecticMatrix: expected even square dimension >= 2");
  }
  const Eigen::MatrixXd omega = symplectic_form(modes());
  const double defect =
      (mat_ * omega * mat_.transpose() - omega).cwiseAbs().maxCoeff();
  if (!(defect <= kSymmetryTol)) {
    throw std::invalid_argument("SymplecticMatrix: S*Omega*S^T != Omega (defect " +
                                std::to_string(defect) + ")");
  }
}

Eigen::MatrixXd symplectic_form(int n_modes) {
  if (n_modes < 1) throw std::invalid_argument("symplectic_form: n_modes must be >= 1");
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
  for (int k = 0; k < n_modes; ++k) {
    omega(2 * k, 2 * k + 1) = 1.0;
    omega(2 * k + 1, 2 * k) = -1.0;
  }
  return omega;
}

double g_function(double x) {
  if (x < 0.0) {
    if (x >= -1e-12) return 0.0;
    throw std::domain_error("g_function: negative argument " + std::to_string(x));
  }
  if (x == 0.0) return 0.0;
  return (x + 1.0) * std::log2(x + 1.0) - x * std::log2(x);
}

CovarianceMatrix vacuum_cm(int n_modes) {
  if (n_modes < 1) throw std::invalid_argument("vacuum_cm: n_modes must be >= 1");
  return CovarianceMatrix(Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes));
}

CovarianceMatrix epr_cm(double V) {
  if (!(V >= 1.0)) throw std::invalid_argument("epr_cm: V must be >= 1");
  const double c = std::sqrt(V * V - 1.0);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(4, 4);
  g(0, 0) = g(1, 1) = g(2, 2) = g(3, 3) = V;
  g(0, 2) = g(2, 0) = c;
  g(1, 3) = g(3, 1) = -c;
  return CovarianceMatrix(std::move(g));
}

CovarianceMatrix thermal_cm(double W) {
  if (!(W >= 1.0)) throw std::invalid_argument("thermal_cm: W must be >= 1");
  Eigen::MatrixXd g = Eigen::MatrixXd::Identity(2, 2) * W;
  return CovarianceMatrix(std::move(g));
}

CovarianceMatrix direct_sum(const CovarianceMatrix& a, const CovarianceMatrix& b) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(a.dim() + b.dim(), a.dim() + b.dim());
  g.topLeftCorner(a.dim(), a.dim()) = a.mat();
  g.bottomRightCorner(b.dim(), b.dim()) = b.mat();
  return CovarianceMatrix(std::move(g));
}

SymplecticMatrix beam_splitter(double transmission, int mode_i, int mode_j,
                               int n_modes) {
  if (!(transmission >= 0.0 && transmission <= 1.0)) {
    throw std::invalid_argument("beam_splitter: transmission must lie in [0, 1]");
  }
  if (n_modes < 2 || mode_i == mode_j || mode_i < 0 || mode_j < 0 ||
      mode_i >= n_modes || mode_j >= n_modes) {
    throw std::invalid_argument("beam_splitter: invalid mode indices");
  }
  const double t = std::sqrt(transmission);
  const double r = std::sqrt(1.0 - transmission);
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes);
  // Transposed action matrix, so that S^T gamma S transforms the quadratures
  // as documented in the header.
  for (int q = 0; q < 2; ++q) {
    s(2 * mode_i + q, 2 * mode_i + q) = t;
    s(2 * mode_j + q, 2 * mode_j + q) = t;
    s(2 * mode_i + q, 2 * mode_j + q) = -r;
    s(2 * mode_j + q, 2 * mode_i + q) = r;
  }
  return SymplecticMatrix(std::move(s));
}

CovarianceMatrix apply_symplectic(const CovarianceMatrix& gamma,
                                  const SymplecticMatrix& s) {
  if (gamma.dim() != s.dim()) {
    throw std::invalid_argument("apply_symplectic: dimension mismatch");
  }
  return CovarianceMatrix(symmetrized(s.mat().transpose() * gamma.mat() * s.mat()));
}

CovarianceMatrix partial_trace(const CovarianceMatrix& gamma,
                               std::span<const int> keep_modes) {
  if (keep_modes.empty()) {
    throw std::invalid_argument("partial_trace: keep_modes must be non-empty");
  }
  std::vector<int> seen(gamma.modes(), 0);
  std::vector<int> idx;
  idx.reserve(2 * keep_modes.size());
  for (int m : keep_modes) {
    if (m < 0 || m >= gamma.modes()) {
      throw std::invalid_argument("partial_trace: mode index out of range");
    }
    if (seen[m]++) throw std::invalid_argument("partial_trace: duplicate mode index");
    idx.push_back(2 * m);
    idx.push_back(2 * m + 1);
  }
  return CovarianceMatrix(select(gamma.mat(), idx, idx));
}

CovarianceMatrix condition_homodyne(const CovarianceMatrix& gamma,
                                    int measured_mode, Quadrature q) {
  if (gamma.modes() < 2) {
    throw std::invalid_argument("condition_homodyne: need at least 2 modes");
  }
  if (measured_mode < 0 || measured_mode >= gamma.modes()) {
    throw std::invalid_argument("condition_homodyne: mode index out of range");
  }
  const int qi = 2 * measured_mode + (q == Quadrature::P ? 1 : 0);
  const double gqq = gamma(qi, qi);
  if (!(gqq > 0.0)) {
    throw NumericalError("condition_homodyne: non-positive measured quadrature variance");
  }
  const std::vector<int> rest = rest_indices(gamma.modes(), measured_mode);
  const Eigen::MatrixXd sigma = select(gamma.mat(), rest, {qi});
  Eigen::MatrixXd out = select(gamma.mat(), rest, rest) - (sigma * sigma.transpose()) / gqq;
  return CovarianceMatrix(symmetrized(std::move(out)));
}

CovarianceMatrix condition_heterodyne(const CovarianceMatrix& gamma,
                                      int measured_mode) {
  if (gamma.modes() < 2) {
    throw std::invalid_argument("condition_heterodyne: need at least 2 modes");
  }
  if (measured_mode < 0 || measured_mode >= gamma.modes()) {
    throw std::invalid_argument("condition_heterodyne: mode index out of range");
  }
  const int x = 2 * measured_mode;
  Eigen::Matrix2d m;
  m << gamma(x, x) + 1.0, gamma(x, x + 1), gamma(x + 1, x), gamma(x + 1, x + 1) + 1.0;
  const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  if (!(det > 0.0) || !std::isfinite(det)) {
    throw NumericalError("condition_heterodyne: singular measured block");
  }
  Eigen::Matrix2d inv;
  inv << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
  inv /= det;
  const std::vector<int> rest = rest_indices(gamma.modes(), measured_mode);
  const Eigen::MatrixXd sigma = select(gamma.mat(), rest, {x, x + 1});
  Eigen::MatrixXd out = select(gamma.mat(), rest, rest) - sigma * inv * sigma.transpose();
  return CovarianceMatrix(symmetrized(std::move(out)));
}

std::vector<double> symplectic_eigenvalues(const CovarianceMatrix& gamma) {
  std::vector<double> nus = raw_symplectic_spectrum(gamma.mat());
  for (double& nu : nus) {
    if (nu < 1.0 && nu >= 1.0 - kPhysicalTol) nu = 1.0;
  }
  return nus;
}

double von_neumann_entropy(const CovarianceMatrix& gamma) {
  double bits = 0.0;
  for (double nu : symplectic_eigenvalues(gamma)) {
    if (nu < 1.0) {
      throw NumericalError("von_neumann_entropy: unphysical state, nu = " +
                           std::to_string(nu));
    }
    bits += g_function(0.5 * (nu - 1.0));
  }
  return bits;
}

CmReport validate_cm(const CovarianceMatrix& gamma) {
  CmReport report;
  report.symmetry_defect =
      (gamma.mat() - gamma.mat().transpose()).cwiseAbs().maxCoeff();
  report.symmetric = report.symmetry_defect <= kSymmetryTol;
  // Diagnose the spectrum of the symmetrized matrix so a report comes back
  // even for slightly asymmetric input.
  const std::vector<double> nus = raw_symplectic_spectrum(symmetrized(gamma.mat()));
  report.min_symplectic_eigenvalue = *std::min_element(nus.begin(), nus.end());
  report.physical = report.min_symplectic_eigenvalue >= 1.0 - kPhysicalTol;
  return report;
}

}  // namespace cvqkd
