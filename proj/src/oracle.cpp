#include "cvqkd/oracle.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace cvqkd {

namespace {

constexpr double kChiTol = 1e-9;

// Measurement-outcome covariance for one protocol, built from the Alice-Bob
// marginal: homodyne keeps the x row, heterodyne keeps both quadratures with
// one shot-noise unit of splitter vacuum added on the diagonal.
Eigen::MatrixXd outcome_covariance(const ProtocolSpec& spec,
                                   const CovarianceMatrix& gab, int* dim_a_out) {
  const bool a_het = spec.prep == StatePrep::Coherent;
  const bool b_het = spec.meas == Measurement::Heterodyne;
  std::vector<int> rows;
  if (a_het) {
    rows = {0, 1};
  } else {
    rows = {0};
  }
  const int dim_a = static_cast<int>(rows.size());
  if (b_het) {
    rows.push_back(2);
    rows.push_back(3);
  } else {
    rows.push_back(2);
  }
  const int dim = static_cast<int>(rows.size());
  Eigen::MatrixXd sigma(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      sigma(i, j) = gab(rows[i], rows[j]);
    }
  }
  for (int i = 0; i < dim_a; ++i) {
    if (a_het) sigma(i, i) += 1.0;
  }
  for (int i = dim_a; i < dim; ++i) {
    if (b_het) sigma(i, i) += 1.0;
  }
  *dim_a_out = dim_a;
  return sigma;
}

double clamp_chi(double chi) {
  if (chi < 0.0) {
    if (chi < -kChiTol) {
      throw NumericalError("negative Holevo bound " + std::to_string(chi));
    }
    return 0.0;
  }
  return chi;
}

// SplitMix64: a tiny splittable generator with an explicit 64-bit seed.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on (0, 1].
  double next_open_closed() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

private:
  std::uint64_t state_;
};

// Box-Muller on top of SplitMix64; keeps the paired deviate.
class GaussianSampler {
public:
  explicit GaussianSampler(std::uint64_t seed) : rng_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = rng_.next_open_closed();
    const double u2 = rng_.next_open_closed();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

private:
  SplitMix64 rng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace

double gaussian_mi_from_covariance(const Eigen::MatrixXd& sigma, int dim_a) {
  const int dim = static_cast<int>(sigma.rows());
  if (dim_a < 1 || dim_a >= dim) {
    throw std::invalid_argument("gaussian_mi_from_covariance: bad partition");
  }
  const double det_a = sigma.topLeftCorner(dim_a, dim_a).determinant();
  const double det_b =
      sigma.bottomRightCorner(dim - dim_a, dim - dim_a).determinant();
  const double det = sigma.determinant();
  if (!(det > 0.0) || !(det_a > 0.0) || !(det_b > 0.0)) {
    throw NumericalError("gaussian_mi_from_covariance: covariance not positive definite");
  }
  return 0.5 * std::log2(det_a * det_b / det);
}

KeyRateBreakdown generic_key_rate(const ProtocolSpec& spec, const ChannelParams& params) {
  params.validate();
  const PurifiedNetwork net = build_purified_network(params);
  const int alice = PurifiedNetwork::mode(ModeRole::SourceToAlice);
  const int bob = PurifiedNetwork::mode(ModeRole::SourceToBob);

  const CovarianceMatrix gab =
      partial_trace(net.cm, std::array<int, 2>{alice, bob});
  int dim_a = 0;
  const Eigen::MatrixXd sigma = outcome_covariance(spec, gab, &dim_a);
  const double mi = gaussian_mi_from_covariance(sigma, dim_a);

  const std::array<int, 4> eve_modes = {
      PurifiedNetwork::mode(ModeRole::Cloner1In),
      PurifiedNetwork::mode(ModeRole::Cloner1Keep),
      PurifiedNetwork::mode(ModeRole::Cloner2In),
      PurifiedNetwork::mode(ModeRole::Cloner2Keep)};
  const double s_e = von_neumann_entropy(partial_trace(net.cm, eve_modes));

  const bool direct = spec.recon == Reconciliation::Direct;
  const int ref = direct ? alice : bob;
  const bool ref_heterodynes =
      direct ? spec.prep == StatePrep::Coherent : spec.meas == Measurement::Heterodyne;
  const int partner_results =
      direct ? (spec.meas == Measurement::Homodyne ? 1 : 2)
             : (spec.prep == StatePrep::Squeezed ? 1 : 2);

  CovarianceMatrix conditioned = [&] {
    if (!ref_heterodynes) {
      return condition_homodyne(net.cm, ref, Quadrature::X);
    }
    if (partner_results == 2) {
      return condition_heterodyne(net.cm, ref);
    }
    // Sifted heterodyne: only one of the two results is kept, so condition
    // on a single homodyne behind an explicit 50/50 splitter with vacuum.
    CovarianceMatrix extended = direct_sum(net.cm, vacuum_cm(1));
    extended = apply_symplectic(extended, beam_splitter(0.5, ref, 6, 7));
    return condition_homodyne(extended, ref, Quadrature::X);
  }();
  // The reference mode (index 0 or 1) is measured out, so Eve's four modes
  // land at indices 1..4 of the conditioned state.
  const double s_e_cond =
      von_neumann_entropy(partial_trace(conditioned, std::array<int, 4>{1, 2, 3, 4}));

  const double chi = clamp_chi(s_e - s_e_cond);
  return KeyRateBreakdown{mi, s_e, s_e_cond, chi, mi - chi};
}

McEstimate monte_carlo_mi(const ProtocolSpec& spec, const ChannelParams& params,
                          std::int64_t n_samples, std::uint64_t seed) {
  if (n_samples < 10000) {
    throw std::invalid_argument("monte_carlo_mi: need at least 10^4 samples");
  }
  const ReducedAB r = reduced_ab(params);
  const int dim_a = spec.prep == StatePrep::Coherent ? 2 : 1;
  const int dim_b = spec.meas == Measurement::Heterodyne ? 2 : 1;
  const int dim = dim_a + dim_b;

  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < dim_a; ++i) sigma(i, i) = dim_a == 2 ? r.a + 1.0 : r.a;
  for (int i = dim_a; i < dim; ++i) sigma(i, i) = dim_b == 2 ? r.b + 1.0 : r.b;
  sigma(0, dim_a) = sigma(dim_a, 0) = r.c;
  if (dim_a == 2 && dim_b == 2) {
    sigma(1, dim_a + 1) = sigma(dim_a + 1, 1) = -r.c;
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("monte_carlo_mi: outcome covariance not positive definite");
  }
  const Eigen::MatrixXd chol = llt.matrixL();

  GaussianSampler sampler(seed);
  constexpr int kBatches = 10;
  const std::int64_t base = n_samples / kBatches;
  const std::int64_t rem = n_samples % kBatches;

  Eigen::VectorXd total_sum = Eigen::VectorXd::Zero(dim);
  Eigen::MatrixXd total_sq = Eigen::MatrixXd::Zero(dim, dim);
  std::array<double, kBatches> batch_mi{};

  Eigen::VectorXd z(dim);
  Eigen::VectorXd x(dim);
  for (int b = 0; b < kBatches; ++b) {
    const std::int64_t m = base + (b < rem ? 1 : 0);
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(dim);
    Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(dim, dim);
    for (std::int64_t k = 0; k < m; ++k) {
      for (int i = 0; i < dim; ++i) z(i) = sampler.next();
      x.noalias() = chol * z;
      sum += x;
      sq.noalias() += x * x.transpose();
    }
    const Eigen::VectorXd mean = sum / static_cast<double>(m);
    const Eigen::MatrixXd cov =
        (sq - static_cast<double>(m) * mean * mean.transpose()) /
        static_cast<double>(m - 1);
    batch_mi[b] = gaussian_mi_from_covariance(cov, dim_a);
    total_sum += sum;
    total_sq += sq;
  }

  const double n = static_cast<double>(n_samples);
  const Eigen::VectorXd mean = total_sum / n;
  const Eigen::MatrixXd cov = (total_sq - n * mean * mean.transpose()) / (n - 1.0);

  double batch_mean = 0.0;
  for (double v : batch_mi) batch_mean += v;
  batch_mean /= kBatches;
  double var = 0.0;
  for (double v : batch_mi) var += (v - batch_mean) * (v - batch_mean);
  var /= (kBatches - 1);

  McEstimate out;
  out.estimate = gaussian_mi_from_covariance(cov, dim_a);
  out.std_error = std::sqrt(var / kBatches);
  out.n_samples = n_samples;
  out.seed = seed;
  return out;
}

ChannelParams params_on_axis(SweepAxis axis, double t, double v, double w1, double w2) {
  switch (axis) {
    case SweepAxis::EffectiveSymmetric: {
      const auto [t1, t2] = symmetric_arms(t);
      return ChannelParams{v, t1, t2, w1, w2};
    }
    case SweepAxis::EffectiveTrusted:
      return ChannelParams{v, 1.0, t, w1, w2};
    case SweepAxis::PerArm:
      return ChannelParams{v, t, t, w1, w2};
  }
  throw std::invalid_argument("params_on_axis: unknown axis");
}

double threshold_transmission(const ProtocolSpec& spec, double v, double w1, double w2,
                              SweepAxis axis, Method method) {
  if (method == Method::Both) {
    throw std::invalid_argument("threshold_transmission: pick Closed or Generic");
  }
  const auto rate = [&](double t) {
    const ChannelParams p = params_on_axis(axis, t, v, w1, w2);
    return method == Method::Generic ? generic_key_rate(spec, p).key_rate
                                     : key_rate(spec, p).key_rate;
  };

  // Monotonicity is an empirical precondition, not an assumption.
  double prev = -std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 16; ++k) {
    const double t = static_cast<double>(k) / 16.0;
    const double value = rate(t);
    if (value < prev - 1e-10) {
      throw NumericalError("threshold_transmission: key rate not monotone at T = " +
                           std::to_string(t));
    }
    prev = value;
  }

  if (rate(1.0) <= 0.0) return kNeverPositive;

  double lo = 0.0;
  double hi = 1.0;
  for (int iter = 0; iter < 60 && hi - lo > 1e-6; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (rate(mid) > 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

void SweepGrid::validate() const {
  if (!(t_start >= 0.0 && t_end <= 1.0 && t_start <= t_end)) {
    throw std::invalid_argument("SweepGrid: need 0 <= t_start <= t_end <= 1");
  }
  if (steps < 2) throw std::invalid_argument("SweepGrid: steps must be >= 2");
}

std::vector<SweepRow> sweep(const SweepGrid& grid, Method method) {
  grid.validate();
  std::vector<SweepRow> rows;
  rows.reserve(static_cast<std::size_t>(grid.steps) * (method == Method::Both ? 2 : 1));
  for (int i = 0; i < grid.steps; ++i) {
    const double t = grid.t_start +
                     (grid.t_end - grid.t_start) * static_cast<double>(i) /
                         static_cast<double>(grid.steps - 1);
    const ChannelParams p = params_on_axis(grid.axis, t, grid.V, grid.W1, grid.W2);
    const double t_eff = effective_transmission(p.T1, p.T2);
    const auto push = [&](Method m) {
      SweepRow row;
      row.spec = grid.spec;
      row.V = p.V;
      row.T1 = p.T1;
      row.T2 = p.T2;
      row.W1 = p.W1;
      row.W2 = p.W2;
      row.t_eff = t_eff;
      row.method = m;
      row.kr = m == Method::Generic ? generic_key_rate(grid.spec, p)
                                    : key_rate(grid.spec, p);
      rows.push_back(row);
    };
    if (method == Method::Both) {
      push(Method::Closed);
      push(Method::Generic);
    } else {
      push(method);
    }
  }
  return rows;
}

}  // namespace cvqkd
