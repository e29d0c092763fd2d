#pragma once

// Independent ground-truth paths: key rates from the full 6-mode
// purification, seeded Monte Carlo checks of the measurement-statistics
// model, threshold bisection, and parameter sweeps.

#include <cstdint>
#include <limits>
#include <vector>

#include "cvqkd/keyrate.hpp"

namespace cvqkd {

/// Mutual information (bits) of a jointly Gaussian outcome vector whose
/// first dim_a components belong to one party: 1/2 log2(det A det B / det S).
double gaussian_mi_from_covariance(const Eigen::MatrixXd& sigma, int dim_a);

/// Key rate computed from the purified network with no reference to the
/// closed forms: log-det mutual information from the Alice-Bob marginal,
/// S(E) from Eve's 4-mode marginal, and S(E|ref) by Gaussian measurement
/// conditioning at the reference party's mode (Alice for direct, Bob for
/// reverse). A heterodyning reference party facing a single-result partner
/// is sifted: modeled as a 50/50 splitter with vacuum plus one homodyne.
KeyRateBreakdown generic_key_rate(const ProtocolSpec& spec, const ChannelParams& params);

struct McEstimate {
  double estimate = 0.0;   // bits per channel use
  double std_error = 0.0;  // batch-means standard error, 10 batches
  std::int64_t n_samples = 0;
  std::uint64_t seed = 0;
};

/// Draws jointly Gaussian measurement outcomes with the covariance implied
/// by (a, b, c) — homodyne variance a (or b), heterodyne variance a+1 (or
/// b+1) with quadrature cross-covariances +c and -c — and plugs the sample
/// covariance into the Gaussian mutual-information formula. Deterministic
/// for a fixed seed within one build.
McEstimate monte_carlo_mi(const ProtocolSpec& spec, const ChannelParams& params,
                          std::int64_t n_samples, std::uint64_t seed);

enum class SweepAxis {
  EffectiveSymmetric,  // T1 = T2 = sqrt(t), entanglement in the middle
  EffectiveTrusted,    // T1 = 1, T2 = t, source at Alice's station
  PerArm,              // T1 = T2 = t
};

enum class Method { Closed, Generic, Both };

ChannelParams params_on_axis(SweepAxis axis, double t, double v, double w1, double w2);

/// Sentinel returned when the key rate never turns positive on (0, 1].
inline constexpr double kNeverPositive = std::numeric_limits<double>::infinity();

/// Smallest transmission with K > 0 along the chosen axis, by bisection to
/// absolute tolerance 1e-6 (at most 60 iterations). The key-rate profile is
/// required to be non-decreasing in t, verified on 16 sample points; a
/// non-monotone profile raises NumericalError.
double threshold_transmission(const ProtocolSpec& spec, double v, double w1, double w2,
                              SweepAxis axis, Method method = Method::Closed);

struct SweepGrid {
  ProtocolSpec spec;
  double V = 1.0;
  double W1 = 1.0;
  double W2 = 1.0;
  SweepAxis axis = SweepAxis::EffectiveSymmetric;
  double t_start = 0.0;
  double t_end = 1.0;
  int steps = 2;

  void validate() const;
};

struct SweepRow {
  ProtocolSpec spec;
  double V = 1.0;
  double T1 = 1.0;
  double T2 = 1.0;
  double W1 = 1.0;
  double W2 = 1.0;
  double t_eff = 1.0;
  Method method = Method::Closed;  // Closed or Generic, never Both
  KeyRateBreakdown kr;
};

/// One row per transmission step and requested method (Both yields a closed
/// row followed by a generic row per step), ascending in t, deterministic.
std::vector<SweepRow> sweep(const SweepGrid& grid, Method method);

}  // namespace cvqkd
