#include "cvqkd/channel.hpp"

#include <cmath>
#include <string>

namespace cvqkd {

void ChannelParams::validate() const {
  if (!(V >= 1.0)) throw std::invalid_argument("ChannelParams: V must be >= 1");
  if (!(T1 >= 0.0 && T1 <= 1.0)) {
    throw std::invalid_argument("ChannelParams: T1 must lie in [0, 1]");
  }
  if (!(T2 >= 0.0 && T2 <= 1.0)) {
    throw std::invalid_argument("ChannelParams: T2 must lie in [0, 1]");
  }
  if (!(W1 >= 1.0)) throw std::invalid_argument("ChannelParams: W1 must be >= 1");
  if (!(W2 >= 1.0)) throw std::invalid_argument("ChannelParams: W2 must be >= 1");
}

CovarianceMatrix ReducedAB::to_cm() const {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(4, 4);
  g(0, 0) = g(1, 1) = a;
  g(2, 2) = g(3, 3) = b;
  g(0, 2) = g(2, 0) = c;
  g(1, 3) = g(3, 1) = -c;
  return CovarianceMatrix(std::move(g));
}

ReducedAB reduced_ab(const ChannelParams& params) {
  params.validate();
  ReducedAB r;
  r.a = params.T1 * params.V + (1.0 - params.T1) * params.W1;
  r.b = params.T2 * params.V + (1.0 - params.T2) * params.W2;
  r.c = std::sqrt(params.T1 * params.T2) * std::sqrt(params.V * params.V - 1.0);
  return r;
}

double effective_transmission(double t1, double t2) {
  if (!(t1 >= 0.0 && t1 <= 1.0 && t2 >= 0.0 && t2 <= 1.0)) {
    throw std::invalid_argument("effective_transmission: arguments must lie in [0, 1]");
  }
  return t1 * t2;
}

std::pair<double, double> symmetric_arms(double t_eff) {
  if (!(t_eff >= 0.0 && t_eff <= 1.0)) {
    throw std::invalid_argument("symmetric_arms: t_eff must lie in [0, 1]");
  }
  const double t = std::sqrt(t_eff);
  return {t, t};
}

int PurifiedNetwork::mode(ModeRole role) {
  switch (role) {
    case ModeRole::SourceToAlice: return 0;
    case ModeRole::SourceToBob: return 1;
    case ModeRole::Cloner1In: return 2;
    case ModeRole::Cloner1Keep: return 3;
    case ModeRole::Cloner2In: return 4;
    case ModeRole::Cloner2Keep: return 5;
    case ModeRole::PrepVacuum: break;
  }
  throw std::invalid_argument("PurifiedNetwork: role is not part of the 6-mode network");
}

PurifiedNetwork build_purified_network(const ChannelParams& params) {
  params.validate();
  // Each cloner is the two-mode squeezed purification of variance-W thermal
  // noise; W = 1 degenerates to vacuum ancillas (pure-loss channel).
  CovarianceMatrix g =
      direct_sum(direct_sum(epr_cm(params.V), epr_cm(params.W1)), epr_cm(params.W2));
  g = apply_symplectic(
      g, beam_splitter(params.T1, PurifiedNetwork::mode(ModeRole::SourceToAlice),
                       PurifiedNetwork::mode(ModeRole::Cloner1In), 6));
  g = apply_symplectic(
      g, beam_splitter(params.T2, PurifiedNetwork::mode(ModeRole::SourceToBob),
                       PurifiedNetwork::mode(ModeRole::Cloner2In), 6));
  return PurifiedNetwork{std::move(g)};
}

}  // namespace cvqkd
