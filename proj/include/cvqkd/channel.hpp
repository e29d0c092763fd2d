#pragma once

// Entanglement-in-the-middle channel: an EPR source of variance V sits
// between Alice and Bob; each arm passes a beam splitter of transmission T_i
// whose unused port is fed by Eve's entangling cloner of variance W_i.

#include <utility>

#include "cvqkd/gaussian.hpp"

namespace cvqkd {

struct ChannelParams {
  double V = 1.0;   // source variance, >= 1
  double T1 = 1.0;  // Alice-arm transmission, in [0, 1]
  double T2 = 1.0;  // Bob-arm transmission, in [0, 1]
  double W1 = 1.0;  // cloner variance on Alice's arm, >= 1
  double W2 = 1.0;  // cloner variance on Bob's arm, >= 1

  void validate() const;
};

/// Scalars (a, b, c) of the reduced two-mode Alice-Bob state
/// [[a I, c Z], [c Z, b I]].
struct ReducedAB {
  double a = 1.0;
  double b = 1.0;
  double c = 0.0;

  CovarianceMatrix to_cm() const;
};

/// a = T1 V + (1-T1) W1,  b = T2 V + (1-T2) W2,  c = sqrt(T1 T2) sqrt(V^2-1).
ReducedAB reduced_ab(const ChannelParams& params);

/// T = T1 * T2.
double effective_transmission(double t1, double t2);

/// Arm split placing the source exactly in the middle: (sqrt(T), sqrt(T)).
std::pair<double, double> symmetric_arms(double t_eff);

enum class ModeRole {
  SourceToAlice,
  SourceToBob,
  Cloner1In,
  Cloner1Keep,
  Cloner2In,
  Cloner2Keep,
  PrepVacuum,  // label for measurement ancillas appended by callers
};

/// Pure 6-mode Alice-Bob-Eve state. Eve holds the cloner output modes
/// (Cloner1In / Cloner2In after the beam splitters) and the kept halves.
struct PurifiedNetwork {
  CovarianceMatrix cm;

  /// Fixed mode order: (SourceToAlice, SourceToBob, Cloner1In, Cloner1Keep,
  /// Cloner2In, Cloner2Keep). PrepVacuum is not part of the network.
  static int mode(ModeRole role);
};

PurifiedNetwork build_purified_network(const ChannelParams& params);

}  // namespace cvqkd
