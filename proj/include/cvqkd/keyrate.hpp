#pragma once

// Closed-form mutual informations, Holevo bounds, and secret key rates for
// the eight protocols (squeezed/coherent preparation x homodyne/heterodyne
// detection x direct/reverse reconciliation). Reverse reconciliation is
// realized through the mirror construction: relabel the parties, swap the
// arms, and evaluate the direct closed forms of the mirrored protocol.

#include <array>
#include <string>

#include "cvqkd/channel.hpp"

namespace cvqkd {

enum class StatePrep { Squeezed, Coherent };
enum class Measurement { Homodyne, Heterodyne };
enum class Reconciliation { Direct, Reverse };

struct ProtocolSpec {
  StatePrep prep = StatePrep::Coherent;
  Measurement meas = Measurement::Homodyne;
  Reconciliation recon = Reconciliation::Direct;

  friend bool operator==(const ProtocolSpec&, const ProtocolSpec&) = default;
};

std::array<ProtocolSpec, 8> all_protocols();

/// "squeezed-hom", "squeezed-het", "coherent-hom", "coherent-het".
std::string protocol_label(const ProtocolSpec& spec);

/// "dr" or "rr".
std::string recon_label(const ProtocolSpec& spec);

struct KeyRateBreakdown {
  double i_ab = 0.0;      // bits per channel use
  double s_e = 0.0;       // Eve's entropy, bits
  double s_e_cond = 0.0;  // Eve's entropy conditioned on the reference party
  double holevo = 0.0;    // s_e - s_e_cond, clamped at 0 within 1e-9
  double key_rate = 0.0;  // i_ab - holevo (may be negative)
};

struct HolevoIntermediates {
  double delta = 0.0;    // a^2 + b^2 - 2 c^2
  double d = 0.0;        // a b - c^2
  double lambda1 = 1.0;  // global symplectic eigenvalues
  double lambda2 = 1.0;
  double lambda3 = 1.0;  // conditional symplectic eigenvalues
  double lambda4 = 1.0;  // only used for coherent prep + homodyne detection
  double cap_a = 0.0;    // coherent/homodyne auxiliaries
  double cap_b = 0.0;
};

struct HolevoDirect {
  double chi = 0.0;  // S(E) - S(E|A), bits
  double s_e = 0.0;
  double s_e_cond = 0.0;
  HolevoIntermediates im;
};

/// Alice-Bob mutual information, bits per channel use. The reconciliation
/// field is ignored; mutual information is symmetric.
double mutual_information(const ProtocolSpec& spec, const ReducedAB& r);

/// Eve's Holevo information against Alice for a direct-reconciliation
/// protocol. Throws std::invalid_argument when spec.recon is Reverse.
HolevoDirect holevo_direct(const ProtocolSpec& spec, const ReducedAB& r);

/// The protocol whose direct-reconciliation rate on the arm-swapped channel
/// equals this protocol's rate with the opposite reconciliation direction:
/// the new preparation corresponds to the old measurement (het -> coherent,
/// hom -> squeezed) and vice versa. An involution on the eight protocols.
ProtocolSpec mirror_protocol(const ProtocolSpec& spec);

/// Full closed-form key-rate breakdown. Reverse reconciliation evaluates the
/// mirrored protocol with T1<->T2 and W1<->W2 swapped.
KeyRateBreakdown key_rate(const ProtocolSpec& spec, const ChannelParams& params);

}  // namespace cvqkd
