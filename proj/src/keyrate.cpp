#include "cvqkd/keyrate.hpp"

#include <cmath>
#include <string>

namespace cvqkd {

namespace {

constexpr double kChiTol = 1e-9;
constexpr double kLambdaTol = 1e-9;

// sqrt of a squared symplectic eigenvalue, clamped at the vacuum floor.
double lambda_from_sq(double sq, const char* which) {
  if (sq < 1.0) {
    if (sq < 1.0 - kLambdaTol) {
      throw NumericalError(std::string(which) + " squared symplectic eigenvalue " +
                           std::to_string(sq) + " below 1");
    }
    return 1.0;
  }
  return std::sqrt(sq);
}

// Discriminants vanish at pure-state limits; clamp float noise, reject more.
double clamped_disc(double disc, double scale) {
  if (disc < 0.0) {
    if (disc < -1e-9 * std::max(1.0, scale)) {
      throw NumericalError("negative symplectic discriminant " + std::to_string(disc));
    }
    return 0.0;
  }
  return disc;
}

double checked_log_ratio(double num, double den) {
  if (!(den > 0.0) || !(num > 0.0)) {
    throw NumericalError("mutual information: non-positive conditional variance");
  }
  return std::log2(num / den);
}

}  // namespace

std::array<ProtocolSpec, 8> all_protocols() {
  std::array<ProtocolSpec, 8> out;
  int i = 0;
  for (StatePrep prep : {StatePrep::Squeezed, StatePrep::Coherent}) {
    for (Measurement meas : {Measurement::Homodyne, Measurement::Heterodyne}) {
      for (Reconciliation recon : {Reconciliation::Direct, Reconciliation::Reverse}) {
        out[i++] = ProtocolSpec{prep, meas, recon};
      }
    }
  }
  return out;
}

std::string protocol_label(const ProtocolSpec& spec) {
  std::string out = spec.prep == StatePrep::Squeezed ? "squeezed-" : "coherent-";
  out += spec.meas == Measurement::Homodyne ? "hom" : "het";
  return out;
}

std::string recon_label(const ProtocolSpec& spec) {
  return spec.recon == Reconciliation::Direct ? "dr" : "rr";
}

double mutual_information(const ProtocolSpec& spec, const ReducedAB& r) {
  const double a = r.a;
  const double b = r.b;
  const double c2 = r.c * r.c;
  if (spec.prep == StatePrep::Squeezed) {
    if (spec.meas == Measurement::Homodyne) {
      return 0.5 * checked_log_ratio(a, a - c2 / b);
    }
    return 0.5 * checked_log_ratio(a, a - c2 / (b + 1.0));
  }
  if (spec.meas == Measurement::Homodyne) {
    return 0.5 * checked_log_ratio(a + 1.0, a + 1.0 - c2 / b);
  }
  return checked_log_ratio(b + 1.0, b + 1.0 - c2 / (a + 1.0));
}

HolevoDirect holevo_direct(const ProtocolSpec& spec, const ReducedAB& r) {
  if (spec.recon != Reconciliation::Direct) {
    throw std::invalid_argument("holevo_direct: spec must use direct reconciliation");
  }
  const double a = r.a;
  const double b = r.b;
  const double c2 = r.c * r.c;

  HolevoDirect out;
  HolevoIntermediates& im = out.im;
  im.delta = a * a + b * b - 2.0 * c2;
  im.d = a * b - c2;

  // lambda2^2 = D^2 / lambda1^2 avoids the cancellation in (Delta - sqrt)/2.
  const double disc = clamped_disc(im.delta * im.delta - 4.0 * im.d * im.d,
                                   im.delta * im.delta);
  const double l1sq = 0.5 * (im.delta + std::sqrt(disc));
  im.lambda1 = lambda_from_sq(l1sq, "global");
  im.lambda2 = lambda_from_sq(im.d * im.d / l1sq, "global");
  out.s_e = g_function(0.5 * (im.lambda1 - 1.0)) + g_function(0.5 * (im.lambda2 - 1.0));

  if (spec.prep == StatePrep::Squeezed) {
    // Conditioned on Alice's homodyne; identical for Bob hom/het.
    im.lambda3 = lambda_from_sq(b * (b - c2 / a), "conditional");
    out.s_e_cond = g_function(0.5 * (im.lambda3 - 1.0));
  } else if (spec.meas == Measurement::Homodyne) {
    // Alice heterodynes but the sifting phase keeps one result; the
    // conditional system is Bob plus Alice's idle splitter port.
    im.cap_a = (a + b * im.d + im.delta) / (a + 1.0);
    im.cap_b = im.d * (b + im.d) / (a + 1.0);
    const double disc34 = clamped_disc(im.cap_a * im.cap_a - 4.0 * im.cap_b,
                                       im.cap_a * im.cap_a);
    const double l3sq = 0.5 * (im.cap_a + std::sqrt(disc34));
    im.lambda3 = lambda_from_sq(l3sq, "conditional");
    im.lambda4 = lambda_from_sq(im.cap_b / l3sq, "conditional");
    out.s_e_cond =
        g_function(0.5 * (im.lambda3 - 1.0)) + g_function(0.5 * (im.lambda4 - 1.0));
  } else {
    // Alice keeps both heterodyne results.
    double l3 = b - c2 / (a + 1.0);
    if (l3 < 1.0) {
      if (l3 < 1.0 - kLambdaTol) {
        throw NumericalError("conditional symplectic eigenvalue " +
                             std::to_string(l3) + " below 1");
      }
      l3 = 1.0;
    }
    im.lambda3 = l3;
    out.s_e_cond = g_function(0.5 * (im.lambda3 - 1.0));
  }

  out.chi = out.s_e - out.s_e_cond;
  return out;
}

ProtocolSpec mirror_protocol(const ProtocolSpec& spec) {
  ProtocolSpec out;
  out.prep =
      spec.meas == Measurement::Heterodyne ? StatePrep::Coherent : StatePrep::Squeezed;
  out.meas =
      spec.prep == StatePrep::Coherent ? Measurement::Heterodyne : Measurement::Homodyne;
  out.recon = spec.recon == Reconciliation::Direct ? Reconciliation::Reverse
                                                   : Reconciliation::Direct;
  return out;
}

KeyRateBreakdown key_rate(const ProtocolSpec& spec, const ChannelParams& params) {
  params.validate();
  if (spec.recon == Reconciliation::Reverse) {
    const ChannelParams swapped{params.V, params.T2, params.T1, params.W2, params.W1};
    return key_rate(mirror_protocol(spec), swapped);
  }
  const ReducedAB r = reduced_ab(params);
  const double mi = mutual_information(spec, r);
  const HolevoDirect h = holevo_direct(spec, r);
  double chi = h.chi;
  if (chi < 0.0) {
    if (chi < -kChiTol) {
      throw NumericalError("negative Holevo bound " + std::to_string(chi));
    }
    chi = 0.0;
  }
  return KeyRateBreakdown{mi, h.s_e, h.s_e_cond, chi, mi - chi};
}

}  // namespace cvqkd
