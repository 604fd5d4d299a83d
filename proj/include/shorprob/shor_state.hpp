#pragma once

// Closed-form measurement statistics of the input register after the
// Fourier transform of the periodic post-measurement state
//
//     (1/sqrt(m)) * sum_{k<m} |k r + x0>.
//
// Every sine argument below has the form pi * a / 2^bits with `a` an exact
// integer. Arguments are reduced modulo 2^bits in integer arithmetic before
// any floating-point work, which keeps peaks at full double precision even
// for 60-bit registers.

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "shorprob/error.hpp"
#include "shorprob/kahan.hpp"
#include "shorprob/modular.hpp"

namespace shorprob {

/// Extra input qubits beyond Shor's n.
inline constexpr unsigned kMaxPadding = 8;

enum class TargetKind {
  Nearest,  // S: nint(s 2^n / r)
  Window2,  // S~: |y - s 2^n / r| <= 2
  WindowQ,  // S~_q: |y - s 2^(n+q) / r| <= 2^(q+1)
};

enum class GerjuoyPolicy {
  RequireNonPrimePower,
  AllowVerifiedOrder,  // prime-power N accepted when 2r < N holds directly
};

struct IndexedTerm {
  i64 index = 0;
  double value = 0.0;
};

struct ProbabilityReport {
  TargetKind kind = TargetKind::Nearest;
  unsigned q_pad = 0;
  double P = 0.0;
  std::optional<double> P1_pair;  // mass on y_s +- 1
  std::optional<double> Pt;       // one +-2 neighbour per s, on the side of s 2^n / r
  std::optional<double> edge;     // the second +-2 neighbour where s 2^n / r is an integer
  std::optional<double> P_tilde;
  double multiples_term = 0.0;           // (2^kappa - 1) m / 2^n
  std::vector<IndexedTerm> window_terms;  // per h: 2^(kappa+1)/(2^n m) sum_j ratio(j/r' + h)
  std::vector<IndexedTerm> fringe_terms;  // per j: 2 (2^kappa - 1)/(2^n m) ratio(j)
};

/// y_s = nint(s 2^n / r) and r * delta_s, which is always an integer.
struct NearestTarget {
  u64 y = 0;
  i64 scaled_offset = 0;
};

namespace detail {

/// sin^2(pi k / 2^bits).
inline double sin2_dyadic(i128 k, unsigned bits) {
  const u128 period = u128{1} << bits;
  u128 red = static_cast<u128>(k) & (period - 1);
  if (red > period / 2) red = period - red;
  const double angle = std::numbers::pi * std::ldexp(static_cast<double>(red), -static_cast<int>(bits));
  const double s = std::sin(angle);
  return s * s;
}

/// sin^2(pi m a / 2^bits) / sin^2(pi a / 2^bits), or its limit m^2 when
/// a is a multiple of 2^bits.
inline double dirichlet_ratio(i128 a, u64 m, unsigned bits) {
  const u128 mask = (u128{1} << bits) - 1;
  if ((static_cast<u128>(a) & mask) == 0) {
    const auto md = static_cast<double>(m);
    return md * md;
  }
  return sin2_dyadic(a * static_cast<i128>(m), bits) / sin2_dyadic(a, bits);
}

inline void require_register(unsigned n_total) {
  if (n_total > kMaxRegisterBits) {
    throw Error(Errc::RegisterTooLarge, "register wider than " + std::to_string(kMaxRegisterBits) + " bits");
  }
}

}  // namespace detail

/// ceil((2^n_total - x0) / r).
inline u64 m_value(u64 r, unsigned n_total, u64 x0) {
  detail::require_register(n_total);
  if (r == 0 || x0 >= r) throw Error(Errc::InvalidArgument, "need 0 <= x0 < r");
  const u64 span = (u64{1} << n_total) - x0;
  return span / r + (span % r != 0 ? 1 : 0);
}

inline u64 m_value(const OrderInstance& inst) { return m_value(inst.r, inst.n_total(), inst.x0); }

/// Analysis instance for a given order r without a concrete base (b = 0).
inline OrderInstance instance_for_order(u64 N, u64 r, u64 x0 = 0, unsigned q_pad = 0) {
  if (N < 3 || N >= kMaxModulus) throw Error(Errc::InvalidArgument, "N out of range");
  if (!(1 < r && r < N)) throw Error(Errc::InvalidArgument, "need 1 < r < N");
  if (q_pad > kMaxPadding) throw Error(Errc::InvalidArgument, "q_pad above 8");
  OrderInstance inst;
  inst.N = N;
  inst.r = r;
  const auto split = decompose_order(r);
  inst.kappa = split.kappa;
  inst.r_prime = split.r_prime;
  const auto sizes = register_sizes(N);
  inst.n = sizes.n;
  inst.n0 = sizes.n0;
  inst.q_pad = q_pad;
  inst.x0 = x0;
  inst.m = m_value(inst);
  return inst;
}

inline OrderInstance make_instance(u64 N, u64 b, u64 x0 = 0, unsigned q_pad = 0) {
  const u64 r = multiplicative_order(b, N);
  auto inst = instance_for_order(N, r, x0, q_pad);
  inst.b = b;
  return inst;
}

inline NearestTarget nearest_target(u64 s, const OrderInstance& inst) {
  if (s == 0 || s >= inst.r) throw Error(Errc::InvalidArgument, "need 1 <= s <= r - 1");
  const u128 scaled = static_cast<u128>(s) << inst.n_total();
  const auto quotient = static_cast<u64>(scaled / inst.r);
  const auto rho = static_cast<u64>(scaled % inst.r);
  if (2 * rho == inst.r) {
    throw std::logic_error("s 2^n / r landed on a half-integer");
  }
  if (2 * rho < inst.r) return {quotient, -static_cast<i64>(rho)};
  return {quotient + 1, static_cast<i64>(inst.r - rho)};
}

/// delta_s = y_s - s 2^n / r, from the exact remainder.
inline double delta(u64 s, const OrderInstance& inst) {
  return static_cast<double>(nearest_target(s, inst).scaled_offset) / static_cast<double>(inst.r);
}

/// Probability of observing y_s + h.
inline double p_outcome(u64 s, i64 h, const OrderInstance& inst) {
  const auto target = nearest_target(s, inst);
  const i128 a = static_cast<i128>(inst.r) * h + target.scaled_offset;
  const unsigned bits = inst.n_total();
  return detail::dirichlet_ratio(a, inst.m, bits) /
         (std::ldexp(1.0, static_cast<int>(bits)) * static_cast<double>(inst.m));
}

namespace detail {

inline double inv_register_times_m(const OrderInstance& inst) {
  return 1.0 / (std::ldexp(1.0, static_cast<int>(inst.n_total())) * static_cast<double>(inst.m));
}

inline double multiples_term(const OrderInstance& inst) {
  const double copies = std::ldexp(1.0, static_cast<int>(inst.kappa)) - 1.0;
  return copies * static_cast<double>(inst.m) / std::ldexp(1.0, static_cast<int>(inst.n_total()));
}

/// sum_{j=1}^{floor(r'/2)} ratio(r (j/r' + h)).
inline double shifted_ratio_sum(const OrderInstance& inst, i64 h) {
  KahanSum<double> acc;
  const i128 base = static_cast<i128>(inst.r) * h;
  const i128 step = i128{1} << inst.kappa;
  for (u64 j = 1; j <= inst.r_prime / 2; ++j) {
    acc += dirichlet_ratio(base + step * static_cast<i128>(j), inst.m, inst.n_total());
  }
  return acc.value();
}

inline void require_distinct_targets(const OrderInstance& inst) {
  if (inst.n_total() <= inst.n0) {
    throw Error(Errc::RegisterTooSmall, "input register must be wider than the output register");
  }
}

inline void require_gerjuoy(const OrderInstance& inst, GerjuoyPolicy policy) {
  if (2 * inst.r >= inst.N) {
    throw Error(Errc::GerjuoyInapplicable, "window sets need r < N/2");
  }
  if (policy == GerjuoyPolicy::RequireNonPrimePower && is_prime_power(inst.N)) {
    throw Error(Errc::GerjuoyInapplicable,
                "N = " + std::to_string(inst.N) + " is a prime power; pass the verified-order override");
  }
}

}  // namespace detail

/// P from the closed form: 2^kappa (2/(2^n m)) sum_j sin^2(pi m j/2^(n-kappa)) /
/// sin^2(pi j/2^(n-kappa)) + (2^kappa - 1) m / 2^n.
inline ProbabilityReport exact_P(const OrderInstance& inst) {
  detail::require_distinct_targets(inst);
  const unsigned bits = inst.n_total() - inst.kappa;
  KahanSum<double> sum;
  for (u64 j = 1; j <= inst.r_prime / 2; ++j) {
    sum += detail::dirichlet_ratio(static_cast<i128>(j), inst.m, bits);
  }
  ProbabilityReport report;
  report.kind = TargetKind::Nearest;
  report.q_pad = inst.q_pad;
  report.multiples_term = detail::multiples_term(inst);
  const double nearest = std::ldexp(2.0, static_cast<int>(inst.kappa)) *
                         detail::inv_register_times_m(inst) * sum.value();
  report.window_terms.push_back({0, nearest});
  KahanSum<double> total;
  total += nearest;
  total += report.multiples_term;
  report.P = total.value();
  return report;
}

/// P as the plain sum of p(y_s) over s = 1 .. r-1.
inline double exact_P_direct(const OrderInstance& inst) {
  detail::require_distinct_targets(inst);
  KahanSum<double> acc;
  for (u64 s = 1; s < inst.r; ++s) acc += p_outcome(s, 0, inst);
  return acc.value();
}

/// P_h = sum_s p(y_s + h), via the multiset of offsets {+-j/r'} and the
/// 2^kappa - 1 exact multiples.
inline double offset_mass(const OrderInstance& inst, i64 h) {
  const double scale = detail::inv_register_times_m(inst);
  const double copies = std::ldexp(1.0, static_cast<int>(inst.kappa));
  KahanSum<double> acc;
  acc += copies * scale * (detail::shifted_ratio_sum(inst, h) + detail::shifted_ratio_sum(inst, -h));
  acc += (copies - 1.0) * scale *
         detail::dirichlet_ratio(static_cast<i128>(inst.r) * h, inst.m, inst.n_total());
  return acc.value();
}

/// Mass on the padded window set S~_q (q = inst.q_pad).
inline ProbabilityReport exact_P_tilde_q(const OrderInstance& inst,
                                         GerjuoyPolicy policy = GerjuoyPolicy::RequireNonPrimePower) {
  detail::require_gerjuoy(inst, policy);
  auto report = exact_P(inst);
  report.kind = inst.q_pad == 0 ? TargetKind::Window2 : TargetKind::WindowQ;
  report.window_terms.clear();

  const i64 half_width = i64{2} << inst.q_pad;
  const double scale = detail::inv_register_times_m(inst);
  const double copies = std::ldexp(1.0, static_cast<int>(inst.kappa));

  KahanSum<double> total;
  for (i64 h = -half_width; h < half_width; ++h) {
    const double term = 2.0 * copies * scale * detail::shifted_ratio_sum(inst, h);
    report.window_terms.push_back({h, term});
    total += term;
  }
  total += report.multiples_term;
  for (i64 j = 1; j <= half_width; ++j) {
    const double ratio = detail::dirichlet_ratio(static_cast<i128>(inst.r) * j, inst.m, inst.n_total());
    const double term = 2.0 * (copies - 1.0) * scale * ratio;
    report.fringe_terms.push_back({j, term});
    total += term;
  }
  report.P_tilde = total.value();
  return report;
}

/// Mass on S~ with the breakdown P + 2 P_1 + Pt + edge.
inline ProbabilityReport exact_P_tilde(const OrderInstance& inst,
                                       GerjuoyPolicy policy = GerjuoyPolicy::RequireNonPrimePower) {
  if (inst.q_pad != 0) throw Error(Errc::InvalidArgument, "exact_P_tilde is the q_pad = 0 case");
  auto report = exact_P_tilde_q(inst, policy);
  const double scale = detail::inv_register_times_m(inst);
  const double copies = std::ldexp(1.0, static_cast<int>(inst.kappa));
  const double edge =
      (copies - 1.0) * scale * detail::dirichlet_ratio(static_cast<i128>(inst.r) * 2, inst.m, inst.n_total());

  report.P1_pair = 2.0 * offset_mass(inst, 1);
  // Each |delta| = j/r' occurs once with each sign per block; the nearer
  // +-2 neighbour then always sits at offset 2 - j/r'.
  KahanSum<double> pt;
  pt += 2.0 * copies * scale * detail::shifted_ratio_sum(inst, -2);
  pt += edge;
  report.Pt = pt.value();
  report.edge = edge;
  return report;
}

/// Sorted members of S, S~ or S~_q inside [0, 2^(n+q)).
inline std::vector<u64> target_set_members(const OrderInstance& inst, TargetKind kind,
                                           GerjuoyPolicy policy = GerjuoyPolicy::RequireNonPrimePower) {
  std::vector<u64> members;
  if (kind == TargetKind::Nearest) {
    detail::require_distinct_targets(inst);
    members.reserve(inst.r - 1);
    for (u64 s = 1; s < inst.r; ++s) members.push_back(nearest_target(s, inst).y);
    return members;
  }
  if (kind == TargetKind::Window2 && inst.q_pad != 0) {
    throw Error(Errc::InvalidArgument, "S~ is defined on the unpadded register");
  }
  detail::require_gerjuoy(inst, policy);

  const i128 width = i128{2} << inst.q_pad;
  const i128 r = inst.r;
  const i128 size = i128{1} << inst.n_total();
  i128 prev_hi = -1;
  for (u64 s = 1; s < inst.r; ++s) {
    const i128 centre = static_cast<i128>(s) << inst.n_total();  // r * (s 2^n / r)
    // y r in [centre - width r, centre + width r]; both bounds are nonnegative.
    const i128 lo = (centre - width * r + r - 1) / r;
    const i128 hi = (centre + width * r) / r;
    if (lo <= prev_hi) throw std::logic_error("window sets for consecutive s overlap");
    for (i128 y = std::max<i128>(lo, 0); y <= hi && y < size; ++y) members.push_back(static_cast<u64>(y));
    prev_hi = hi;
  }
  return members;
}

}  // namespace shorprob
