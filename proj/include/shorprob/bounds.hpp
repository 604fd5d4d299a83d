#pragma once

// Rigorous lower bounds on the success probabilities P, P~ and P~_q, and
// their large-N, large-r' limits. Bounds are reported even when negative;
// whether a bound actually applies to an instance is carried in the
// preconditions list rather than enforced.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "shorprob/error.hpp"
#include "shorprob/kahan.hpp"
#include "shorprob/modular.hpp"
#include "shorprob/quadrature.hpp"
#include "shorprob/shor_state.hpp"

namespace shorprob {

enum class BoundKind {
  SeriesOdd,        // kappa = 0 series bound on P
  SeriesEven,       // kappa > 0 series bound on P
  IntegralP,        // integral bound on P
  IntegralPTilde,   // integral bound on P~
  IntegralPTildeQ,  // integral bound on P~_q, q > 0
  Asymptotic,
};

constexpr std::string_view to_string(BoundKind kind) noexcept {
  switch (kind) {
    case BoundKind::SeriesOdd: return "SeriesOdd";
    case BoundKind::SeriesEven: return "SeriesEven";
    case BoundKind::IntegralP: return "IntegralP";
    case BoundKind::IntegralPTilde: return "IntegralPTilde";
    case BoundKind::IntegralPTildeQ: return "IntegralPTildeQ";
    case BoundKind::Asymptotic: return "Asymptotic";
  }
  return "Unknown";
}

struct Precondition {
  std::string name;
  bool met = false;
};

struct BoundParameters {
  u64 N = 0;
  unsigned kappa = 0;
  u64 r_prime = 0;
  unsigned q_pad = 0;
  unsigned n = 0;
  unsigned n0 = 0;
};

struct BoundReport {
  BoundKind kind = BoundKind::Asymptotic;
  double value = 0.0;
  std::vector<Precondition> preconditions;
  BoundParameters params;

  bool preconditions_hold() const noexcept {
    for (const auto& p : preconditions) {
      if (!p.met) return false;
    }
    return true;
  }
};

enum class AsymptoticRegime { Nearest, Window };

namespace detail {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kPiSq = std::numbers::pi * std::numbers::pi;

inline void require_padding(unsigned q_pad) {
  if (q_pad > kMaxPadding) throw Error(Errc::InvalidArgument, "q_pad above 8");
}

inline bool is_odd(u64 x) noexcept { return (x & 1U) != 0; }

}  // namespace detail

/// (2/pi^2)(-2 + pi Si(pi)) for S, 2 Si(2^(q+2) pi)/pi for S~_q.
inline double asymptotic_bound(AsymptoticRegime regime, unsigned q_pad = 0) {
  using namespace detail;
  if (regime == AsymptoticRegime::Nearest) {
    return 2.0 / kPiSq * (-2.0 + kPi * sine_integral(kPi));
  }
  require_padding(q_pad);
  return 2.0 * sine_integral(std::ldexp(kPi, static_cast<int>(q_pad) + 2)) / kPi;
}

inline BoundReport asymptotic_report(AsymptoticRegime regime, unsigned q_pad = 0) {
  BoundReport report;
  report.kind = BoundKind::Asymptotic;
  report.value = asymptotic_bound(regime, q_pad);
  report.params.q_pad = regime == AsymptoticRegime::Window ? q_pad : 0;
  report.preconditions.push_back({"N and r' large", true});
  if (regime == AsymptoticRegime::Window) report.preconditions.push_back({"N not a prime power", true});
  return report;
}

/// Maclaurin-series bound on P. Only the register excess n - n0 enters.
inline BoundReport series_lower_bound(unsigned n, unsigned n0, unsigned kappa, u64 r_prime) {
  using namespace detail;
  if (r_prime == 0) throw Error(Errc::InvalidArgument, "r' must be positive");
  const int excess = static_cast<int>(n) - static_cast<int>(n0);
  const double rp = static_cast<double>(r_prime);
  const double tail = std::ldexp(1.0, -excess);  // 1/2^(n-n0)

  BoundReport report;
  report.params = {0, kappa, r_prime, 0, n, n0};
  if (kappa == 0) {
    report.kind = BoundKind::SeriesOdd;
    report.value = (1.0 - tail - 1.0 / rp) *
                   (1.0 - kPiSq / 36.0 *
                              ((rp + 1.0) / rp + std::ldexp(1.0, -(excess - 1)) + std::ldexp(1.0, -2 * excess)));
  } else {
    report.kind = BoundKind::SeriesEven;
    const double r = std::ldexp(rp, static_cast<int>(kappa));
    report.value = (1.0 - tail - 1.0 / rp) *
                       (1.0 - kPiSq / 36.0 *
                                  ((rp + 1.0) / rp + std::ldexp(1.0, -(excess - 2)) +
                                   std::ldexp(1.0, -(2 * excess - 1)))) +
                   1.0 / rp - 1.0 / r - tail;
  }
  report.preconditions = {
      {"n > n0", excess > 0},
      {"r' odd", is_odd(r_prime)},
      {"r' >= 3", r_prime >= 3},
  };
  return report;
}

/// F(N, kappa, r'): the integral bound on P, valid when N^2 <= 2^n.
inline BoundReport integral_lower_bound_P(u64 N, unsigned kappa, u64 r_prime) {
  using namespace detail;
  if (N < 2 || r_prime == 0) throw Error(Errc::InvalidArgument, "need N >= 2 and r' >= 1");
  const double Nd = static_cast<double>(N);
  const double rp = static_cast<double>(r_prime);
  const double prefactor = (1.0 - kPiSq / (4.0 * Nd * Nd)) / (1.0 + 1.0 / Nd);
  const double integral = shifted_sinc_sq_integral(0.0, 1.0 / rp, 0.5 + 0.5 / rp);

  BoundReport report;
  report.kind = BoundKind::IntegralP;
  report.params = {N, kappa, r_prime, 0, 0, 0};
  report.value = prefactor * (2.0 / kPiSq * integral) - 3.0 / Nd + 1.0 / rp -
                 1.0 / std::ldexp(rp, static_cast<int>(kappa));
  const bool order_fits = kappa < 64 && static_cast<u128>(r_prime) << kappa < N;
  report.preconditions = {
      {"r' odd", is_odd(r_prime)},
      {"r' >= 3", r_prime >= 3},
      {"r < N", order_fits},
  };
  return report;
}

/// The integral bound on P~_q (P~ when q_pad = 0), valid when N^2 <= 2^n
/// and N is not a prime power.
inline BoundReport integral_lower_bound_window(u64 N, unsigned kappa, u64 r_prime, unsigned q_pad) {
  using namespace detail;
  require_padding(q_pad);
  if (N < 2 || r_prime == 0) throw Error(Errc::InvalidArgument, "need N >= 2 and r' >= 1");
  const double Nd = static_cast<double>(N);
  const double rp = static_cast<double>(r_prime);
  const double scale = std::ldexp(1.0, static_cast<int>(q_pad) + 1);  // 2^(q+1)
  const double shrink = kPi / (2.0 * scale * Nd);                     // pi / (2^(q+2) N)
  const double prefactor =
      (1.0 - (kPi / Nd) * (kPi / Nd)) * (1.0 - shrink * shrink) / (1.0 + 1.0 / (scale * Nd));

  const double upper = 0.5 - 0.5 / rp;
  const auto half_width = static_cast<i64>(scale);
  KahanSum<double> integrals;
  for (i64 h = -half_width; h < half_width; ++h) {
    integrals += 2.0 / kPiSq * shifted_sinc_sq_integral(static_cast<double>(h), 0.0, upper);
  }

  BoundReport report;
  report.kind = q_pad == 0 ? BoundKind::IntegralPTilde : BoundKind::IntegralPTildeQ;
  report.params = {N, kappa, r_prime, q_pad, 0, 0};
  report.value = prefactor * integrals.value() - 1.0 / rp - 7.0 / (Nd * scale) -
                 16.0 / (kPi * Nd * (1.0 - 1.0 / (Nd * scale))) -
                 1.0 / std::ldexp(rp, static_cast<int>(kappa));
  const bool order_fits = kappa < 63 && static_cast<u128>(r_prime) << (kappa + 1) < N;
  report.preconditions = {
      {"r' odd", is_odd(r_prime)},
      {"r' >= 3", r_prime >= 3},
      {"2r < N", order_fits},
      {"N not a prime power", !is_prime_power(N)},
  };
  return report;
}

enum class SearchVariable { RPrime, N };

struct ThresholdQuery {
  BoundKind bound = BoundKind::IntegralP;
  u64 N = 0;                 // fixed when searching r'
  unsigned kappa = 0;
  u64 r_prime = 0;           // fixed when searching N
  unsigned q_pad = 0;        // window bounds
  unsigned register_excess = 11;  // n - n0, series bounds
  double target = 0.0;
  SearchVariable variable = SearchVariable::RPrime;
};

/// Value of the bound named by `query` at (N, r').
inline double bound_value(const ThresholdQuery& query, u64 N, u64 r_prime) {
  switch (query.bound) {
    case BoundKind::SeriesOdd:
    case BoundKind::SeriesEven:
      return series_lower_bound(query.register_excess, 0, query.kappa, r_prime).value;
    case BoundKind::IntegralP:
      return integral_lower_bound_P(N, query.kappa, r_prime).value;
    case BoundKind::IntegralPTilde:
    case BoundKind::IntegralPTildeQ:
      return integral_lower_bound_window(N, query.kappa, r_prime, query.q_pad).value;
    case BoundKind::Asymptotic:
      break;
  }
  throw Error(Errc::InvalidArgument, "threshold search needs a finite-size bound");
}

/// Least odd r' (or least power-of-two N) at which the bound reaches
/// `target`. Relies on monotonicity in the search variable, which is
/// checked on a sampled grid first.
inline u64 threshold_search(const ThresholdQuery& query) {
  const bool window = query.bound == BoundKind::IntegralPTilde || query.bound == BoundKind::IntegralPTildeQ;
  const bool series = query.bound == BoundKind::SeriesOdd || query.bound == BoundKind::SeriesEven;
  if (query.kappa > 40) throw Error(Errc::InvalidArgument, "kappa out of range");

  if (query.variable == SearchVariable::N) {
    if (series) throw Error(Errc::InvalidArgument, "series bounds do not depend on N");
    if (query.r_prime == 0) throw Error(Errc::InvalidArgument, "fixed r' required");
    // Smallest power of two strictly above r (above 2r for windows).
    const u64 order = query.r_prime << query.kappa;
    const unsigned first = static_cast<unsigned>(std::bit_width(window ? 2 * order : order));
    double previous = -INFINITY;
    for (unsigned e = first; e <= 40; ++e) {
      const double value = bound_value(query, u64{1} << e, query.r_prime);
      if (value < previous) throw Error(Errc::InvalidArgument, "bound is not monotone in N");
      if (value >= query.target) return u64{1} << e;
      previous = value;
    }
    throw Error(Errc::Unreachable, "target not met for any N up to 2^40");
  }

  // Odd r' in [3, cap] where r = 2^kappa r' still fits below N (N/2 for windows).
  u64 cap = u64{1} << 21;
  if (!series) {
    if (query.N < 8) throw Error(Errc::InvalidArgument, "N too small for a search");
    const u64 limit = window ? query.N / 2 : query.N;
    cap = (limit - 1) >> query.kappa;
  }
  if (cap % 2 == 0) --cap;
  if (cap < 3) throw Error(Errc::Unreachable, "no odd r' >= 3 fits below N");

  auto value_at = [&](u64 rp) { return bound_value(query, query.N, rp); };
  auto index_to_rp = [](u64 i) { return 2 * i + 3; };
  const u64 count = (cap - 3) / 2 + 1;

  // Geometric grid of sample indices, dense near the start.
  double previous = -INFINITY;
  for (u64 i = 0; i < count; i = i < 4 ? i + 1 : i * 2) {
    const double value = value_at(index_to_rp(i));
    if (value < previous) throw Error(Errc::InvalidArgument, "bound is not monotone in r'");
    previous = value;
  }
  if (value_at(cap) < query.target) {
    throw Error(Errc::Unreachable, "target not met for any odd r' <= " + std::to_string(cap));
  }
  u64 lo = 0, hi = count - 1;
  while (lo < hi) {
    const u64 mid = lo + (hi - lo) / 2;
    if (value_at(index_to_rp(mid)) >= query.target) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return index_to_rp(lo);
}

}  // namespace shorprob
