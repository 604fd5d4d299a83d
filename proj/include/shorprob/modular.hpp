#pragma once

// Exact integer number theory for the order-finding analysis: multiplicative
// orders, the 2-adic split of an order, register sizing, the quotient and
// remainder of 2^n / r, prime-power detection and continued-fraction
// extraction of a divisor of the order.
//
// Everything here is a pure function of its arguments.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "shorprob/error.hpp"

namespace shorprob {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using i128 = __int128;
using u128 = unsigned __int128;

/// Orders are found by repeated multiplication, so the modulus is kept at
/// desk scale.
inline constexpr u64 kMaxModulus = u64{1} << 25;

/// Largest total register width handled by the exact-integer routines.
inline constexpr unsigned kMaxRegisterBits = 62;

/// Problem context for one run of order finding. `b == 0` marks an
/// analysis-only instance built from an order without a concrete base.
struct OrderInstance {
  u64 N = 0;
  u64 b = 0;
  u64 r = 0;
  unsigned kappa = 0;  // r = 2^kappa * r_prime
  u64 r_prime = 0;
  unsigned n = 0;   // N^2 <= 2^n < 2 N^2
  unsigned n0 = 0;  // 2^(n0-1) < N <= 2^n0
  unsigned q_pad = 0;
  u64 x0 = 0;
  u64 m = 0;

  unsigned n_total() const noexcept { return n + q_pad; }
  u64 register_size() const noexcept { return u64{1} << n_total(); }
};

struct OrderSplit {
  unsigned kappa = 0;
  u64 r_prime = 1;

  friend bool operator==(const OrderSplit&, const OrderSplit&) = default;
};

struct RegisterSizes {
  unsigned n = 0;
  unsigned n0 = 0;

  friend bool operator==(const RegisterSizes&, const RegisterSizes&) = default;
};

/// 2^(n - kappa) = q_int * r_prime + t.
struct KLDecomposition {
  u64 q_int = 0;
  u64 t = 0;

  friend bool operator==(const KLDecomposition&, const KLDecomposition&) = default;
};

struct Convergent {
  u64 num = 0;
  u64 den = 1;

  friend bool operator==(const Convergent&, const Convergent&) = default;
};

/// Convergents of y / denominator, reduced, with strictly increasing
/// denominators. The last entry is y / denominator itself.
struct ConvergentList {
  std::vector<Convergent> entries;
  u64 y = 0;
  u64 denominator = 1;
};

inline u64 mulmod(u64 a, u64 b, u64 mod) noexcept {
  return static_cast<u64>(static_cast<u128>(a) * b % mod);
}

inline u64 powmod(u64 base, u64 exp, u64 mod) noexcept {
  u64 result = 1 % mod;
  base %= mod;
  while (exp != 0) {
    if (exp & 1U) result = mulmod(result, base, mod);
    base = mulmod(base, base, mod);
    exp >>= 1U;
  }
  return result;
}

inline u64 multiplicative_order(u64 b, u64 N) {
  if (N >= kMaxModulus) {
    throw Error(Errc::ModulusTooLarge, "modulus " + std::to_string(N) + " is not below 2^25");
  }
  if (!(1 < b && b < N)) {
    throw Error(Errc::InvalidArgument, "base must satisfy 1 < b < N");
  }
  if (std::gcd(b, N) != 1) {
    throw Error(Errc::NotCoprime,
                "gcd(" + std::to_string(b) + ", " + std::to_string(N) + ") != 1");
  }
  u64 r = 1;
  u64 power = b;
  while (power != 1) {
    power = mulmod(power, b, N);
    ++r;
  }
  return r;
}

constexpr OrderSplit decompose_order(u64 r) {
  if (r == 0) throw Error(Errc::InvalidArgument, "order must be positive");
  const auto kappa = static_cast<unsigned>(std::countr_zero(r));
  return {kappa, r >> kappa};
}

/// Smallest n with N^2 <= 2^n and smallest n0 with N <= 2^n0.
constexpr RegisterSizes register_sizes(u64 N) {
  if (N < 2) throw Error(Errc::InvalidArgument, "register_sizes needs N >= 2");
  if (N >= (u64{1} << 31)) throw Error(Errc::ModulusTooLarge, "N^2 must fit in 62 bits");
  const auto n = static_cast<unsigned>(std::bit_width(N * N - 1));
  const auto n0 = static_cast<unsigned>(std::bit_width(N - 1));
  return {n, n0};
}

constexpr KLDecomposition kl_decompose(unsigned n_total, unsigned kappa, u64 r_prime) {
  if (r_prime == 0 || (r_prime & 1U) == 0) {
    throw Error(Errc::InvalidArgument, "r' must be odd");
  }
  if (n_total > kMaxRegisterBits || kappa > n_total) {
    throw Error(Errc::InvalidArgument, "register width out of range");
  }
  const u64 pow = u64{1} << (n_total - kappa);
  if (pow <= r_prime) throw Error(Errc::InvalidArgument, "need 2^n > r");
  return {pow / r_prime, pow % r_prime};
}

/// Largest x with x^j <= N.
constexpr u64 integer_root(u64 N, unsigned j) {
  if (j == 0) throw Error(Errc::InvalidArgument, "root index must be positive");
  if (j == 1 || N < 2) return N;
  // 2^(64/j + 1) bounds the root from above.
  u64 lo = 1;
  u64 hi = std::min<u64>(N, u64{1} << std::min(63U, 64U / j + 1U));
  auto pow_leq = [N, j](u64 x) {
    u128 acc = 1;
    for (unsigned i = 0; i < j; ++i) {
      acc *= x;
      if (acc > N) return false;
    }
    return true;
  };
  while (lo < hi) {
    const u64 mid = lo + (hi - lo + 1) / 2;
    if (pow_leq(mid)) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return lo;
}

constexpr bool is_prime(u64 p) {
  if (p < 2) return false;
  if (p % 2 == 0) return p == 2;
  for (u64 d = 3; d <= p / d; d += 2) {
    if (p % d == 0) return false;
  }
  return true;
}

/// True iff N = p^j for a prime p and j >= 1.
constexpr bool is_prime_power(u64 N) {
  if (N < 2) throw Error(Errc::InvalidArgument, "is_prime_power needs N >= 2");
  for (auto j = static_cast<unsigned>(std::bit_width(N) - 1); j >= 1; --j) {
    const u64 root = integer_root(N, j);
    u128 pow = 1;
    for (unsigned i = 0; i < j; ++i) pow *= root;
    if (pow == N && is_prime(root)) return true;
  }
  return false;
}

inline ConvergentList continued_fraction_convergents(u64 y, u64 denominator) {
  if (denominator == 0 || !std::has_single_bit(denominator)) {
    throw Error(Errc::InvalidArgument, "denominator must be a power of two");
  }
  if (y >= denominator) throw Error(Errc::InvalidArgument, "need 0 <= y < denominator");

  ConvergentList out;
  out.y = y;
  out.denominator = denominator;

  // h/k recurrences seeded with h_{-1}/k_{-1} = 1/0, h_{-2}/k_{-2} = 0/1.
  u64 h_prev = 1, h_prev2 = 0;
  u64 k_prev = 0, k_prev2 = 1;
  u64 num = y, den = denominator;
  while (true) {
    const u64 a = num / den;
    const u64 h = a * h_prev + h_prev2;
    const u64 k = a * k_prev + k_prev2;
    // Only the first two convergents can share a denominator (a_1 = 1).
    if (!out.entries.empty() && out.entries.back().den == k) {
      out.entries.back() = {h, k};
    } else {
      out.entries.push_back({h, k});
    }
    h_prev2 = h_prev;
    h_prev = h;
    k_prev2 = k_prev;
    k_prev = k;
    const u64 rem = num % den;
    if (rem == 0) break;
    num = den;
    den = rem;
  }
  return out;
}

/// |y/2^n - num/den| <= 1/(2 den^2), evaluated exactly.
inline bool within_legendre_bound(u64 y, unsigned n_total, const Convergent& c) {
  const i128 diff = static_cast<i128>(y) * c.den - (static_cast<i128>(c.num) << n_total);
  const auto abs_diff = static_cast<u128>(diff < 0 ? -diff : diff);
  const u128 limit = u128{1} << n_total;
  if (abs_diff > limit) return false;
  return abs_diff * 2U * c.den <= limit;
}

/// Largest convergent denominator r~ with 1 < r~ < N that approximates
/// y / 2^n_total within 1/(2 r~^2).
inline std::optional<u64> extract_divisor(u64 y, unsigned n_total, u64 N) {
  if (n_total > kMaxRegisterBits) throw Error(Errc::InvalidArgument, "register too wide");
  const auto list = continued_fraction_convergents(y, u64{1} << n_total);
  std::optional<u64> best;
  for (const auto& c : list.entries) {
    if (c.den > 1 && c.den < N && within_legendre_bound(y, n_total, c)) {
      if (!best || c.den > *best) best = c.den;
    }
  }
  return best;
}

}  // namespace shorprob
