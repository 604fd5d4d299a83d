#pragma once

// Brute-force reference for the closed forms: build the periodic state
// with amplitude 1/sqrt(m) at y = k r + x0, Fourier transform it, and sum
// squared magnitudes over target sets.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "shorprob/error.hpp"
#include "shorprob/fft.hpp"
#include "shorprob/kahan.hpp"
#include "shorprob/modular.hpp"
#include "shorprob/shor_state.hpp"

namespace shorprob {

inline constexpr unsigned kMaxTransformBits = 22;
inline constexpr unsigned kMaxNaiveDftBits = 12;
inline constexpr unsigned kMaxClosedFormTableBits = 24;

enum class Backend { FullTransform, NaiveDft, ClosedForm };

constexpr std::string_view to_string(Backend backend) noexcept {
  switch (backend) {
    case Backend::FullTransform: return "FullTransform";
    case Backend::NaiveDft: return "NaiveDft";
    case Backend::ClosedForm: return "ClosedForm";
  }
  return "Unknown";
}

struct AmplitudeTable {
  unsigned n_total = 0;
  std::vector<double> probabilities;  // |amplitude(y)|^2
  Backend backend = Backend::FullTransform;
};

/// |amplitude(y)|^2 = sin^2(pi m r y / 2^n) / (2^n m sin^2(pi r y / 2^n)).
inline double amplitude_sq(u64 y, const OrderInstance& inst) {
  const unsigned bits = inst.n_total();
  if (y >= inst.register_size()) throw Error(Errc::InvalidArgument, "y outside the register");
  const i128 ry = static_cast<i128>(inst.r) * static_cast<i128>(y);
  return detail::dirichlet_ratio(ry, inst.m, bits) /
         (std::ldexp(1.0, static_cast<int>(bits)) * static_cast<double>(inst.m));
}

/// The post-measurement input register: 1/sqrt(m) at k r + x0, k < m.
inline std::vector<cplx> periodic_state(const OrderInstance& inst) {
  std::vector<cplx> state(inst.register_size());
  const double amp = 1.0 / std::sqrt(static_cast<double>(inst.m));
  for (u64 k = 0; k < inst.m; ++k) state[k * inst.r + inst.x0] = amp;
  return state;
}

namespace detail {

inline std::vector<double> squared_magnitudes(std::span<const cplx> amplitudes) {
  std::vector<double> out(amplitudes.size());
  for (std::size_t i = 0; i < amplitudes.size(); ++i) out[i] = std::norm(amplitudes[i]);
  return out;
}

}  // namespace detail

inline AmplitudeTable full_transform(const OrderInstance& inst, Backend backend = Backend::FullTransform) {
  const unsigned bits = inst.n_total();
  AmplitudeTable table;
  table.n_total = bits;
  table.backend = backend;
  switch (backend) {
    case Backend::FullTransform: {
      if (bits > kMaxTransformBits) {
        throw Error(Errc::RegisterTooLarge, "full transform limited to 22 qubits");
      }
      auto state = periodic_state(inst);
      fft_inplace(state, TransformSign::Inverse);
      table.probabilities = detail::squared_magnitudes(state);
      break;
    }
    case Backend::NaiveDft: {
      if (bits > kMaxNaiveDftBits) {
        throw Error(Errc::RegisterTooLarge, "naive DFT limited to 12 qubits");
      }
      const auto state = periodic_state(inst);
      table.probabilities = detail::squared_magnitudes(naive_dft(state, TransformSign::Inverse));
      break;
    }
    case Backend::ClosedForm: {
      if (bits > kMaxClosedFormTableBits) {
        throw Error(Errc::RegisterTooLarge, "closed-form table limited to 24 qubits");
      }
      table.probabilities.resize(inst.register_size());
      for (u64 y = 0; y < inst.register_size(); ++y) table.probabilities[y] = amplitude_sq(y, inst);
      break;
    }
  }
  return table;
}

inline double mass_on_set(const AmplitudeTable& table, std::span<const u64> members) {
  KahanSum<double> acc;
  for (u64 y : members) {
    if (y >= table.probabilities.size()) throw Error(Errc::InvalidArgument, "member outside the table");
    acc += table.probabilities[y];
  }
  return acc.value();
}

/// Same as above, evaluating each member in closed form (no table).
inline double mass_on_set(const OrderInstance& inst, std::span<const u64> members) {
  KahanSum<double> acc;
  for (u64 y : members) acc += amplitude_sq(y, inst);
  return acc.value();
}

inline double table_total(const AmplitudeTable& table) { return kahan_total(table.probabilities); }

/// P, 2 P_1, Pt and the extra +-2 term, summed straight off a table. Pt
/// takes y_s + 2 when y_s < s 2^n / r and y_s - 2 otherwise; `edge` adds
/// y_s + 2 where s 2^n / r is an integer.
struct WindowBreakdown {
  double P = 0.0;
  double P1_pair = 0.0;
  double Pt = 0.0;
  double edge = 0.0;
  double P_tilde = 0.0;  // mass on S~ itself, summed independently
};

inline WindowBreakdown window_breakdown(const AmplitudeTable& table, const OrderInstance& inst,
                                        GerjuoyPolicy policy = GerjuoyPolicy::RequireNonPrimePower) {
  if (inst.q_pad != 0) throw Error(Errc::InvalidArgument, "breakdown is defined for q_pad = 0");
  const auto& prob = table.probabilities;
  KahanSum<double> p, p1, pt, edge;
  for (u64 s = 1; s < inst.r; ++s) {
    const u128 scaled = static_cast<u128>(s) << inst.n_total();
    const auto quotient = static_cast<u64>(scaled / inst.r);
    const auto rho = static_cast<u64>(scaled % inst.r);
    const u64 y = 2 * rho < inst.r ? quotient : quotient + 1;
    p += prob.at(y);
    p1 += prob.at(y + 1);
    p1 += prob.at(y - 1);
    const bool rounded_down = rho != 0 && 2 * rho < inst.r;
    pt += rounded_down ? prob.at(y + 2) : prob.at(y - 2);
    if (rho == 0) edge += prob.at(y + 2);
  }
  WindowBreakdown out{p.value(), p1.value(), pt.value(), edge.value(), 0.0};
  const auto members = target_set_members(inst, TargetKind::Window2, policy);
  out.P_tilde = mass_on_set(table, members);
  return out;
}

struct Figure1Row {
  u64 y = 0;
  double frac = 0.0;  // y / 2^(n+q)
  double prob = 0.0;
  bool flag = false;  // y is one of the nearest targets y_s
};

/// Rows for every y in [y_begin, y_end). Uses the full transform when the
/// register allows it, closed-form evaluation otherwise.
inline std::vector<Figure1Row> figure1_dump(const OrderInstance& inst, u64 y_begin, u64 y_end) {
  if (y_begin > y_end || y_end > inst.register_size()) {
    throw Error(Errc::InvalidArgument, "row range outside the register");
  }
  const auto nearest = target_set_members(inst, TargetKind::Nearest);
  std::vector<double> table;
  const bool use_transform = inst.n_total() <= kMaxTransformBits;
  if (use_transform) table = full_transform(inst).probabilities;

  std::vector<Figure1Row> rows;
  rows.reserve(y_end - y_begin);
  auto next_flag = std::lower_bound(nearest.begin(), nearest.end(), y_begin);
  const double scale = std::ldexp(1.0, -static_cast<int>(inst.n_total()));
  for (u64 y = y_begin; y < y_end; ++y) {
    Figure1Row row;
    row.y = y;
    row.frac = static_cast<double>(y) * scale;
    row.prob = use_transform ? table[y] : amplitude_sq(y, inst);
    if (next_flag != nearest.end() && *next_flag == y) {
      row.flag = true;
      ++next_flag;
    }
    rows.push_back(row);
  }
  return rows;
}

inline std::vector<Figure1Row> figure1_dump(const OrderInstance& inst) {
  return figure1_dump(inst, 0, inst.register_size());
}

/// CSV with header `y,frac,prob,flag`, reals at 17 significant digits.
inline void write_figure1_csv(std::ostream& os, std::span<const Figure1Row> rows) {
  const auto old_precision = os.precision();
  os << "y,frac,prob,flag\n" << std::setprecision(17);
  for (const auto& row : rows) {
    os << row.y << ',' << row.frac << ',' << row.prob << ',' << (row.flag ? 1 : 0) << '\n';
  }
  os.precision(old_precision);
}

}  // namespace shorprob
