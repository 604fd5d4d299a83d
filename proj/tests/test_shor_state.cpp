#include <catch_amalgamated.hpp>

#include <algorithm>
#include <complex>
#include <map>
#include <numbers>

#include "shorprob/oracle.hpp"
#include "shorprob/shor_state.hpp"
#include "support/instances.hpp"

using namespace shorprob;
using Catch::Approx;

namespace {

bool has_code(Errc code, const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code() == code;
  }
  return false;
}

/// |sum_k exp(2 pi i k r y / 2^n)|^2 / (2^n m) by direct summation in long
/// double, as a check on the closed form that shares none of its code.
double geometric_sum_sq(u64 y, const OrderInstance& inst) {
  const u64 size = inst.register_size();
  const u64 step = static_cast<u64>(static_cast<u128>(inst.r) * y % size);
  std::complex<long double> acc = 0;
  u64 phase = 0;
  for (u64 k = 0; k < inst.m; ++k) {
    const long double angle = 2.0L * std::numbers::pi_v<long double> * phase / size;
    acc += std::complex<long double>(std::cos(angle), std::sin(angle));
    phase = (phase + step) % size;
  }
  return static_cast<double>(std::norm(acc) / (static_cast<long double>(size) * inst.m));
}

}  // namespace

TEST_CASE("m value") {
  CHECK(m_value(18, 16, 0) == 3641);
  CHECK(m_value(4, 4, 0) == 4);
  // 65536 = 3640 * 18 + 16: offsets up to 15 keep m = 3641, larger ones drop it.
  CHECK(m_value(18, 16, 15) == 3641);
  CHECK(m_value(18, 16, 16) == 3640);
  CHECK(m_value(18, 16, 17) == 3640);
  CHECK(make_instance(247, 4).m == 3641);

  SECTION("bounds for every offset") {
    for (u64 r = 2; r <= 300; ++r) {
      for (unsigned n = 10; n <= 16; n += 3) {
        const double ratio = std::ldexp(1.0, n) / static_cast<double>(r);
        const bool exact = (u64{1} << n) % r == 0;
        for (u64 x0 = 0; x0 < r; ++x0) {
          const auto m = static_cast<double>(m_value(r, n, x0));
          REQUIRE(m > ratio - 1.0);
          REQUIRE(m < ratio + 1.0);
          if (!exact) REQUIRE(m != ratio);
        }
      }
    }
  }
}

TEST_CASE("instances") {
  const auto inst = make_instance(247, 4);
  CHECK(inst.r == 18);
  CHECK(inst.kappa == 1);
  CHECK(inst.r_prime == 9);
  CHECK(inst.n == 16);
  CHECK(inst.n0 == 8);
  CHECK(inst.n_total() == 16);
  CHECK(make_instance(247, 4, 0, 3).n_total() == 19);
  CHECK(has_code(Errc::InvalidArgument, [] { make_instance(247, 4, 18); }));
  CHECK(has_code(Errc::InvalidArgument, [] { make_instance(247, 4, 0, kMaxPadding + 1); }));
  CHECK(has_code(Errc::NotCoprime, [] { make_instance(247, 13); }));
}

TEST_CASE("offsets") {
  const auto inst = make_instance(247, 4);
  CHECK(delta(9, inst) == 0.0);
  CHECK(delta(1, inst) == Approx(2.0 / 18.0).margin(1e-15));
  CHECK(nearest_target(1, inst).y == 3641);
  CHECK(nearest_target(9, inst).y == 32768);

  const auto exact = instance_for_order(15, 4);  // 2^8 / 4 is an integer
  for (u64 s = 1; s < 4; ++s) {
    CHECK(delta(s, exact) == 0.0);
    CHECK(nearest_target(s, exact).y == s * 64);
  }

  SECTION("offsets of non-multiples of r' are +-j/r' twice over") {
    for (u64 r = 2; r <= 200; ++r) {
      const auto split = decompose_order(r);
      INFO("r = " << r);
      const auto inst_r = instance_for_order(2 * r + 1, r);
      for (u64 k = 0; k < (u64{1} << split.kappa); ++k) {
        std::map<u64, int> counts;  // j -> multiplicity, |delta| = j / r'
        for (u64 q = 1; q < split.r_prime; ++q) {
          const u64 s = k * split.r_prime + q;
          const auto t = nearest_target(s, inst_r);
          const i64 scaled = t.scaled_offset;  // r * delta
          REQUIRE(std::abs(scaled) % (i64{1} << split.kappa) == 0);
          ++counts[static_cast<u64>(std::abs(scaled)) >> split.kappa];
        }
        std::map<u64, int> expected;
        for (u64 j = 1; j <= split.r_prime / 2; ++j) expected[j] = 2;
        REQUIRE(counts == expected);
      }
      for (u64 s = split.r_prime; s < r; s += split.r_prime) REQUIRE(delta(s, inst_r) == 0.0);
    }
  }
}

TEST_CASE("single outcomes") {
  const auto inst = make_instance(247, 4);
  CHECK(p_outcome(9, 0, inst) == Approx(3641.0 / 65536.0).margin(1e-16));
  const auto table = full_transform(inst);
  const u64 y1 = nearest_target(1, inst).y;
  CHECK(p_outcome(1, 1, inst) == Approx(table.probabilities[y1 + 1]).margin(1e-12));
  CHECK(p_outcome(1, 1, inst) == Approx(geometric_sum_sq(y1 + 1, inst)).margin(1e-12));

  const auto exact = instance_for_order(15, 4);
  for (u64 s = 1; s < 4; ++s) CHECK(p_outcome(s, 0, exact) == std::ldexp(static_cast<double>(exact.m), -8));

  SECTION("agrees with direct summation near every target") {
    const auto instances = testing::random_instances(25, {.max_N = 300, .max_total_bits = 16});
    for (const auto& i : instances) {
      for (u64 s = 1; s < i.r; ++s) {
        const u64 y = nearest_target(s, i).y;
        for (i64 h = -4; h <= 4; ++h) {
          const i64 yy = static_cast<i64>(y) + h;
          if (yy < 0 || static_cast<u64>(yy) >= i.register_size()) continue;
          REQUIRE(p_outcome(s, h, i) == Approx(geometric_sum_sq(static_cast<u64>(yy), i)).margin(1e-12));
        }
      }
    }
  }
}

TEST_CASE("exact P") {
  const auto inst = make_instance(247, 4);
  const auto report = exact_P(inst);
  CHECK(report.P == Approx(0.71982482558080545540).margin(1e-12));
  CHECK(report.P == Approx(exact_P_direct(inst)).margin(1e-12));
  CHECK(report.multiples_term == Approx(3641.0 / 65536.0).margin(1e-16));

  const auto divisible = instance_for_order(15, 4);
  CHECK(exact_P(divisible).P == Approx(3.0 * divisible.m / 256.0).margin(1e-15));

  const auto n15 = make_instance(15, 2);
  CHECK(n15.r == 4);
  const auto table = full_transform(n15);
  CHECK(exact_P(n15).P == Approx(mass_on_set(table, target_set_members(n15, TargetKind::Nearest))).margin(1e-12));

  CHECK(has_code(Errc::RegisterTooSmall, [] {
    auto small = make_instance(247, 4);
    small.n = small.n0;
    exact_P(small);
  }));

  SECTION("closed form against the direct sum") {
    const auto instances = testing::random_instances(
        60, {.max_N = 4096, .max_total_bits = 24, .paddings = {0, 1, 2, 3}, .exclude_prime_powers = false});
    for (const auto& i : instances) REQUIRE(exact_P(i).P == Approx(exact_P_direct(i)).margin(1e-12));
  }
}

TEST_CASE("window probabilities") {
  const auto inst = make_instance(247, 4);
  const auto report = exact_P_tilde(inst);
  CHECK(report.P == Approx(0.71982482558080545540).margin(1e-12));
  CHECK(*report.P1_pair == Approx(0.15577667957639559817).margin(1e-12));
  CHECK(*report.Pt == Approx(0.018781342656774252754).margin(1e-12));
  CHECK(*report.P_tilde == Approx(0.89438284786571368093).margin(1e-12));
  CHECK(*report.P_tilde == Approx(report.P + *report.P1_pair + *report.Pt + *report.edge).margin(1e-15));

  const auto q0 = exact_P_tilde_q(inst);
  CHECK(*q0.P_tilde == *report.P_tilde);

  SECTION("padded windows match the transform") {
    for (auto [N, b, q] : {std::tuple{247ULL, 4ULL, 1U}, {15, 2, 3}, {21, 2, 2}, {35, 3, 0}}) {
      const auto padded = make_instance(N, b, 0, q);
      const auto members = target_set_members(padded, q == 0 ? TargetKind::Window2 : TargetKind::WindowQ,
                                              is_prime_power(N) ? GerjuoyPolicy::AllowVerifiedOrder
                                                                : GerjuoyPolicy::RequireNonPrimePower);
      const auto table = full_transform(padded);
      CHECK(*exact_P_tilde_q(padded).P_tilde == Approx(mass_on_set(table, members)).margin(1e-12));
    }
  }

  SECTION("errors and the prime-power override") {
    CHECK(has_code(Errc::GerjuoyInapplicable, [] { exact_P_tilde(make_instance(9, 2)); }));  // r = 6 > 9/2
    // 25 = 5^2 and 7 has order 4 < 25/2: allowed only when asked.
    const auto pp = make_instance(25, 7);
    CHECK(pp.r == 4);
    CHECK(has_code(Errc::GerjuoyInapplicable, [&] { exact_P_tilde(pp); }));
    CHECK(has_code(Errc::GerjuoyInapplicable, [&] { target_set_members(pp, TargetKind::Window2); }));
    const auto allowed = exact_P_tilde(pp, GerjuoyPolicy::AllowVerifiedOrder);
    const auto table = full_transform(pp);
    CHECK(*allowed.P_tilde ==
          Approx(mass_on_set(table, target_set_members(pp, TargetKind::Window2, GerjuoyPolicy::AllowVerifiedOrder)))
              .margin(1e-12));
    CHECK(has_code(Errc::GerjuoyInapplicable,
                   [] { exact_P_tilde(make_instance(9, 2), GerjuoyPolicy::AllowVerifiedOrder); }));
    CHECK(has_code(Errc::InvalidArgument, [] { exact_P_tilde(make_instance(247, 4, 0, 1)); }));
  }

  SECTION("symmetry in h and ordering") {
    const auto instances = testing::random_instances(40, {.max_N = 2000, .max_total_bits = 22});
    for (const auto& i : instances) {
      const i64 width = i64{2} << i.q_pad;
      for (i64 h = 1; h <= width; ++h) REQUIRE(offset_mass(i, h) == Approx(offset_mass(i, -h)).margin(1e-12));
      const auto w = exact_P_tilde_q(i);
      REQUIRE(w.P <= *w.P_tilde);
      REQUIRE(*w.P_tilde <= 1.0 + 1e-12);
      if (i.q_pad == 0) {
        const auto full = exact_P_tilde(i);
        REQUIRE(*full.P_tilde == Approx(*w.P_tilde).margin(1e-13));
      }
    }
  }
}

TEST_CASE("target sets") {
  const auto inst = make_instance(247, 4);
  const auto S = target_set_members(inst, TargetKind::Nearest);
  REQUIRE(S.size() == 17);
  for (u64 s = 1; s < 18; ++s) {
    const u64 expected = static_cast<u64>(std::llround(static_cast<double>(s) * 65536.0 / 18.0));
    CHECK(S[s - 1] == expected);
  }
  const auto W = target_set_members(inst, TargetKind::Window2);
  // Four integers lie within 2 of a non-integer centre, five of an integer one.
  CHECK(W.size() == 16 * 4 + 5);
  for (u64 y = 32766; y <= 32770; ++y) CHECK(std::binary_search(W.begin(), W.end(), y));
  CHECK_FALSE(std::binary_search(W.begin(), W.end(), u64{32765}));
  CHECK_FALSE(std::binary_search(W.begin(), W.end(), u64{32771}));
  // s = 1: centre 3640.89 and y_1 = 3641 rounds up, so the window reaches
  // down to y_1 - 2 and stops at y_1 + 1.
  for (u64 y = 3639; y <= 3642; ++y) CHECK(std::binary_search(W.begin(), W.end(), y));
  CHECK_FALSE(std::binary_search(W.begin(), W.end(), u64{3643}));
  CHECK_FALSE(std::binary_search(W.begin(), W.end(), u64{3638}));
  CHECK(target_set_members(inst, TargetKind::WindowQ) == W);

  const auto divisible = instance_for_order(15, 4);
  CHECK(target_set_members(divisible, TargetKind::Nearest) == std::vector<u64>{64, 128, 192});

  SECTION("padded windows are disjoint and centred") {
    const auto instances = testing::random_instances(30, {.max_N = 1000, .max_total_bits = 22});
    for (const auto& i : instances) {
      const auto members = target_set_members(i, TargetKind::WindowQ);
      REQUIRE(std::adjacent_find(members.begin(), members.end()) == members.end());
      REQUIRE(std::is_sorted(members.begin(), members.end()));
      const u64 width = u64{2} << i.q_pad;
      // Each window holds either 2 * width or 2 * width + 1 integers.
      REQUIRE(members.size() >= (i.r - 1) * 2 * width);
      REQUIRE(members.size() <= (i.r - 1) * (2 * width + 1));
    }
  }
}
