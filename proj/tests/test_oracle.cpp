#include <catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <sstream>

#include "shorprob/oracle.hpp"
#include "support/instances.hpp"

using namespace shorprob;
using Catch::Approx;

TEST_CASE("transforms") {
  SECTION("fft matches the naive transform on random vectors") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> gauss;
    for (unsigned bits = 0; bits <= 10; ++bits) {
      std::vector<cplx> v(std::size_t{1} << bits);
      for (auto& x : v) x = {gauss(rng), gauss(rng)};
      for (auto sign : {TransformSign::Forward, TransformSign::Inverse}) {
        auto fast = v;
        fft_inplace(fast, sign);
        const auto slow = naive_dft(v, sign);
        for (std::size_t i = 0; i < v.size(); ++i) REQUIRE(std::abs(fast[i] - slow[i]) < 1e-12);
      }
    }
  }
  SECTION("forward then inverse is the identity") {
    std::vector<cplx> v(256);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = {std::sin(double(i)), std::cos(3.0 * i)};
    auto w = v;
    fft_inplace(w, TransformSign::Forward);
    fft_inplace(w, TransformSign::Inverse);
    for (std::size_t i = 0; i < v.size(); ++i) REQUIRE(std::abs(w[i] - v[i]) < 1e-13);
  }
  std::vector<cplx> bad(12);
  CHECK_THROWS_AS(fft_inplace(bad, TransformSign::Forward), std::invalid_argument);
}

TEST_CASE("amplitudes") {
  const auto inst = make_instance(247, 4);
  CHECK(amplitude_sq(0, inst) == Approx(3641.0 / 65536.0).margin(1e-16));
  const auto table = full_transform(inst);
  CHECK(table.probabilities.size() == 65536);
  CHECK(amplitude_sq(3641, inst) == Approx(table.probabilities[3641]).margin(1e-12));
  CHECK(table_total(table) == Approx(1.0).margin(1e-10));
  CHECK_THROWS_AS(amplitude_sq(65536, inst), Error);

  SECTION("three backends agree") {
    const auto instances = testing::random_instances(40, {.max_N = 64, .max_total_bits = 12, .paddings = {0, 1}});
    for (const auto& i : instances) {
      const auto fft = full_transform(i, Backend::FullTransform);
      const auto naive = full_transform(i, Backend::NaiveDft);
      const auto closed = full_transform(i, Backend::ClosedForm);
      for (std::size_t y = 0; y < fft.probabilities.size(); ++y) {
        REQUIRE(fft.probabilities[y] == Approx(naive.probabilities[y]).margin(1e-12));
        REQUIRE(fft.probabilities[y] == Approx(closed.probabilities[y]).margin(1e-12));
        REQUIRE(fft.probabilities[y] >= 0.0);
      }
      REQUIRE(table_total(fft) == Approx(1.0).margin(1e-10));
    }
  }

  SECTION("full transform against closed form up to 18 qubits") {
    const auto instances = testing::random_instances(30, {.max_N = 4096, .max_total_bits = 18});
    for (const auto& i : instances) {
      const auto fft = full_transform(i, Backend::FullTransform);
      const auto closed = full_transform(i, Backend::ClosedForm);
      double worst = 0.0;
      for (std::size_t y = 0; y < fft.probabilities.size(); ++y) {
        worst = std::max(worst, std::abs(fft.probabilities[y] - closed.probabilities[y]));
      }
      REQUIRE(worst <= 1e-12);
      REQUIRE(table_total(closed) == Approx(1.0).margin(1e-10));
      // Per-outcome closed forms near each target.
      for (u64 s = 1; s < i.r; ++s) {
        const u64 y = nearest_target(s, i).y;
        for (i64 h = -4; h <= 4; ++h) {
          const i64 yy = static_cast<i64>(y) + h;
          if (yy < 0 || static_cast<u64>(yy) >= i.register_size()) continue;
          REQUIRE(p_outcome(s, h, i) == Approx(fft.probabilities[static_cast<std::size_t>(yy)]).margin(1e-12));
        }
      }
    }
  }

  SECTION("x0 only enters through m") {
    // 2^16 = 3640 * 18 + 16, so x0 in [0, 15] all give m = 3641.
    const auto shifted = make_instance(247, 4, 5);
    REQUIRE(shifted.m == inst.m);
    const auto other = full_transform(shifted);
    for (std::size_t y = 0; y < other.probabilities.size(); ++y) {
      REQUIRE(other.probabilities[y] == Approx(table.probabilities[y]).margin(1e-12));
    }
    const auto fewer = make_instance(247, 4, 17);
    CHECK(fewer.m == 3640);
    CHECK(table_total(full_transform(fewer)) == Approx(1.0).margin(1e-10));
  }

  SECTION("a single impulse gives a flat table") {
    auto single = instance_for_order(11, 10, 0, 0);  // register of 2^7 = 128
    single.m = 1;
    const auto flat = full_transform(single);
    for (double p : flat.probabilities) REQUIRE(p == Approx(1.0 / 128).margin(1e-15));
    const auto closed = full_transform(single, Backend::ClosedForm);
    for (double p : closed.probabilities) REQUIRE(p == Approx(1.0 / 128).margin(1e-15));
  }

  SECTION("size guards") {
    const auto big = make_instance(3000, 7, 0, 2);  // 24 + 2 qubits
    CHECK_THROWS_AS(full_transform(big), Error);
    CHECK_THROWS_AS(full_transform(big, Backend::ClosedForm), Error);
    CHECK_THROWS_AS(full_transform(make_instance(247, 4), Backend::NaiveDft), Error);
  }
}

TEST_CASE("masses on target sets") {
  const auto inst = make_instance(247, 4);
  const auto table = full_transform(inst);
  const auto S = target_set_members(inst, TargetKind::Nearest);
  const auto W = target_set_members(inst, TargetKind::Window2);
  CHECK(mass_on_set(table, S) == Approx(0.71982482558080545540).margin(1e-12));
  CHECK(mass_on_set(table, W) == Approx(0.89438284786571368093).margin(1e-12));
  CHECK(mass_on_set(inst, W) == Approx(mass_on_set(table, W)).margin(1e-13));
  CHECK(mass_on_set(table, std::vector<u64>{}) == 0.0);

  const auto parts = window_breakdown(table, inst);
  CHECK(parts.P == Approx(0.71982482558080545540).margin(1e-12));
  CHECK(parts.P1_pair == Approx(0.15577667957639559817).margin(1e-12));
  CHECK(parts.Pt == Approx(0.018781342656774252754).margin(1e-12));
  CHECK(parts.P + parts.P1_pair + parts.Pt + parts.edge == Approx(parts.P_tilde).margin(1e-14));
  const auto closed = exact_P_tilde(inst);
  CHECK(*closed.edge == Approx(parts.edge).margin(1e-15));
}

TEST_CASE("figure data") {
  const auto inst = make_instance(247, 4);
  const auto rows = figure1_dump(inst);
  REQUIRE(rows.size() == 65536);
  const auto flagged = std::count_if(rows.begin(), rows.end(), [](const Figure1Row& r) { return r.flag; });
  CHECK(flagged == 17);

  // Each flagged row is the largest value within its half-gap neighbourhood,
  // and sits near s/18.
  std::size_t s = 0;
  for (const auto& row : rows) {
    if (!row.flag) continue;
    ++s;
    const u64 lo = row.y - 1800, hi = row.y + 1800;
    for (u64 y = lo; y <= hi; ++y) REQUIRE(rows[y].prob <= row.prob);
    CHECK(row.frac == Approx(static_cast<double>(s) / 18.0).margin(1.0 / 65536));
  }

  const auto slice = figure1_dump(inst, 3630, 3650);
  CHECK(slice.size() == 20);
  CHECK(slice[11].flag);
  CHECK(slice[11].prob == rows[3641].prob);
  CHECK_THROWS_AS(figure1_dump(inst, 10, 70000), Error);

  std::ostringstream csv;
  write_figure1_csv(csv, slice);
  std::istringstream lines(csv.str());
  std::string line;
  std::getline(lines, line);
  CHECK(line == "y,frac,prob,flag");
  std::size_t count = 0;
  while (std::getline(lines, line)) {
    ++count;
    if (count == 12) {
      CHECK(line.rfind("3641,", 0) == 0);
      CHECK(line.back() == '1');
      // prob survives the text round trip exactly.
      const auto last = line.rfind(',');
      const auto mid = line.rfind(',', last - 1);
      CHECK(std::stod(line.substr(mid + 1, last - mid - 1)) == rows[3641].prob);
    }
  }
  CHECK(count == 20);
}
