#pragma once

// Command-line front end. Kept in a header so the test suite can drive the
// same code path as the executable without spawning processes.
//
// Exit codes: 0 success, 2 invalid input, 3 precondition failure,
// 4 verification failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

#include "shorprob/shorprob.hpp"

namespace shorprob::cli {

inline constexpr const char* kSchema = "shorprob.v1";

enum ExitCode : int {
  kSuccess = 0,
  kInvalidInput = 2,
  kPreconditionFailed = 3,
  kVerificationFailed = 4,
};

inline int exit_code_for(Errc code) {
  switch (code) {
    case Errc::InvalidArgument:
    case Errc::NotCoprime:
    case Errc::ModulusTooLarge:
      return kInvalidInput;
    case Errc::RegisterTooSmall:
    case Errc::RegisterTooLarge:
    case Errc::GerjuoyInapplicable:
    case Errc::Unreachable:
      return kPreconditionFailed;
  }
  return kInvalidInput;
}

using nlohmann::json;

inline json to_json(const OrderInstance& inst) {
  return {{"N", inst.N},       {"b", inst.b},         {"r", inst.r},   {"kappa", inst.kappa},
          {"r_prime", inst.r_prime}, {"n", inst.n}, {"n0", inst.n0}, {"q_pad", inst.q_pad},
          {"x0", inst.x0},     {"m", inst.m}};
}

inline json to_json(const std::vector<IndexedTerm>& terms) {
  json out = json::array();
  for (const auto& t : terms) out.push_back({{"index", t.index}, {"value", t.value}});
  return out;
}

inline json to_json(const ProbabilityReport& report) {
  auto optional = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  return {{"P", report.P},
          {"P1_pair", optional(report.P1_pair)},
          {"Pt", optional(report.Pt)},
          {"edge", optional(report.edge)},
          {"P_tilde", optional(report.P_tilde)},
          {"q_pad", report.q_pad},
          {"multiples_term", report.multiples_term},
          {"window_terms", to_json(report.window_terms)},
          {"fringe_terms", to_json(report.fringe_terms)}};
}

inline json to_json(const BoundReport& report) {
  json pre = json::array();
  for (const auto& p : report.preconditions) pre.push_back({{"name", p.name}, {"met", p.met}});
  return {{"kind", std::string(to_string(report.kind))},
          {"value", report.value},
          {"preconditions_met", report.preconditions_hold()},
          {"preconditions", pre},
          {"parameters",
           {{"N", report.params.N},
            {"kappa", report.params.kappa},
            {"r_prime", report.params.r_prime},
            {"q_pad", report.params.q_pad},
            {"n", report.params.n},
            {"n0", report.params.n0}}}};
}

struct RunConfig {
  u64 N = 0;
  u64 b = 0;
  u64 x0 = 0;
  unsigned q_pad = 0;
  std::string set = "nearest";
  std::string format = "text";
  double tolerance = 1e-12;
  bool allow_prime_power = false;
  // bounds / thresholds
  int kappa = -1;
  u64 r_prime = 0;
  std::string bound = "window";
  std::string search = "r-prime";
  double target = 0.0;
  unsigned register_excess = 11;
  // amplitudes
  std::string out_path;
};

namespace detail {

inline GerjuoyPolicy policy(const RunConfig& cfg) {
  return cfg.allow_prime_power ? GerjuoyPolicy::AllowVerifiedOrder : GerjuoyPolicy::RequireNonPrimePower;
}

inline void print_json(std::ostream& out, json body, const char* command) {
  body["schema"] = kSchema;
  body["command"] = command;
  out << body.dump(2) << '\n';
}

class Precision {
 public:
  explicit Precision(std::ostream& os) : os_(os), old_(os.precision(17)) {}
  ~Precision() { os_.precision(old_); }
  Precision(const Precision&) = delete;
  Precision& operator=(const Precision&) = delete;

 private:
  std::ostream& os_;
  std::streamsize old_;
};

}  // namespace detail

inline int cmd_order(const RunConfig& cfg, std::ostream& out) {
  const u64 r = multiplicative_order(cfg.b, cfg.N);
  const auto split = decompose_order(r);
  if (cfg.format == "json") {
    detail::print_json(out, {{"N", cfg.N}, {"b", cfg.b}, {"r", r}, {"kappa", split.kappa}, {"r_prime", split.r_prime}},
                       "order");
  } else {
    out << r << '\n';
  }
  return kSuccess;
}

inline int cmd_exact(const RunConfig& cfg, std::ostream& out) {
  const auto inst = make_instance(cfg.N, cfg.b, cfg.x0, cfg.q_pad);
  ProbabilityReport report;
  if (cfg.set == "nearest") {
    report = exact_P(inst);
  } else if (cfg.q_pad == 0) {
    report = exact_P_tilde(inst, detail::policy(cfg));
  } else {
    report = exact_P_tilde_q(inst, detail::policy(cfg));
  }
  if (cfg.format == "json") {
    detail::print_json(out, {{"instance", to_json(inst)}, {"set", cfg.set}, {"report", to_json(report)}}, "exact");
    return kSuccess;
  }
  detail::Precision precision(out);
  out << "N=" << inst.N << " b=" << inst.b << " r=" << inst.r << " kappa=" << inst.kappa
      << " r'=" << inst.r_prime << " n=" << inst.n << " n0=" << inst.n0 << " q=" << inst.q_pad
      << " x0=" << inst.x0 << " m=" << inst.m << '\n';
  out << "P " << report.P << '\n';
  if (report.P1_pair) out << "2P1 " << *report.P1_pair << '\n';
  if (report.Pt) out << "Pt " << *report.Pt << '\n';
  if (report.edge) out << "edge " << *report.edge << '\n';
  if (report.P_tilde) out << "P_tilde " << *report.P_tilde << '\n';
  out << "multiples_term " << report.multiples_term << '\n';
  return kSuccess;
}

inline int cmd_bounds(const RunConfig& cfg, std::ostream& out) {
  unsigned kappa = 0;
  u64 r_prime = 0;
  json header;
  if (cfg.b != 0) {
    const auto inst = make_instance(cfg.N, cfg.b, cfg.x0, cfg.q_pad);
    kappa = inst.kappa;
    r_prime = inst.r_prime;
    header["instance"] = to_json(inst);
  } else {
    if (cfg.kappa < 0 || cfg.r_prime == 0) {
      throw Error(Errc::InvalidArgument, "give either --b or both --kappa and --r-prime");
    }
    kappa = static_cast<unsigned>(cfg.kappa);
    r_prime = cfg.r_prime;
  }
  const auto sizes = register_sizes(cfg.N);

  std::vector<BoundReport> reports;
  reports.push_back(series_lower_bound(sizes.n + cfg.q_pad, sizes.n0, kappa, r_prime));
  reports.push_back(integral_lower_bound_P(cfg.N, kappa, r_prime));
  reports.push_back(integral_lower_bound_window(cfg.N, kappa, r_prime, 0));
  if (cfg.q_pad > 0) reports.push_back(integral_lower_bound_window(cfg.N, kappa, r_prime, cfg.q_pad));
  reports.push_back(asymptotic_report(AsymptoticRegime::Nearest));
  reports.push_back(asymptotic_report(AsymptoticRegime::Window, cfg.q_pad));

  if (cfg.format == "json") {
    json list = json::array();
    for (const auto& r : reports) list.push_back(to_json(r));
    header["bounds"] = list;
    detail::print_json(out, header, "bounds");
    return kSuccess;
  }
  detail::Precision precision(out);
  for (const auto& r : reports) {
    out << to_string(r.kind) << " q=" << r.params.q_pad << " value=" << r.value;
    for (const auto& p : r.preconditions) {
      if (!p.met) out << " [unmet: " << p.name << ']';
    }
    out << '\n';
  }
  return kSuccess;
}

inline int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  const auto inst = make_instance(cfg.N, cfg.b, cfg.x0, cfg.q_pad);
  const auto fft_table = full_transform(inst, Backend::FullTransform);
  const auto closed_table = full_transform(inst, Backend::ClosedForm);

  double max_dev = 0.0;
  for (std::size_t y = 0; y < fft_table.probabilities.size(); ++y) {
    max_dev = std::max(max_dev, std::abs(fft_table.probabilities[y] - closed_table.probabilities[y]));
  }
  const double unitarity = std::abs(table_total(fft_table) - 1.0);

  json sets = json::array();
  bool pass = max_dev <= cfg.tolerance && unitarity <= 1e-10;
  auto record = [&](const char* name, double closed, double oracle) {
    const double dev = std::abs(closed - oracle);
    pass = pass && dev <= cfg.tolerance;
    sets.push_back({{"set", name}, {"closed_form", closed}, {"oracle", oracle}, {"deviation", dev}});
  };

  const auto nearest = target_set_members(inst, TargetKind::Nearest);
  record("nearest", exact_P(inst).P, mass_on_set(fft_table, nearest));

  const bool window_ok = 2 * inst.r < inst.N && (cfg.allow_prime_power || !is_prime_power(inst.N));
  if (window_ok) {
    const auto kind = inst.q_pad == 0 ? TargetKind::Window2 : TargetKind::WindowQ;
    const auto members = target_set_members(inst, kind, detail::policy(cfg));
    const auto report = exact_P_tilde_q(inst, detail::policy(cfg));
    record("window", *report.P_tilde, mass_on_set(fft_table, members));
    if (inst.q_pad == 0) {
      const auto closed = exact_P_tilde(inst, detail::policy(cfg));
      const auto oracle = window_breakdown(fft_table, inst, detail::policy(cfg));
      record("pair_1", *closed.P1_pair, oracle.P1_pair);
      record("pt", *closed.Pt, oracle.Pt);
      record("edge", *closed.edge, oracle.edge);
    }
  }

  if (cfg.format == "json") {
    detail::print_json(out,
                       {{"instance", to_json(inst)},
                        {"pass", pass},
                        {"tolerance", cfg.tolerance},
                        {"max_entry_deviation", max_dev},
                        {"unitarity_error", unitarity},
                        {"sets", sets}},
                       "verify");
  } else {
    detail::Precision precision(out);
    out << (pass ? "PASS" : "FAIL") << " max_entry_deviation=" << max_dev << " unitarity_error=" << unitarity
        << " tolerance=" << cfg.tolerance << '\n';
    for (const auto& s : sets) {
      out << "  " << s["set"].get<std::string>() << " closed=" << s["closed_form"].get<double>()
          << " oracle=" << s["oracle"].get<double>() << " deviation=" << s["deviation"].get<double>() << '\n';
    }
  }
  return pass ? kSuccess : kVerificationFailed;
}

inline int cmd_amplitudes(const RunConfig& cfg, std::ostream& out) {
  const auto inst = make_instance(cfg.N, cfg.b, cfg.x0, cfg.q_pad);
  if (inst.n_total() > kMaxTransformBits) {
    throw Error(Errc::RegisterTooLarge, "full dumps are limited to 22 qubits");
  }
  const auto rows = figure1_dump(inst);
  if (cfg.out_path.empty()) {
    write_figure1_csv(out, rows);
    return kSuccess;
  }
  std::ofstream file(cfg.out_path);
  if (!file) throw Error(Errc::InvalidArgument, "cannot open " + cfg.out_path);
  write_figure1_csv(file, rows);
  const auto flagged = std::count_if(rows.begin(), rows.end(), [](const Figure1Row& r) { return r.flag; });
  if (cfg.format == "json") {
    detail::print_json(out, {{"path", cfg.out_path}, {"rows", rows.size()}, {"flagged", flagged}}, "amplitudes");
  } else {
    out << "wrote " << rows.size() << " rows (" << flagged << " flagged) to " << cfg.out_path << '\n';
  }
  return kSuccess;
}

inline int cmd_thresholds(const RunConfig& cfg, std::ostream& out) {
  ThresholdQuery query;
  query.kappa = cfg.kappa < 0 ? 0 : static_cast<unsigned>(cfg.kappa);
  query.q_pad = cfg.q_pad;
  query.N = cfg.N;
  query.r_prime = cfg.r_prime;
  query.target = cfg.target;
  query.register_excess = cfg.register_excess;
  query.variable = cfg.search == "N" ? SearchVariable::N : SearchVariable::RPrime;
  if (cfg.bound == "series") {
    query.bound = query.kappa == 0 ? BoundKind::SeriesOdd : BoundKind::SeriesEven;
  } else if (cfg.bound == "integral") {
    query.bound = BoundKind::IntegralP;
  } else {
    query.bound = cfg.q_pad == 0 ? BoundKind::IntegralPTilde : BoundKind::IntegralPTildeQ;
  }
  const u64 result = threshold_search(query);
  if (cfg.format == "json") {
    detail::print_json(out,
                       {{"bound", std::string(to_string(query.bound))},
                        {"search", cfg.search},
                        {"target", cfg.target},
                        {"N", cfg.N},
                        {"kappa", query.kappa},
                        {"q_pad", cfg.q_pad},
                        {"result", result}},
                       "thresholds");
  } else {
    out << result << '\n';
  }
  return kSuccess;
}

/// Parses argv and runs one subcommand. Never throws.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact success probabilities, lower bounds and oracle checks for Shor order finding"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_instance = [&cfg](CLI::App* sub, bool need_b) {
    sub->add_option("--N", cfg.N, "modulus")->required()->check(CLI::Range(u64{2}, u64{1} << 40));
    auto* b = sub->add_option("--b", cfg.b, "base, 1 < b < N");
    if (need_b) b->required();
    sub->add_option("--x0", cfg.x0, "offset left by the output-register measurement");
    sub->add_option("--q", cfg.q_pad, "extra input qubits")->check(CLI::Range(0U, kMaxPadding));
    sub->add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"text", "json", "csv"}));
    sub->add_flag("--allow-prime-power", cfg.allow_prime_power,
                  "permit window sets for prime-power N when 2r < N holds");
  };

  auto* order = app.add_subcommand("order", "multiplicative order of b mod N");
  add_instance(order, true);
  auto* exact = app.add_subcommand("exact", "exact probability of observing a useful outcome");
  add_instance(exact, true);
  exact->add_option("--set", cfg.set, "target set")->check(CLI::IsMember({"nearest", "window"}));
  auto* bounds = app.add_subcommand("bounds", "lower bounds and asymptotic constants");
  add_instance(bounds, false);
  bounds->add_option("--kappa", cfg.kappa, "2-adic valuation of r")->check(CLI::Range(0, 40));
  bounds->add_option("--r-prime", cfg.r_prime, "odd part of r");
  auto* verify = app.add_subcommand("verify", "compare closed forms against the full transform");
  add_instance(verify, true);
  verify->add_option("--tol", cfg.tolerance, "absolute tolerance");
  auto* amplitudes = app.add_subcommand("amplitudes", "dump |amplitude|^2 for every outcome as CSV");
  add_instance(amplitudes, true);
  amplitudes->add_option("--out", cfg.out_path, "CSV destination (stdout if omitted)");
  auto* thresholds = app.add_subcommand("thresholds", "least r' (or N) at which a bound reaches a target");
  thresholds->add_option("--bound", cfg.bound)->check(CLI::IsMember({"series", "integral", "window"}));
  thresholds->add_option("--N", cfg.N, "modulus (fixed when searching r')");
  thresholds->add_option("--kappa", cfg.kappa)->check(CLI::Range(0, 40));
  thresholds->add_option("--r-prime", cfg.r_prime, "odd part of r (fixed when searching N)");
  thresholds->add_option("--q", cfg.q_pad)->check(CLI::Range(0U, kMaxPadding));
  thresholds->add_option("--target", cfg.target)->required();
  thresholds->add_option("--search", cfg.search)->check(CLI::IsMember({"r-prime", "N"}));
  thresholds->add_option("--excess", cfg.register_excess, "n - n0 for series bounds");
  thresholds->add_option("--format", cfg.format)->check(CLI::IsMember({"text", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kInvalidInput;
  }

  try {
    if (*order) return cmd_order(cfg, out);
    if (*exact) return cmd_exact(cfg, out);
    if (*bounds) return cmd_bounds(cfg, out);
    if (*verify) return cmd_verify(cfg, out);
    if (*amplitudes) return cmd_amplitudes(cfg, out);
    if (*thresholds) return cmd_thresholds(cfg, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  }
  return kInvalidInput;
}

}  // namespace shorprob::cli
