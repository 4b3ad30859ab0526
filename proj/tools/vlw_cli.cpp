// vlw: command-line front end. One experiment per config file; every run
// writes <out>/<command>.csv and <out>/summary.json.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <json.hpp>

#include "vlw/acceptance.hpp"
#include "vlw/config.hpp"
#include "vlw/error.hpp"
#include "vlw/matweight.hpp"
#include "vlw/muckenhoupt.hpp"
#include "vlw/operators.hpp"
#include "vlw/parallel.hpp"
#include "vlw/report.hpp"
#include "vlw/sobolev.hpp"
#include "vlw/varnorm.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kViolation = 1, kUsage = 2, kNumerical = 3 };

const std::map<std::string, std::string> kOperation{
    {"norm", "varnorm/luxemburg_norm"},
    {"apconst", "muckenhoupt/matrix_ap_constant"},
    {"reducing", "matweight/reducing_operator"},
    {"avgbound", "operators/averaging_bound_check"},
    {"mollify", "operators/approximate_identity_study"},
    {"hw", "sobolev/smooth_approximate"},
    {"truncate", "sobolev/truncate_to_compact"},
    {"suite", "acceptance/run_suite"},
};

struct Run {
  std::string command;
  fs::path config_path;
  fs::path out = "vlw_out";
  std::optional<std::uint64_t> seed;
  int threads = 0;
  double holder_constant = 4.0;
  bool holder_set = false;
  std::vector<int> criteria;
};

// What a command hands back: its table, headline numbers for the summary and
// whether an asserted inequality failed.
struct Outcome {
  vlw::CsvTable table{{}};
  json headline = json::object();
  bool violated = false;
};

double box_side(const vlw::Grid& g) {
  double side = g.upper(0) - g.lower(0);
  for (int a = 1; a < g.dim(); ++a) side = std::min(side, g.upper(a) - g.lower(a));
  return side;
}

void stamp(vlw::CsvTable& t, const Run& run, std::uint64_t seed) {
  t.note("command", run.command);
  t.note("vlw", vlw::kVersion);
  t.note("seed", std::to_string(seed));
  if (!run.config_path.empty()) t.note("config", run.config_path.filename().string());
}

Outcome cmd_norm(const vlw::ExperimentConfig& cfg, std::uint64_t seed) {
  const vlw::MatrixField w = vlw::build_weight(cfg.weight, cfg.grid);
  const vlw::VectorField f = vlw::build_field(cfg.field, cfg.grid, w.dim, seed);
  const vlw::NormResult plain = vlw::vector_norm(f, cfg.exponent);
  const vlw::NormResult weighted = vlw::matrix_weighted_norm(w, f, cfg.exponent);
  const vlw::ScalarField wf = vlw::weighted_magnitude(w, f);
  Outcome o;
  o.table = vlw::CsvTable({"quantity", "value", "iterations", "bracket_width"});
  o.table.row({"norm_f", vlw::format_number(plain.value), std::to_string(plain.iterations),
               vlw::format_number(plain.bracket_width)});
  o.table.row({"norm_Wf", vlw::format_number(weighted.value), std::to_string(weighted.iterations),
               vlw::format_number(weighted.bracket_width)});
  o.table.row({"modular_Wf", vlw::format_number(vlw::modular(wf, cfg.exponent)), "0", "0"});
  if (plain.capped || weighted.capped) {
    vlw::raise(vlw::ErrorKind::precondition, "bisection reached its iteration cap before the tolerance");
  }
  // duality witness for Wf, then the Hoelder check of |Wf| against it
  vlw::VectorField wfv(cfg.grid, w.dim);
  for (std::size_t c = 0; c < cfg.grid.cell_count(); ++c) {
    const Eigen::Map<const Eigen::VectorXd> fc(f.values.data() + c * static_cast<std::size_t>(w.dim), w.dim);
    Eigen::Map<Eigen::VectorXd>(wfv.values.data() + c * static_cast<std::size_t>(w.dim), w.dim) = w.at(c) * fc;
  }
  const vlw::DualWitness dw = vlw::dual_witness(wfv, cfg.exponent);
  const vlw::HolderPairing hp = vlw::holder_pairing(wf, vlw::magnitude(dw.g), cfg.exponent, cfg.holder_constant);
  o.table.row({"dual_pairing", vlw::format_number(dw.pairing), "0", "0"});
  o.table.row({"dual_norm_g", vlw::format_number(dw.norm_g), "0", "0"});
  o.table.row({"holder_lhs", vlw::format_number(hp.lhs), "0", "0"});
  o.table.row({"holder_rhs", vlw::format_number(hp.rhs), "0", "0"});
  o.violated = hp.lhs > hp.rhs * (1.0 + 1e-9) || (!dw.zero_input && !dw.contract_holds);
  o.headline = {{"norm_f", plain.value}, {"norm_Wf", weighted.value}, {"holder_ratio", hp.lhs / hp.rhs}};
  return o;
}

Outcome ap_outcome(const vlw::ApReport& rep, const vlw::ExperimentConfig& cfg) {
  Outcome o;
  o.table = vlw::ap_table(rep, cfg.grid.dim());
  o.headline = {{"sup", rep.supremum}, {"cubes", rep.values.size()}};
  return o;
}

Outcome cmd_apconst(const vlw::ExperimentConfig& cfg) {
  const vlw::MatrixField w = vlw::build_weight(cfg.weight, cfg.grid);
  return ap_outcome(vlw::matrix_ap_constant(w, cfg.exponent, vlw::build_family(cfg)), cfg);
}

Outcome cmd_reducing(const vlw::ExperimentConfig& cfg) {
  const vlw::MatrixField w = vlw::build_weight(cfg.weight, cfg.grid);
  const vlw::CubeFamily fam = vlw::build_family(cfg);
  const vlw::ApReport red = vlw::reducing_ap_constant(w, cfg.exponent, fam);
  const vlw::ApReport dir = vlw::matrix_ap_constant(w, cfg.exponent, fam);
  Outcome o = ap_outcome(red, cfg);
  o.headline["direct_sup"] = dir.supremum;
  // spread of the reducing constant against the direct one
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (std::size_t i = 0; i < red.values.size(); ++i) {
    lo = std::min(lo, red.values[i] / dir.values[i]);
    hi = std::max(hi, red.values[i] / dir.values[i]);
  }
  o.table.note("ratio_reducing_over_direct_min", lo);
  o.table.note("ratio_reducing_over_direct_max", hi);
  o.headline["ratio_min"] = lo;
  o.headline["ratio_max"] = hi;
  return o;
}

Outcome cmd_avgbound(const vlw::ExperimentConfig& cfg, std::uint64_t seed) {
  const vlw::MatrixField w = vlw::build_weight(cfg.weight, cfg.grid);
  const vlw::CubeFamily fam = vlw::build_family(cfg);
  const double ap = vlw::matrix_ap_constant(w, cfg.exponent, fam).supremum;
  Outcome o;
  o.table = vlw::CsvTable({"trial", "cube", "lhs", "rhs", "holds"});
  o.table.note("ap_constant", ap);
  int violations = 0;
  double worst = 0.0;
  for (int t = 0; t < cfg.trials; ++t) {
    const vlw::VectorField f = vlw::build_field(cfg.field, cfg.grid, w.dim, seed + static_cast<std::uint64_t>(t));
    for (std::size_t c = 0; c < fam.cubes.size(); ++c) {
      const vlw::AveragingCheck chk = vlw::averaging_bound_check(w, cfg.exponent, f, fam.cubes[c], ap);
      if (!chk.holds) ++violations;
      if (chk.rhs > 0.0) worst = std::max(worst, chk.lhs / chk.rhs);
      o.table.row({std::to_string(t), std::to_string(c), vlw::format_number(chk.lhs), vlw::format_number(chk.rhs),
                   chk.holds ? "1" : "0"});
    }
  }
  o.violated = violations > 0;
  o.headline = {{"ap_constant", ap}, {"violations", violations}, {"max_ratio", worst}};
  return o;
}

Outcome cmd_mollify(const vlw::ExperimentConfig& cfg, std::uint64_t seed) {
  const vlw::MatrixField w = vlw::build_weight(cfg.weight, cfg.grid);
  const vlw::VectorField f = vlw::build_field(cfg.field, cfg.grid, w.dim, seed);
  const double ap = vlw::matrix_ap_constant(w, cfg.exponent, vlw::build_family(cfg)).supremum;
  const double t0 = cfg.t0 > 0.0 ? cfg.t0 : box_side(cfg.grid) / 4.0;
  const double t_min = cfg.t_min > 0.0 ? cfg.t_min : 2.0 * cfg.grid.min_width();
  const vlw::IdentityStudy st =
      vlw::approximate_identity_study(w, cfg.exponent, f, vlw::geometric_schedule(t0, t_min, cfg.ratio), ap);
  Outcome o;
  o.table = vlw::CsvTable({"t", "error", "norm", "ratio"});
  o.table.note("ap_constant", ap);
  o.table.note("norm_f", st.norm_f);
  o.table.note("c_emp", st.c_emp);
  o.table.note("strictly_decreasing", st.strictly_decreasing ? "yes" : "no");
  for (const auto& r : st.rows) {
    o.table.row({vlw::format_number(r.t), vlw::format_number(r.error), vlw::format_number(r.norm),
                 vlw::format_number(r.ratio)});
  }
  o.headline = {{"ap_constant", ap},
                {"c_emp", st.c_emp},
                {"final_error", st.rows.empty() ? 0.0 : st.rows.back().error},
                {"strictly_decreasing", st.strictly_decreasing}};
  return o;
}

Outcome cmd_hw(const vlw::ExperimentConfig& cfg, std::uint64_t seed) {
  const vlw::MatrixField w = vlw::build_weight(cfg.weight, cfg.grid);
  const vlw::VectorField f = vlw::build_field(cfg.field, cfg.grid, w.dim, seed);
  vlw::SmoothingOptions opts;
  opts.shells = cfg.shells;
  opts.min_t = cfg.min_t;
  opts.domain = cfg.domain;
  const vlw::SmoothingResult res = vlw::smooth_approximate(f, w, cfg.exponent, cfg.epsilon, opts);
  std::vector<std::string> cols{"shell", "s", "t", "zero_error"};
  for (int j = 0; j < cfg.grid.dim(); ++j) cols.push_back("gradient_error_" + std::to_string(j));
  cols.insert(cols.end(), {"zero_budget", "gradient_budget", "total"});
  Outcome o;
  o.table = vlw::CsvTable(cols);
  o.table.note("epsilon", cfg.epsilon);
  o.table.note("error_total", res.error.total);
  o.table.note("error_sum_form", res.error_sum_form);
  bool budgets = true;
  for (const auto& r : res.shells) {
    std::vector<std::string> row{std::to_string(r.shell), vlw::format_number(r.s), vlw::format_number(r.t),
                                 vlw::format_number(r.zero_error)};
    double total = r.zero_error;
    budgets = budgets && r.zero_error < r.zero_budget;
    for (double e : r.gradient_errors) {
      row.push_back(vlw::format_number(e));
      total += e;
      budgets = budgets && e < r.gradient_budget;
    }
    row.insert(row.end(), {vlw::format_number(r.zero_budget), vlw::format_number(r.gradient_budget),
                           vlw::format_number(total)});
    o.table.row(row);
  }
  o.violated = !res.success || !budgets;
  o.headline = {{"error", res.error.total}, {"epsilon", cfg.epsilon}, {"success", res.success}};
  return o;
}

Outcome cmd_truncate(const vlw::ExperimentConfig& cfg, std::uint64_t seed) {
  const vlw::MatrixField w = vlw::build_weight(cfg.weight, cfg.grid);
  const vlw::VectorField g = vlw::build_field(cfg.field, cfg.grid, w.dim, seed);
  const vlw::TruncationResult res = vlw::truncate_to_compact(g, w, cfg.exponent, cfg.epsilon, cfg.k_max);
  Outcome o;
  o.table = vlw::CsvTable({"k", "zero_error", "gradient_error", "total", "max_grad_nu", "scaled_grad_nu"});
  o.table.note("epsilon", cfg.epsilon);
  o.table.note("k_star", std::to_string(res.k_star));
  o.table.note("envelope", res.envelope);
  o.table.note("monotone", res.monotone ? "yes" : "no");
  for (const auto& r : res.rows) {
    o.table.row({std::to_string(r.k), vlw::format_number(r.zero_error), vlw::format_number(r.gradient_error),
                 vlw::format_number(r.total), vlw::format_number(r.max_grad_nu),
                 vlw::format_number(r.scaled_grad_nu)});
  }
  o.headline = {{"k_star", res.k_star}, {"envelope", res.envelope}, {"monotone", res.monotone}};
  return o;
}

Outcome cmd_suite(const Run& run, std::uint64_t seed) {
  vlw::SuiteOptions opts;
  opts.seed = seed;
  opts.holder_constant = run.holder_constant;
  const auto results = vlw::run_suite(opts, [](const vlw::CriterionResult& r) {
    std::printf("%s\n", vlw::format_result(r).c_str());
    std::fflush(stdout);
  }, run.criteria);
  Outcome o;
  o.table = vlw::suite_table(results, opts);
  int passed = 0;
  json per = json::array();
  for (const auto& r : results) {
    passed += r.pass ? 1 : 0;
    per.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}});
  }
  o.violated = passed != static_cast<int>(results.size());
  o.headline = {{"passed", passed}, {"total", results.size()}, {"criteria", per}};
  return o;
}

json summary_base(const Run& run, std::uint64_t seed, const std::string& config_text) {
  json s;
  s["command"] = run.command;
  s["seed"] = seed;
  s["threads"] = vlw::thread_count();
  json info = json::object();
  for (const auto& [k, v] : vlw::build_info()) info[k] = v;
  s["versions"] = info;
  if (!run.config_path.empty()) {
    s["config_path"] = run.config_path.string();
    s["config"] = json::parse(config_text, nullptr, false);
  }
  if (run.holder_set) s["holder_constant"] = run.holder_constant;
  return s;
}

void write_summary(const Run& run, json summary) {
  std::ofstream out(run.out / "summary.json");
  out << summary.dump(2) << "\n";
}

int execute(Run& run) {
  const auto start = std::chrono::steady_clock::now();
  if (run.threads > 0) vlw::set_thread_count(run.threads);

  std::optional<vlw::ExperimentConfig> cfg;
  std::string config_text;
  try {
    if (run.command != "suite") {
      if (run.config_path.empty()) {
        std::fprintf(stderr, "vlw %s: --config is required\n", run.command.c_str());
        return kUsage;
      }
      cfg = vlw::load_config(run.config_path);
      config_text = cfg->source_text;
    } else if (!run.config_path.empty()) {
      cfg = vlw::load_config(run.config_path);
      config_text = cfg->source_text;
      if (!run.holder_set) run.holder_constant = cfg->holder_constant;
    }
  } catch (const vlw::Error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kUsage;
  }

  const std::uint64_t seed = run.seed ? *run.seed : (cfg && cfg->seed ? *cfg->seed : vlw::SuiteOptions{}.seed);
  json summary = summary_base(run, seed, config_text);

  std::error_code ec;
  fs::create_directories(run.out, ec);
  if (ec) {
    std::fprintf(stderr, "cannot create output directory %s: %s\n", run.out.string().c_str(),
                 ec.message().c_str());
    return kUsage;
  }

  Outcome o;
  try {
    if (run.command == "norm") o = cmd_norm(*cfg, seed);
    else if (run.command == "apconst") o = cmd_apconst(*cfg);
    else if (run.command == "reducing") o = cmd_reducing(*cfg);
    else if (run.command == "avgbound") o = cmd_avgbound(*cfg, seed);
    else if (run.command == "mollify") o = cmd_mollify(*cfg, seed);
    else if (run.command == "hw") o = cmd_hw(*cfg, seed);
    else if (run.command == "truncate") o = cmd_truncate(*cfg, seed);
    else o = cmd_suite(run, seed);
  } catch (const vlw::Error& e) {
    const bool config_kind = e.kind() == vlw::ErrorKind::config;
    const int code = config_kind ? kUsage : kNumerical;
    std::fprintf(stderr, "%s failed (%s): %s\n", kOperation.at(run.command).c_str(),
                 std::string(vlw::to_string(e.kind())).c_str(), e.what());
    summary["error"] = {{"operation", kOperation.at(run.command)},
                        {"kind", std::string(vlw::to_string(e.kind()))},
                        {"message", e.what()}};
    summary["exit_status"] = code;
    summary["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_summary(run, summary);
    return code;
  }

  stamp(o.table, run, seed);
  const fs::path csv = run.out / (run.command + ".csv");
  o.table.write(csv);
  const int code = o.violated ? kViolation : kOk;
  summary["results"] = o.headline;
  summary["csv"] = csv.string();
  summary["exit_status"] = code;
  summary["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_summary(run, summary);

  std::printf("%s: %s -> %s\n", run.command.c_str(), o.headline.dump().c_str(), csv.string().c_str());
  if (o.violated) std::fprintf(stderr, "%s: asserted inequality violated\n", run.command.c_str());
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variable-exponent spaces with matrix weights: norms, A_p constants, density checks"};
  app.set_version_flag("--version", std::string(vlw::kVersion));
  Run run;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", run.config_path, "experiment config (JSON)");
    sub->add_option("--out", run.out, "output directory")->capture_default_str();
    sub->add_option("--seed", run.seed, "seed, overrides the config");
    sub->add_option("--threads", run.threads, "OpenMP threads (0 keeps the runtime default)")
        ->check(CLI::NonNegativeNumber);
  };
  const std::vector<std::pair<std::string, std::string>> commands{
      {"norm", "Luxemburg norms of f and Wf, plus a Hoelder check"},
      {"apconst", "matrix A_p constant per cube of the family"},
      {"reducing", "A_p constant through reducing operators"},
      {"avgbound", "averaging-operator bound 4[W] over random fields"},
      {"mollify", "approximate-identity error study"},
      {"hw", "shell-wise smoothing approximation in W^{1,p}(W)"},
      {"truncate", "cut-off approximation to compact support"},
      {"suite", "acceptance criteria"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub);
    if (name == "suite") {
      sub->add_option("--holder-constant", run.holder_constant, "constant in the Hoelder criterion")
          ->each([&](const std::string&) { run.holder_set = true; });
      sub->add_option("--criteria", run.criteria, "subset of criterion ids (default: all)")
          ->check(CLI::Range(1, vlw::kCriterionCount));
    }
    sub->callback([&run, name = name] { run.command = name; });
  }
  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }
  if (run.command.empty()) {
    std::cerr << app.help();
    return kUsage;
  }
  return execute(run);
}
