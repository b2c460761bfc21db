// phiopt: integrated information of small binary networks and search over TPMs.
//
// Exit codes: 0 ok, 1 bad flags or insufficient data, 2 invalid TPM or input
// file, 3 infeasible network or state, 4 node-count guardrail.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>

#include "phiopt/io.hpp"
#include "phiopt/search.hpp"
#include "phiopt/stats.hpp"
#include "phiopt/system.hpp"

#ifndef PHIOPT_VERSION
#define PHIOPT_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using namespace phiopt;
using io::json;

namespace {

constexpr double kAlpha = 0.01;

enum Exit { kOk = 0, kUsage = 1, kBadTpm = 2, kInfeasible = 3, kGuardrail = 4 };

struct Shared {
  std::string seed = std::to_string(kDefaultSeed);
  std::string out = "phiopt-out";
  int threads = 1;
  int max_nodes = kDefaultMaxNodes;

  std::uint64_t resolved_seed = kDefaultSeed;
};

void add_shared(CLI::App& cmd, Shared& s) {
  cmd.add_option("--seed", s.seed, "integer seed, or 'random'")->capture_default_str();
  cmd.add_option("--out", s.out, "output directory")->capture_default_str();
  cmd.add_option("--threads", s.threads, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  cmd.add_option("--max-nodes", s.max_nodes, "largest node count allowed")
      ->check(CLI::Range(1, kMaxNodes))
      ->capture_default_str();
}

void resolve_seed(Shared& s) {
  if (s.seed == "random") {
    std::random_device rd;
    s.resolved_seed = (static_cast<std::uint64_t>(rd()) << 32) | rd();
    return;
  }
  std::size_t used = 0;
  try {
    s.resolved_seed = std::stoull(s.seed, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.seed.size()) throw ConfigError("--seed must be an integer or 'random'");
}

std::pair<int, int> parse_pair(const std::string& text, const char* flag) {
  const auto colon = text.find(':');
  try {
    if (colon == std::string::npos) {
      const int v = std::stoi(text);
      return {v, v};
    }
    return {std::stoi(text.substr(0, colon)), std::stoi(text.substr(colon + 1))};
  } catch (const std::exception&) {
    throw ConfigError(std::string(flag) + " expects <a>:<b>, got '" + text + "'");
  }
}

std::vector<double> parse_floats(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("--prior expects comma-separated numbers, got '" + text + "'");
    }
  }
  return out;
}

SamplingMode parse_mode(const std::string& m) {
  if (m == "binary") return SamplingMode::Binary;
  if (m == "probabilistic") return SamplingMode::Probabilistic;
  throw ConfigError("--mode must be binary or probabilistic");
}

void write_manifest(const Shared& s, const std::string& command, const json& config, const std::string& started) {
  io::RunManifest m{command, config, s.resolved_seed, PHIOPT_VERSION, started, io::utc_timestamp()};
  io::write_json(fs::path(s.out) / "manifest.json", io::to_json(m));
}

// ---- phi ----

struct PhiArgs {
  Shared shared;
  std::string tpm_file;
  std::string state_file;
};

int run_phi(PhiArgs& a) {
  const std::string started = io::utc_timestamp();
  const Tpm tpm = io::read_tpm(a.tpm_file);
  if (tpm.node_count() > a.shared.max_nodes)
    throw BudgetError("network has " + std::to_string(tpm.node_count()) + " nodes, the limit is " +
                      std::to_string(a.shared.max_nodes));
  const Network net = make_network(tpm);
  SystemState state;
  if (!a.state_file.empty()) {
    state = io::read_state(a.state_file);
    if (state.size() != tpm.node_count())
      throw ShapeError("state has " + std::to_string(state.size()) + " entries, the TPM has " +
                       std::to_string(tpm.node_count()) + " nodes");
  } else {
    const FeasibilityReport report = first_feasible_state(net);
    if (!report.feasible) throw InfeasibleStateError("no state of the network is reachable");
    state = *report.first_feasible_state;
  }
  const PhiResult result = big_phi(net, state, PhiOptions{a.shared.max_nodes});

  std::printf("Phi        %.6f\n", result.big_phi);
  std::printf("state      %s\n", io::to_json(state).dump().c_str());
  std::printf("mip cut    %s -> %s\n", bits::to_string(result.mip_cut.severed_from).c_str(),
              bits::to_string(result.mip_cut.severed_to).c_str());
  std::printf("concepts   %zu\n", result.constellation.size());
  if (!result.constellation.empty()) {
    std::printf("  %-12s %-10s %-12s %-10s %-12s %-10s\n", "mechanism", "phi", "cause", "phi_c", "effect", "phi_e");
    for (const auto& c : result.constellation.concepts)
      std::printf("  %-12s %-10.6f %-12s %-10.6f %-12s %-10.6f\n", bits::to_string(c.mechanism).c_str(), c.phi,
                  bits::to_string(c.cause.purview).c_str(), c.cause.phi, bits::to_string(c.effect.purview).c_str(),
                  c.effect.phi);
  }

  json out = io::to_json(result);
  out["cm"] = io::to_json(net.cm)["cm"];
  io::write_json(fs::path(a.shared.out) / "phi_result.json", out);
  write_manifest(a.shared, "phi",
                 {{"tpm", a.tpm_file}, {"state", a.state_file.empty() ? json(nullptr) : json(a.state_file)},
                  {"max_nodes", a.shared.max_nodes}},
                 started);
  return kOk;
}

// ---- search ----

struct SearchArgs {
  Shared shared;
  std::vector<std::string> methods{"prior"};
  std::string nodes = "3:4";
  int iters = 50;
  int batch = 5;
  double mu = 0.1;
  double kappa = kDefaultSmoothing;
  std::string prior;
  int reps = 1;
  std::string mode = "binary";
  CLI::App* cmd = nullptr;
};

int run_search_cmd(SearchArgs& a) {
  const std::string started = io::utc_timestamp();
  std::vector<SearchMethod> methods;
  for (const auto& m : a.methods) methods.push_back(parse_method(m));
  const bool has_prior = std::find(methods.begin(), methods.end(), SearchMethod::Prior) != methods.end();
  for (const char* flag : {"--prior", "--mu", "--kappa", "--batch"})
    if (a.cmd->count(flag) && !has_prior)
      throw ConfigError(std::string(flag) + " only applies to --method prior");
  if (a.reps < 1) throw ConfigError("--reps must be positive");

  SearchConfig base;
  std::tie(base.d_min, base.d_max) = parse_pair(a.nodes, "--nodes");
  base.total_iters = a.iters;
  base.batch_size = has_prior ? a.batch : std::min(a.batch, a.iters);
  base.learning_rate = a.mu;
  base.smoothing = a.kappa;
  if (!a.prior.empty()) base.initial_prior = parse_floats(a.prior);
  base.mode = parse_mode(a.mode);
  base.max_nodes = a.shared.max_nodes;
  base.threads = a.shared.threads;
  validate(base);

  const fs::path out(a.shared.out);
  std::vector<io::TrajectorySeries> series;
  json summary = json::object();
  double overall = -1.0;
  std::optional<std::pair<Tpm, SystemState>> champion;

  for (SearchMethod method : methods) {
    const std::string name = to_string(method);
    std::vector<SearchResult> runs;
    json bests = json::array();
    for (int r = 0; r < a.reps; ++r) {
      SearchConfig cfg = base;
      cfg.seed = repetition_seed(a.shared.resolved_seed, method, r);
      SearchResult res = run_search(method, cfg);
      const std::string tag = methods.size() > 1 || a.reps > 1 ? name + "_rep" + std::to_string(r) : std::string();
      const auto file = [&](const std::string& stem, const std::string& ext) {
        return out / (tag.empty() ? stem + ext : stem + "_" + tag + ext);
      };
      io::write_text(file("trajectory", ".jsonl"), io::trajectory_jsonl(res));
      if (method == SearchMethod::Prior) io::write_json(file("prior_history", ".json"), io::prior_history_json(res));
      if (res.best_tpm && res.best_phi > overall) {
        overall = res.best_phi;
        champion.emplace(*res.best_tpm, *res.best_state);
      }
      bests.push_back(res.best_phi);
      std::printf("%-7s rep %-3d best Phi %.6f", name.c_str(), r, res.best_phi);
      if (method == SearchMethod::Prior) {
        const auto& theta = res.prior_history.back().theta;
        std::printf("  final prior [");
        for (Eigen::Index i = 0; i < theta.size(); ++i) std::printf(i ? ", %.4f" : "%.4f", theta[i]);
        std::printf("]");
      }
      std::printf("\n");
      runs.push_back(std::move(res));
    }
    const auto mean = io::mean_best_so_far(runs);
    series.push_back({name, mean});
    summary[name] = {{"best_phi_per_rep", bests}, {"mean_final_best_phi", mean.empty() ? 0.0 : mean.back()}};
    if (a.reps > 1) std::printf("%-7s mean final best Phi %.6f over %d reps\n", name.c_str(), mean.back(), a.reps);
  }

  if (a.reps > 1) io::write_text(out / "mean_trajectory.csv", io::mean_trajectory_csv(series));
  if (champion) {
    const Network net = make_network(champion->first);
    io::write_json(out / "best_tpm.json", io::to_json(champion->first));
    io::write_json(out / "best_cm.json", io::to_json(net.cm));
    io::write_json(out / "best_state.json", io::to_json(champion->second));
    std::printf("best Phi overall %.6f\n", overall);
  }
  io::write_json(out / "summary.json", summary);

  json cfg = {{"methods", a.methods},       {"d_min", base.d_min},         {"d_max", base.d_max},
              {"iters", base.total_iters},  {"batch", base.batch_size},    {"mu", base.learning_rate},
              {"kappa", base.smoothing},    {"prior", base.initial_prior}, {"reps", a.reps},
              {"mode", a.mode},             {"threads", a.shared.threads}, {"max_nodes", a.shared.max_nodes}};
  write_manifest(a.shared, "search", cfg, started);
  return kOk;
}

// ---- population ----

struct PopulationArgs {
  Shared shared;
  int nodes = 3;
  int samples = 100;
  std::string mode = "binary";
};

void print_group(const PopulationStats& s) {
  std::printf("nodes %d  N %d  infeasible %.2f%%\n", s.node_count, s.sample_size, 100.0 * s.infeasible_rate);
  std::printf("  feasible only       mean %.6f  95%% CI [%.6f, %.6f]\n", s.mean, s.ci95.lower, s.ci95.upper);
  std::printf("  infeasible as zero  mean %.6f  95%% CI [%.6f, %.6f]\n", s.mean_with_zeros, s.ci95_with_zeros.lower,
              s.ci95_with_zeros.upper);
}

int run_population(PopulationArgs& a) {
  const std::string started = io::utc_timestamp();
  const PopulationOptions opts{parse_mode(a.mode), a.shared.max_nodes, a.shared.threads};
  const PopulationStats s = sample_population(a.nodes, a.samples, a.shared.resolved_seed, opts);
  print_group(s);
  const fs::path out(a.shared.out);
  io::write_json(out / "population.json", io::to_json(s));
  io::write_text(out / "phi_values.csv", io::raw_values_csv({s}));
  write_manifest(a.shared, "population",
                 {{"nodes", a.nodes}, {"samples", a.samples}, {"mode", a.mode}, {"threads", a.shared.threads},
                  {"max_nodes", a.shared.max_nodes}},
                 started);
  return kOk;
}

// ---- compare ----

struct CompareArgs {
  Shared shared;
  std::string a = "3:100";
  std::string b = "4:100";
  std::string mode = "binary";
};

int run_compare(CompareArgs& a) {
  const std::string started = io::utc_timestamp();
  const auto [na, sa] = parse_pair(a.a, "--a");
  const auto [nb, sb] = parse_pair(a.b, "--b");
  const PopulationOptions opts{parse_mode(a.mode), a.shared.max_nodes, a.shared.threads};
  const InferenceReport report = run_inference_experiment({na, sa}, {nb, sb}, a.shared.resolved_seed, opts);
  const TestReport& t = report.feasible_only;
  print_group(t.group_a);
  print_group(t.group_b);
  std::printf("Welch t %.4f  dof %.2f  p %.3g  -> %s at alpha %.2f\n", t.t_statistic, t.dof, t.p_value,
              t.p_value < kAlpha ? "reject equal means" : "fail to reject", kAlpha);
  const fs::path out(a.shared.out);
  io::write_json(out / "compare.json", io::to_json(report, kAlpha));
  io::write_text(out / "phi_values.csv", io::raw_values_csv({t.group_a, t.group_b}));
  write_manifest(a.shared, "compare",
                 {{"a", a.a}, {"b", a.b}, {"mode", a.mode}, {"threads", a.shared.threads},
                  {"max_nodes", a.shared.max_nodes}},
                 started);
  return kOk;
}

int exit_code_for(const std::exception_ptr& ep) {
  try {
    std::rethrow_exception(ep);
  } catch (const BudgetError& e) {
    std::fprintf(stderr, "guardrail: %s\n", e.what());
    return kGuardrail;
  } catch (const InfeasibleStateError& e) {
    std::fprintf(stderr, "infeasible: %s\n", e.what());
    return kInfeasible;
  } catch (const ShapeError& e) {
    std::fprintf(stderr, "invalid TPM shape: %s\n", e.what());
    return kBadTpm;
  } catch (const RangeError& e) {
    std::fprintf(stderr, "invalid TPM entry: %s\n", e.what());
    return kBadTpm;
  } catch (const FormatError& e) {
    std::fprintf(stderr, "unreadable input: %s\n", e.what());
    return kBadTpm;
  } catch (const InsufficientDataError& e) {
    std::fprintf(stderr, "insufficient data: %s\n", e.what());
    return kUsage;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "bad flags: %s\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Integrated information (Phi) of binary networks and search over TPMs"};
  app.set_version_flag("--version", PHIOPT_VERSION);
  app.set_config("--config", "", "TOML/INI file with flag values; command-line flags take precedence");
  app.require_subcommand(1);

  PhiArgs phi;
  auto* phi_cmd = app.add_subcommand("phi", "Phi of a TPM file at a given or first reachable state");
  add_shared(*phi_cmd, phi.shared);
  phi_cmd->add_option("tpm", phi.tpm_file, "TPM file (JSON or CSV)")->required();
  phi_cmd->add_option("--state", phi.state_file, "state file (JSON array)");

  SearchArgs search;
  auto* search_cmd = app.add_subcommand("search", "Search TPMs for high Phi");
  search.cmd = search_cmd;
  add_shared(*search_cmd, search.shared);
  search_cmd->add_option("--method", search.methods, "prior, random or grid (comma list allowed)")
      ->delimiter(',')
      ->check(CLI::IsMember({"prior", "random", "grid"}))
      ->capture_default_str();
  search_cmd->add_option("--nodes", search.nodes, "node range min:max")->capture_default_str();
  search_cmd->add_option("--iters", search.iters, "iterations per run")->check(CLI::PositiveNumber)->capture_default_str();
  search_cmd->add_option("--batch", search.batch, "iterations per prior update")->check(CLI::PositiveNumber)->capture_default_str();
  search_cmd->add_option("--mu", search.mu, "prior learning rate")->capture_default_str();
  search_cmd->add_option("--kappa", search.kappa, "prior smoothing")->capture_default_str();
  search_cmd->add_option("--prior", search.prior, "initial prior, comma separated (default uniform)");
  search_cmd->add_option("--reps", search.reps, "independent repetitions")->check(CLI::PositiveNumber)->capture_default_str();
  search_cmd->add_option("--mode", search.mode, "binary or probabilistic TPMs")
      ->check(CLI::IsMember({"binary", "probabilistic"}))
      ->capture_default_str();

  PopulationArgs pop;
  auto* pop_cmd = app.add_subcommand("population", "Mean Phi of random TPMs with a 95% interval");
  add_shared(*pop_cmd, pop.shared);
  pop_cmd->add_option("--nodes", pop.nodes, "node count")->check(CLI::PositiveNumber)->capture_default_str();
  pop_cmd->add_option("--samples", pop.samples, "number of TPMs")->capture_default_str();
  pop_cmd->add_option("--mode", pop.mode, "binary or probabilistic TPMs")
      ->check(CLI::IsMember({"binary", "probabilistic"}))
      ->capture_default_str();

  CompareArgs cmp;
  auto* cmp_cmd = app.add_subcommand("compare", "Welch test between two random populations");
  add_shared(*cmp_cmd, cmp.shared);
  cmp_cmd->add_option("--a", cmp.a, "first group nodes:N")->capture_default_str();
  cmp_cmd->add_option("--b", cmp.b, "second group nodes:N")->capture_default_str();
  cmp_cmd->add_option("--mode", cmp.mode, "binary or probabilistic TPMs")
      ->check(CLI::IsMember({"binary", "probabilistic"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*phi_cmd) {
      resolve_seed(phi.shared);
      return run_phi(phi);
    }
    if (*search_cmd) {
      resolve_seed(search.shared);
      return run_search_cmd(search);
    }
    if (*pop_cmd) {
      resolve_seed(pop.shared);
      return run_population(pop);
    }
    resolve_seed(cmp.shared);
    return run_compare(cmp);
  } catch (...) {
    return exit_code_for(std::current_exception());
  }
}
