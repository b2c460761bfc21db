#include "phiopt/io.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace phiopt::io {

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

Eigen::MatrixXd rows_to_matrix(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw ShapeError("TPM has no rows");
  const auto cols = rows.front().size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols)
      throw ShapeError("TPM row " + std::to_string(r) + " has " + std::to_string(rows[r].size()) +
                       " entries, row 0 has " + std::to_string(cols));
    for (std::size_t c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  }
  return m;
}

Tpm parse_tpm_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("TPM JSON: ") + e.what());
  }
  const json* body = &doc;
  std::optional<int> declared;
  if (doc.is_object()) {
    if (!doc.contains("tpm")) throw FormatError("TPM JSON object lacks a \"tpm\" field");
    body = &doc["tpm"];
    if (doc.contains("nodes")) {
      if (!doc["nodes"].is_number_integer()) throw FormatError("\"nodes\" must be an integer");
      declared = doc["nodes"].get<int>();
    }
  }
  if (!body->is_array()) throw FormatError("\"tpm\" must be an array of rows");
  std::vector<std::vector<double>> rows;
  for (const auto& row : *body) {
    if (!row.is_array()) throw FormatError("every TPM row must be an array");
    std::vector<double> r;
    for (const auto& v : row) {
      if (!v.is_number()) throw FormatError("TPM entries must be numbers");
      r.push_back(v.get<double>());
    }
    rows.push_back(std::move(r));
  }
  Tpm tpm = validate_tpm(rows_to_matrix(rows));
  if (declared && *declared != tpm.node_count())
    throw ShapeError("\"nodes\" is " + std::to_string(*declared) + " but the matrix has " +
                     std::to_string(tpm.node_count()) + " columns");
  return tpm;
}

Tpm parse_tpm_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream lines(text);
  std::string line;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::vector<double> r;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      const std::string t = trim(cell);
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(t, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (t.empty() || used != t.size())
        throw FormatError("line " + std::to_string(lineno) + ": '" + t + "' is not a number");
      r.push_back(v);
    }
    rows.push_back(std::move(r));
  }
  return validate_tpm(rows_to_matrix(rows));
}

json matrix_rows(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json node_list(NodeSet s) { return bits::members(s); }

json maybe(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

Tpm parse_tpm(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) throw FormatError("TPM input is empty");
  if (t.front() == '{' || t.front() == '[') return parse_tpm_json(t);
  return parse_tpm_csv(t);
}

Tpm read_tpm(const std::filesystem::path& path) { return parse_tpm(slurp(path)); }

SystemState parse_state(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("state JSON: ") + e.what());
  }
  if (!doc.is_array()) throw FormatError("state must be a JSON array of 0/1 values");
  std::vector<std::uint8_t> bits;
  for (const auto& v : doc) {
    if (!v.is_number_integer() || (v.get<int>() != 0 && v.get<int>() != 1))
      throw FormatError("state entries must be 0 or 1");
    bits.push_back(static_cast<std::uint8_t>(v.get<int>()));
  }
  return SystemState(std::move(bits));
}

SystemState read_state(const std::filesystem::path& path) { return parse_state(slurp(path)); }

json to_json(const Tpm& tpm) { return {{"nodes", tpm.node_count()}, {"tpm", matrix_rows(tpm.matrix())}}; }

json to_json(const ConnectivityMatrix& cm) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < cm.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < cm.cols(); ++c) row.push_back(static_cast<int>(cm(r, c)));
    rows.push_back(std::move(row));
  }
  return {{"cm", std::move(rows)}};
}

json to_json(const SystemState& state) {
  json out = json::array();
  for (auto b : state.bits()) out.push_back(static_cast<int>(b));
  return out;
}

json to_json(const SystemCut& cut) {
  return {{"severed_from", node_list(cut.severed_from)}, {"severed_to", node_list(cut.severed_to)}};
}

json to_json(const Concept& c) {
  return {{"mechanism", node_list(c.mechanism)},       {"phi", c.phi},
          {"cause_purview", node_list(c.cause.purview)}, {"effect_purview", node_list(c.effect.purview)},
          {"cause_phi", c.cause.phi},                   {"effect_phi", c.effect.phi}};
}

json to_json(const PhiResult& result) {
  json concepts = json::array();
  for (const auto& c : result.constellation.concepts) concepts.push_back(to_json(c));
  return {{"big_phi", result.big_phi},
          {"state", to_json(result.state)},
          {"mip_cut", to_json(result.mip_cut)},
          {"concepts", std::move(concepts)}};
}

json to_json(const EvalRecord& record) {
  return {{"iteration", record.iteration},
          {"dimension", record.dimension},
          {"feasible", record.feasible},
          {"phi", record.phi ? json(*record.phi) : json(nullptr)}};
}

json to_json(const DimensionPrior& prior) {
  return std::vector<double>(prior.theta.data(), prior.theta.data() + prior.theta.size());
}

json to_json(const Interval& interval) { return {maybe(interval.lower), maybe(interval.upper)}; }

json to_json(const PopulationStats& s) {
  return {{"node_count", s.node_count},
          {"sample_size", s.sample_size},
          {"feasible_count", s.phi_values.size()},
          {"infeasible_count", s.infeasible_count},
          {"infeasible_rate", s.infeasible_rate},
          {"feasible_only", {{"mean", maybe(s.mean)}, {"ci95", to_json(s.ci95)}}},
          {"infeasible_as_zero", {{"mean", maybe(s.mean_with_zeros)}, {"ci95", to_json(s.ci95_with_zeros)}}}};
}

json to_json(const TestReport& report, double alpha) {
  return {{"groups", {to_json(report.group_a), to_json(report.group_b)}},
          {"t", maybe(report.t_statistic)},
          {"p", report.p_value},
          {"dof", report.dof},
          {"alpha_decisions", {{"alpha", alpha}, {"reject_null", report.p_value < alpha}}}};
}

json to_json(const InferenceReport& report, double alpha) {
  json out = to_json(report.feasible_only, alpha);
  const auto& z = report.with_zeros;
  out["infeasible_as_zero"] = {{"t", maybe(z.t_statistic)},
                               {"p", z.p_value},
                               {"dof", z.dof},
                               {"alpha_decisions", {{"alpha", alpha}, {"reject_null", z.p_value < alpha}}}};
  return out;
}

std::string trajectory_jsonl(const SearchResult& result) {
  std::string out;
  for (const auto& rec : result.trajectory) out += to_json(rec).dump() + "\n";
  return out;
}

json prior_history_json(const SearchResult& result) {
  json out = json::array();
  for (const auto& p : result.prior_history) out.push_back(to_json(p));
  return out;
}

std::vector<double> mean_best_so_far(const std::vector<SearchResult>& runs) {
  std::vector<double> mean;
  for (const auto& run : runs) {
    const auto best = run.best_so_far();
    if (best.size() > mean.size()) mean.resize(best.size(), 0.0);
    for (std::size_t i = 0; i < best.size(); ++i) mean[i] += best[i];
  }
  for (double& v : mean) v /= static_cast<double>(runs.size());
  return mean;
}

std::string mean_trajectory_csv(const std::vector<TrajectorySeries>& series) {
  std::ostringstream out;
  out << std::setprecision(17) << "iteration,mean_best_phi,method\n";
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.mean_best_phi.size(); ++i) out << i << ',' << s.mean_best_phi[i] << ',' << s.method << '\n';
  return out.str();
}

std::string raw_values_csv(const std::vector<PopulationStats>& groups) {
  std::ostringstream out;
  out << std::setprecision(17) << "group,nodes,phi\n";
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (double v : groups[g].phi_values) out << g << ',' << groups[g].node_count << ',' << v << '\n';
  return out.str();
}

json to_json(const RunManifest& m) {
  return {{"command", m.command},
          {"config", m.config},
          {"seed", m.seed},
          {"tool_version", m.tool_version},
          {"started", m.started},
          {"finished", m.finished}};
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << text;
}

void write_json(const std::filesystem::path& path, const json& value) { write_text(path, value.dump(2) + "\n"); }

}  // namespace phiopt::io
