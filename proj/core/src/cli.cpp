#include "specfic/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "specfic/version.hpp"

namespace specfic {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

[[noreturn]] void config_fail(const std::string& message) {
  throw ConfigError("config: " + message);
}

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& where) {
  if (!obj.is_object()) config_fail(where + " must be an object");
  for (const auto& item : obj.items())
    if (!allowed.count(item.key()))
      config_fail("unknown key '" + item.key() + "' in " + where);
}

CandidateSpec parse_candidate(const json& j, const std::string& where) {
  check_keys(j, {"family", "order", "ar_order", "ma_order", "label"}, where);
  CandidateSpec spec;
  if (!j.contains("family")) config_fail(where + ": missing 'family'");
  spec.family = j.at("family").get<std::string>();
  if (spec.family == "ar") {
    spec.ar = j.value("order", 0);
  } else if (spec.family == "ma") {
    spec.ma = j.value("order", 1);
  } else if (spec.family == "arma") {
    spec.ar = j.value("ar_order", 1);
    spec.ma = j.value("ma_order", 1);
  } else if (spec.family != "np") {
    config_fail(where + ": unknown family '" + spec.family +
                "' (expected ar, ma, arma or np)");
  }
  if (j.contains("label")) spec.label = j.at("label").get<std::string>();
  return spec;
}

FocusSpec parse_focus(const json& j, const std::string& where) {
  check_keys(j, {"type", "lag", "a", "b", "threshold", "cond_values"}, where);
  FocusSpec spec;
  if (!j.contains("type")) config_fail(where + ": missing 'type'");
  spec.type = j.at("type").get<std::string>();
  if (spec.type == "lag_cov" || spec.type == "lag_corr") {
    spec.lag = j.value("lag", spec.type == "lag_corr" ? 1 : 0);
  } else if (spec.type == "band_mass") {
    if (!j.contains("a") || !j.contains("b"))
      config_fail(where + ": band_mass needs 'a' and 'b'");
    spec.a = j.at("a").get<double>();
    spec.b = j.at("b").get<double>();
  } else if (spec.type == "threshold_prob") {
    if (!j.contains("threshold") || !j.contains("cond_values"))
      config_fail(where + ": threshold_prob needs 'threshold' and 'cond_values'");
    spec.threshold = j.at("threshold").get<double>();
    spec.cond_values = j.at("cond_values").get<std::vector<double>>();
  } else {
    config_fail(where + ": unknown focus '" + spec.type +
                "'; available constructors: lag_cov, lag_corr, band_mass, "
                "threshold_prob");
  }
  return spec;
}

json candidate_to_json(const CandidateSpec& c) {
  json j;
  j["family"] = c.family;
  if (c.family == "ar") j["order"] = c.ar;
  if (c.family == "ma") j["order"] = c.ma;
  if (c.family == "arma") {
    j["ar_order"] = c.ar;
    j["ma_order"] = c.ma;
  }
  if (c.label) j["label"] = *c.label;
  return j;
}

json focus_to_json(const FocusSpec& f) {
  json j;
  j["type"] = f.type;
  if (f.type == "lag_cov" || f.type == "lag_corr") j["lag"] = f.lag;
  if (f.type == "band_mass") {
    j["a"] = f.a;
    j["b"] = f.b;
  }
  if (f.type == "threshold_prob") {
    j["threshold"] = f.threshold;
    j["cond_values"] = f.cond_values;
  }
  return j;
}

}  // namespace

RunConfig RunConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    config_fail(std::string("invalid JSON: ") + e.what());
  }
  check_keys(j,
             {"command", "input", "out", "candidates", "focus", "foci",
              "weights", "detrend", "truth", "comparators", "seed", "B", "n",
              "workers", "quad_nodes", "figure", "version"},
             "config");
  RunConfig cfg;
  cfg.command = j.value("command", "");
  cfg.input = j.value("input", "");
  cfg.out = j.value("out", cfg.out);
  if (j.contains("candidates")) {
    if (!j["candidates"].is_array()) config_fail("'candidates' must be a list");
    int idx = 0;
    for (const json& c : j["candidates"])
      cfg.candidates.push_back(
          parse_candidate(c, "candidates[" + std::to_string(idx++) + "]"));
  }
  if (j.contains("focus") && j.contains("foci"))
    config_fail("give either 'focus' or 'foci', not both");
  if (j.contains("focus")) cfg.foci.push_back(parse_focus(j["focus"], "focus"));
  if (j.contains("foci")) {
    int idx = 0;
    for (const json& f : j["foci"])
      cfg.foci.push_back(parse_focus(f, "foci[" + std::to_string(idx++) + "]"));
  }
  if (j.contains("weights"))
    cfg.weights = j.at("weights").get<std::vector<double>>();
  if (j.contains("detrend")) {
    const json& d = j["detrend"];
    DetrendSpec spec;
    if (d.is_string()) {
      spec.kind = d.get<std::string>();
    } else {
      check_keys(d, {"kind", "periods", "path"}, "detrend");
      spec.kind = d.value("kind", "");
      if (d.contains("periods"))
        spec.periods = d.at("periods").get<std::vector<int>>();
      spec.path = d.value("path", "");
    }
    cfg.detrend = std::move(spec);
  }
  if (j.contains("truth")) {
    const json& t = j["truth"];
    check_keys(t, {"family", "order", "ar_order", "ma_order", "label", "theta"},
               "truth");
    TruthSpec truth;
    json fam = t;
    fam.erase("theta");
    truth.family = parse_candidate(fam, "truth");
    if (!t.contains("theta")) config_fail("truth: missing 'theta'");
    truth.theta = t.at("theta").get<std::vector<double>>();
    cfg.truth = std::move(truth);
  }
  if (j.contains("comparators"))
    cfg.comparators = j.at("comparators").get<std::vector<std::string>>();
  cfg.seed = j.value("seed", cfg.seed);
  cfg.B = j.value("B", cfg.B);
  cfg.n = j.value("n", cfg.n);
  cfg.workers = j.value("workers", cfg.workers);
  if (j.contains("quad_nodes")) cfg.quad_nodes = j.at("quad_nodes").get<int>();
  cfg.figure = j.value("figure", "");
  return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) config_fail("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json_text(buffer.str());
}

std::string RunConfig::to_json_text(int indent) const {
  json j;
  j["command"] = command;
  if (!input.empty()) j["input"] = input;
  j["out"] = out;
  if (!candidates.empty()) {
    j["candidates"] = json::array();
    for (const CandidateSpec& c : candidates)
      j["candidates"].push_back(candidate_to_json(c));
  }
  if (!foci.empty()) {
    j["foci"] = json::array();
    for (const FocusSpec& f : foci) j["foci"].push_back(focus_to_json(f));
  }
  if (!weights.empty()) j["weights"] = weights;
  if (detrend) {
    json d;
    d["kind"] = detrend->kind;
    if (!detrend->periods.empty()) d["periods"] = detrend->periods;
    if (!detrend->path.empty()) d["path"] = detrend->path;
    j["detrend"] = d;
  }
  if (truth) {
    json t = candidate_to_json(truth->family);
    t["theta"] = truth->theta;
    j["truth"] = t;
  }
  if (!comparators.empty()) j["comparators"] = comparators;
  j["seed"] = seed;
  j["B"] = B;
  j["n"] = n;
  j["workers"] = workers;
  if (quad_nodes) j["quad_nodes"] = *quad_nodes;
  if (!figure.empty()) j["figure"] = figure;
  j["version"] = kVersion;
  return j.dump(indent) + "\n";
}

// ---------------------------------------------------------------------------
// CSV ingestion
// ---------------------------------------------------------------------------

namespace {

bool parse_cell(std::string cell, double& value) {
  // tolerate CR from CRLF files and surrounding blanks
  while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' '))
    cell.pop_back();
  std::size_t pos = 0;
  while (pos < cell.size() && cell[pos] == ' ') ++pos;
  cell.erase(0, pos);
  if (cell.empty()) return false;
  try {
    std::size_t used = 0;
    value = std::stod(cell, &used);
    return used == cell.size();
  } catch (...) {
    return false;
  }
}

}  // namespace

TimeSeries ingest_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("csv: cannot open '" + path + "'");
  TimeSeries series;
  std::string line;
  int row = 0;
  bool first_content_line = true;
  while (std::getline(in, line)) {
    ++row;
    std::string trimmed = line;
    while (!trimmed.empty() &&
           (trimmed.back() == '\r' || trimmed.back() == ' '))
      trimmed.pop_back();
    if (trimmed.empty()) continue;
    double value = 0.0;
    if (!parse_cell(trimmed, value)) {
      if (first_content_line) {  // header
        first_content_line = false;
        continue;
      }
      throw ParseError("csv: non-numeric cell at row " + std::to_string(row) +
                       " of '" + path + "'");
    }
    first_content_line = false;
    if (!std::isfinite(value))
      throw ParseError("csv: non-finite value at row " + std::to_string(row) +
                       " of '" + path + "'");
    series.values.push_back(value);
  }
  if (series.values.empty())
    throw ParseError("csv: no numeric data in '" + path + "'");
  return series;
}

Eigen::MatrixXd load_design_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("csv: cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  int row = 0;
  bool maybe_header = true;
  while (std::getline(in, line)) {
    ++row;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
      line.pop_back();
    if (line.empty()) continue;
    std::vector<double> cells;
    std::stringstream ss(line);
    std::string cell;
    bool ok = true;
    while (std::getline(ss, cell, ',')) {
      double value = 0.0;
      if (!parse_cell(cell, value)) {
        ok = false;
        break;
      }
      if (!std::isfinite(value))
        throw ParseError("csv: non-finite value at row " +
                         std::to_string(row) + " of '" + path + "'");
      cells.push_back(value);
    }
    if (!ok) {
      if (maybe_header) {
        maybe_header = false;
        continue;
      }
      throw ParseError("csv: non-numeric cell at row " + std::to_string(row) +
                       " of '" + path + "'");
    }
    maybe_header = false;
    if (!rows.empty() && cells.size() != rows.front().size())
      throw ParseError("csv: ragged row " + std::to_string(row) + " in '" +
                       path + "'");
    rows.push_back(std::move(cells));
  }
  if (rows.empty()) throw ParseError("csv: no numeric data in '" + path + "'");
  Eigen::MatrixXd X(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows.front().size(); ++j) X(i, j) = rows[i][j];
  return X;
}

// ---------------------------------------------------------------------------
// Spec materialization
// ---------------------------------------------------------------------------

ParametricSpectralFamily family_from_spec(const CandidateSpec& spec) {
  if (spec.family == "np")
    config_fail("nonparametric entry where a parametric family is required");
  return make_arma_family(spec.ar, spec.ma);
}

CandidateModel candidate_from_spec(const CandidateSpec& spec) {
  if (spec.family == "np")
    return CandidateModel::nonparametric(spec.label.value_or("NP"));
  return CandidateModel::parametric(family_from_spec(spec),
                                    spec.label.value_or(""));
}

FocusFunctional focus_from_spec(const FocusSpec& spec) {
  if (spec.type == "lag_cov") return focus_lag_cov(spec.lag);
  if (spec.type == "lag_corr") return focus_lag_corr(spec.lag);
  if (spec.type == "band_mass") return focus_band_mass(spec.a, spec.b);
  if (spec.type == "threshold_prob")
    return focus_threshold_prob(spec.threshold, spec.cond_values);
  config_fail("unknown focus '" + spec.type +
              "'; available constructors: lag_cov, lag_corr, band_mass, "
              "threshold_prob");
}

TrendDesign design_from_spec(const DetrendSpec& spec, int n) {
  if (spec.kind == "mean_only") return TrendDesign::mean_only(n);
  if (spec.kind == "linear_time") return TrendDesign::linear_time(n);
  if (spec.kind == "harmonic") return TrendDesign::harmonic(n, spec.periods);
  if (spec.kind == "custom") {
    if (spec.path.empty()) config_fail("custom detrend design needs 'path'");
    return TrendDesign::custom(load_design_csv(spec.path));
  }
  config_fail("unknown detrend kind '" + spec.kind +
              "' (expected mean_only, linear_time, harmonic, custom)");
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

namespace {

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << content;
}

fs::path prepare_out_dir(const RunConfig& cfg) {
  fs::path dir(cfg.out);
  fs::create_directories(dir);
  write_file(dir / "resolved_config.json", cfg.to_json_text());
  return dir;
}

TimeSeries load_input_series(const RunConfig& cfg) {
  if (cfg.input.empty()) config_fail("command needs 'input'");
  TimeSeries y = ingest_csv(cfg.input);
  if (cfg.detrend) y = detrend_pipeline(y, design_from_spec(*cfg.detrend, y.n()));
  return y;
}

QuadratureRule rule_for(const RunConfig& cfg, int n) {
  return cfg.quad_nodes
             ? QuadratureRule::composite_gauss_legendre(*cfg.quad_nodes)
             : default_quadrature(n);
}

void print_report(const FicReport& report, std::ostream& os) {
  os << report.criterion << " scores for " << report.focus_name
     << " (n=" << report.n << ")\n";
  std::vector<const FicRow*> ordered;
  for (const FicRow& row : report.rows) ordered.push_back(&row);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const FicRow* a, const FicRow* b) {
                     const int ra = a->rank < 0 ? 1 << 20 : a->rank;
                     const int rb = b->rank < 0 ? 1 << 20 : b->rank;
                     return ra < rb;
                   });
  for (const FicRow* row : ordered) {
    if (row->error) {
      os << "  --  " << row->candidate << "  ERROR: " << *row->error << "\n";
    } else {
      os << "  #" << row->rank << "  " << row->candidate
         << "  fic=" << row->fic << "  mu_hat=" << row->mu_hat << "\n";
    }
  }
}

int cmd_fit(const RunConfig& cfg, std::ostream& os) {
  if (cfg.candidates.size() != 1 || cfg.candidates[0].family == "np")
    config_fail("fit: give exactly one parametric candidate");
  const fs::path dir = prepare_out_dir(cfg);
  const TimeSeries y = load_input_series(cfg);
  const QuadratureRule q = rule_for(cfg, y.n());
  FitOptions opts;
  opts.compute_gaussian_loglik = y.n() <= 5000;
  const FitResult fit =
      fit_whittle(y, family_from_spec(cfg.candidates[0]), q, opts);
  json j;
  j["family"] = fit.family.label();
  j["theta_hat"] = std::vector<double>(
      fit.theta_hat.values.data(),
      fit.theta_hat.values.data() + fit.theta_hat.values.size());
  j["whittle_loglik"] = fit.whittle_loglik;
  if (fit.gaussian_loglik) {
    j["gaussian_loglik"] = *fit.gaussian_loglik;
    const auto [aic, bic] = aic_bic(fit, y.n());
    j["aic"] = aic;
    j["bic"] = bic;
  }
  j["converged"] = fit.converged;
  j["iterations"] = fit.iterations;
  j["gradient_norm"] = fit.gradient_norm;
  j["n"] = y.n();
  j["quad_size"] = q.size();
  j["version"] = kVersion;
  write_file(dir / "fit.json", j.dump(2) + "\n");
  os << "fit " << fit.family.label() << ": theta_hat = [";
  for (int i = 0; i < fit.theta_hat.values.size(); ++i)
    os << (i ? ", " : "") << fit.theta_hat.values[i];
  os << "], converged=" << (fit.converged ? "yes" : "no") << "\n";
  return 0;
}

int cmd_fic(const RunConfig& cfg, std::ostream& os) {
  if (cfg.candidates.empty()) config_fail("fic: needs 'candidates'");
  if (cfg.foci.size() != 1) config_fail("fic: needs exactly one 'focus'");
  const fs::path dir = prepare_out_dir(cfg);
  const TimeSeries y = load_input_series(cfg);
  const QuadratureRule q = rule_for(cfg, y.n());
  std::vector<CandidateModel> candidates;
  for (const CandidateSpec& c : cfg.candidates)
    candidates.push_back(candidate_from_spec(c));
  const FicReport report =
      fic_scores(y, candidates, focus_from_spec(cfg.foci[0]), q);
  write_file(dir / "report.json", report_to_json(report));
  write_file(dir / "report.csv", report_to_csv(report));
  print_report(report, os);
  for (const FicRow& row : report.rows)
    if (row.error) return 2;
  return 0;
}

int cmd_afic(const RunConfig& cfg, std::ostream& os) {
  if (cfg.candidates.empty()) config_fail("afic: needs 'candidates'");
  if (cfg.foci.empty()) config_fail("afic: needs 'foci'");
  if (!cfg.weights.empty() && cfg.weights.size() != cfg.foci.size())
    config_fail("afic: 'weights' must align with 'foci'");
  const fs::path dir = prepare_out_dir(cfg);
  const TimeSeries y = load_input_series(cfg);
  const QuadratureRule q = rule_for(cfg, y.n());
  std::vector<CandidateModel> candidates;
  for (const CandidateSpec& c : cfg.candidates)
    candidates.push_back(candidate_from_spec(c));
  AficWeights weights;
  for (std::size_t u = 0; u < cfg.foci.size(); ++u)
    weights.items.push_back({focus_from_spec(cfg.foci[u]),
                             cfg.weights.empty() ? 1.0 : cfg.weights[u]});
  const FicReport report = afic_scores(y, candidates, weights, q);
  write_file(dir / "report.json", report_to_json(report));
  write_file(dir / "report.csv", report_to_csv(report));
  print_report(report, os);
  for (const FicRow& row : report.rows)
    if (row.error) return 2;
  return 0;
}

TruthSpec require_truth(const RunConfig& cfg) {
  if (!cfg.truth) config_fail("command needs 'truth'");
  return *cfg.truth;
}

std::pair<ParametricSpectralFamily, Eigen::VectorXd> truth_model(
    const RunConfig& cfg) {
  const TruthSpec t = require_truth(cfg);
  ParametricSpectralFamily family = family_from_spec(t.family);
  if (static_cast<int>(t.theta.size()) != family.param_dim())
    config_fail("truth: theta has wrong dimension for " + family.label());
  Eigen::VectorXd theta(t.theta.size());
  for (std::size_t i = 0; i < t.theta.size(); ++i) theta[i] = t.theta[i];
  if (!family.in_constraint_region(theta))
    config_fail("truth: theta outside the constraint region of " +
                family.label());
  return {std::move(family), std::move(theta)};
}

int cmd_simulate(const RunConfig& cfg, std::ostream& os) {
  const fs::path dir = prepare_out_dir(cfg);
  auto [family, theta] = truth_model(cfg);
  if (cfg.n < 1) config_fail("simulate: needs 'n'");
  const QuadratureRule q = rule_for(cfg, cfg.n);
  const TimeSeries y =
      sample_gaussian(family.spectral_density(theta), cfg.n, cfg.seed, q);
  std::string csv = "value\n";
  for (double v : y.values) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g\n", v);
    csv += buf;
  }
  write_file(dir / "series.csv", csv);
  os << "simulated " << cfg.n << " observations from " << family.label()
     << " (seed " << cfg.seed << ")\n";
  return 0;
}

SimSpec sim_spec_from_config(const RunConfig& cfg) {
  auto [family, theta] = truth_model(cfg);
  SimSpec spec{std::move(family), ParamVector::natural(theta), cfg.n,
               cfg.B, cfg.seed, {}, {}, {}, cfg.workers, cfg.quad_nodes};
  if (cfg.candidates.empty()) config_fail("mc: needs 'candidates'");
  for (const CandidateSpec& c : cfg.candidates)
    spec.candidates.push_back(candidate_from_spec(c));
  if (cfg.foci.empty()) config_fail("mc: needs 'foci'");
  for (const FocusSpec& f : cfg.foci)
    spec.foci.push_back(focus_from_spec(f));
  for (const std::string& name : cfg.comparators) {
    if (name == "fic") spec.comparators.push_back(Comparator::kFic);
    else if (name == "aic") spec.comparators.push_back(Comparator::kAic);
    else if (name == "bic") spec.comparators.push_back(Comparator::kBic);
    else if (name == "always_np")
      spec.comparators.push_back(Comparator::kAlwaysNp);
    else
      config_fail("unknown comparator '" + name +
                  "' (expected fic, aic, bic, always_np)");
  }
  return spec;
}

int cmd_mc(const RunConfig& cfg, std::ostream& os) {
  const fs::path dir = prepare_out_dir(cfg);
  const McResult result = run_mc(sim_spec_from_config(cfg));
  write_file(dir / "mc_result.json", mc_result_to_json(result));
  write_file(dir / "mc_result.csv", mc_result_to_csv(result));
  os << "mc: " << result.replications << " replications, "
     << result.aborted << " aborted; results in " << dir.string() << "\n";
  return 0;
}

int cmd_least_false(const RunConfig& cfg, std::ostream& os) {
  const fs::path dir = prepare_out_dir(cfg);
  auto [family, theta] = truth_model(cfg);
  if (cfg.candidates.empty()) config_fail("least-false: needs 'candidates'");
  const int n_rule = cfg.n >= 1 ? cfg.n : 128;
  const QuadratureRule q = rule_for(cfg, n_rule);
  std::vector<ParametricSpectralFamily> families;
  for (const CandidateSpec& c : cfg.candidates) {
    if (c.family == "np") continue;  // least-false is a parametric notion
    families.push_back(family_from_spec(c));
  }
  const int max_lag = 10;
  const auto rows =
      least_false_table(family.spectral_density(theta), families, max_lag, q);
  json j;
  j["truth"] = family.label();
  j["version"] = kVersion;
  j["rows"] = json::array();
  std::string csv = "family,lag,value\n";
  for (const LeastFalseRow& row : rows) {
    json r;
    r["family"] = row.family_label;
    r["converged"] = row.converged;
    r["discrepancy"] = row.discrepancy;
    r["theta0"] = std::vector<double>(row.theta0.data(),
                                      row.theta0.data() + row.theta0.size());
    r["autocov"] = row.autocov;
    j["rows"].push_back(r);
    for (std::size_t k = 0; k < row.autocov.size(); ++k) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.17g", row.autocov[k]);
      csv += row.family_label + "," + std::to_string(k) + "," + buf + "\n";
    }
  }
  write_file(dir / "least_false.json", j.dump(2) + "\n");
  write_file(dir / "least_false.csv", csv);
  os << "least-false table for " << rows.size() << " families written to "
     << dir.string() << "\n";
  return 0;
}

// Built-in study designs behind the reproduce command.
RunConfig figure_config(const std::string& figure, const RunConfig& overrides) {
  RunConfig cfg = overrides;
  cfg.command = "reproduce";
  cfg.figure = figure;
  if (figure == "fig1") {
    cfg.truth = TruthSpec{{"ar", 4, 0, std::nullopt},
                          {0.2, 0.2, -0.1, -0.2, 1.30}};
    cfg.n = 100;
  } else if (figure == "fig3" || figure == "fig4" || figure == "fig5" ||
             figure == "fig6") {
    cfg.truth = TruthSpec{{"ar", 2, 0, std::nullopt}, {0.7, -0.6, 1.0}};
    cfg.n = 100;
    cfg.candidates = {{"ar", 0, 0, std::nullopt},
                      {"ar", 1, 0, std::nullopt},
                      {"ar", 2, 0, std::nullopt},
                      {"ma", 0, 1, std::nullopt},
                      {"np", 0, 0, std::nullopt}};
    cfg.foci.clear();
    for (int k = 0; k <= 5; ++k) {
      FocusSpec f;
      f.type = "lag_cov";
      f.lag = k;
      cfg.foci.push_back(std::move(f));
    }
    cfg.comparators = {"always_np", "fic", "aic", "bic"};
  } else {
    config_fail("unknown figure '" + figure +
                "' (expected fig1, fig3, fig4, fig5, fig6)");
  }
  return cfg;
}

int reproduce_fig1(const RunConfig& cfg, std::ostream& os) {
  const fs::path dir = prepare_out_dir(cfg);
  auto [family, theta] = truth_model(cfg);
  const SpectralDensity g = family.spectral_density(theta);
  const QuadratureRule q = rule_for(cfg, cfg.n);
  const TimeSeries y = sample_gaussian(g, cfg.n, cfg.seed, q);
  const EmpiricalSpectrum spec(y, q);

  std::string curve = "omega,spectrum,periodogram\n";
  const int grid = 512;
  for (int i = 0; i < grid; ++i) {
    const double w = (i + 0.5) * kPi / grid;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%.10g\n", w, g(w),
                  spec.evaluate(w));
    curve += buf;
  }
  write_file(dir / "fig1_spectrum.csv", curve);

  // Three equal-width bands over [0, pi), the shaded focus regions.
  json bands = json::array();
  for (int j = 0; j < 3; ++j) {
    const double a = j * kPi / 3.0, b = (j + 1) * kPi / 3.0;
    const FocusFunctional focus = focus_band_mass(a, std::min(b, kPi));
    const double mu = 2.0 * q.integrate([&](double w) {
      return focus.weights()[0].even(w) * g(w);
    });
    json entry;
    entry["a"] = a;
    entry["b"] = b;
    entry["mu_true"] = mu;
    bands.push_back(entry);
  }
  json j;
  j["figure"] = "fig1";
  j["truth"] = family.label();
  j["n"] = cfg.n;
  j["seed"] = cfg.seed;
  j["bands"] = bands;
  j["version"] = kVersion;
  write_file(dir / "fig1_summary.json", j.dump(2) + "\n");
  os << "fig1 artifacts written to " << dir.string() << "\n";
  return 0;
}

int reproduce_fig4(const RunConfig& cfg, std::ostream& os) {
  RunConfig lf = cfg;
  lf.candidates = {{"ar", 0, 0, std::nullopt},
                   {"ar", 1, 0, std::nullopt},
                   {"ar", 2, 0, std::nullopt},
                   {"ma", 0, 1, std::nullopt}};
  return cmd_least_false(lf, os);
}

int reproduce_mc_figure(const RunConfig& cfg, std::ostream& os) {
  const fs::path dir = prepare_out_dir(cfg);
  const McResult result = run_mc(sim_spec_from_config(cfg));
  write_file(dir / "mc_result.json", mc_result_to_json(result));
  write_file(dir / "mc_result.csv", mc_result_to_csv(result));

  const int F = static_cast<int>(result.focus_names.size());
  const int C = static_cast<int>(result.candidate_labels.size());
  int np_idx = -1, ar2_idx = -1;
  for (int c = 0; c < C; ++c) {
    if (result.candidate_labels[c] == "NP") np_idx = c;
    if (result.candidate_labels[c] == "AR(2)") ar2_idx = c;
  }

  if (cfg.figure == "fig3") {
    // Root-mse per candidate, scaled per focus to the unit interval.
    std::string csv = "focus,candidate,metric,value\n";
    for (int f = 0; f < F; ++f) {
      double hi = 0.0;
      for (int c = 0; c < C; ++c) hi = std::max(hi, result.rmse[f][c]);
      for (int c = 0; c < C; ++c) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.10g",
                      hi > 0 ? result.rmse[f][c] / hi : 0.0);
        csv += result.focus_names[f] + "," + result.candidate_labels[c] +
               ",relative_rmse," + buf + "\n";
      }
    }
    write_file(dir / "fig3_relative_rmse.csv", csv);
  } else {
    // fig5: how often each strategy picks the empirically best model;
    // fig6: the strategies' attained root-mse.
    std::string csv = "focus,candidate,metric,value\n";
    for (std::size_t k = 0; k < result.comparator_names.size(); ++k) {
      for (int f = 0; f < F; ++f) {
        int best = 0;
        for (int c = 1; c < C; ++c)
          if (result.rmse[f][c] < result.rmse[f][best]) best = c;
        const double prop =
            static_cast<double>(result.selection_counts[k][f][best]) /
            std::max(1, result.replications - result.aborted);
        char buf[64];
        if (cfg.figure == "fig5") {
          std::snprintf(buf, sizeof(buf), "%.10g", prop);
          csv += result.focus_names[f] + "," + result.comparator_names[k] +
                 ",optimal_pick_proportion," + buf + "\n";
        } else {
          std::snprintf(buf, sizeof(buf), "%.10g",
                        result.comparator_rmse[k][f]);
          csv += result.focus_names[f] + "," + result.comparator_names[k] +
                 ",attained_rmse," + buf + "\n";
        }
      }
    }
    write_file(dir / (cfg.figure + "_table.csv"), csv);
  }

  // Qualitative checks recorded alongside the tables.
  json checks;
  if (np_idx >= 0 && ar2_idx >= 0) {
    bool np_never_best = true;
    int ar2_best = 0;
    for (int f = 0; f < F; ++f) {
      bool np_strict = true;
      for (int c = 0; c < C; ++c) {
        if (c == np_idx) continue;
        if (result.rmse[f][np_idx] >= result.rmse[f][c]) np_strict = false;
      }
      if (np_strict) np_never_best = false;
      int best = 0;
      for (int c = 1; c < C; ++c)
        if (result.rmse[f][c] < result.rmse[f][best]) best = c;
      if (best == ar2_idx) ++ar2_best;
    }
    checks["np_never_strictly_best"] = np_never_best;
    checks["ar2_best_count"] = ar2_best;
  }
  json j;
  j["figure"] = cfg.figure;
  j["version"] = kVersion;
  j["checks"] = checks;
  write_file(dir / (cfg.figure + "_summary.json"), j.dump(2) + "\n");
  os << cfg.figure << " artifacts written to " << dir.string() << "\n";
  return 0;
}

int cmd_reproduce(const RunConfig& overrides, std::ostream& os) {
  const RunConfig cfg = figure_config(overrides.figure, overrides);
  if (cfg.figure == "fig1") return reproduce_fig1(cfg, os);
  if (cfg.figure == "fig4") return reproduce_fig4(cfg, os);
  return reproduce_mc_figure(cfg, os);
}

}  // namespace

int run_command(const RunConfig& cfg, std::ostream& os) {
  if (cfg.command == "fit") return cmd_fit(cfg, os);
  if (cfg.command == "fic") return cmd_fic(cfg, os);
  if (cfg.command == "afic") return cmd_afic(cfg, os);
  if (cfg.command == "simulate") return cmd_simulate(cfg, os);
  if (cfg.command == "mc") return cmd_mc(cfg, os);
  if (cfg.command == "least-false") return cmd_least_false(cfg, os);
  if (cfg.command == "reproduce") return cmd_reproduce(cfg, os);
  config_fail("unknown command '" + cfg.command +
              "' (expected fit, fic, afic, simulate, mc, least-false, "
              "reproduce)");
}

}  // namespace specfic
