#include "specfic/fic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <set>

#include <nlohmann/json.hpp>

#include "fic_detail.hpp"
#include "specfic/version.hpp"

namespace specfic {

namespace {

constexpr double kPi = std::numbers::pi;
const double kNaN = std::numeric_limits<double>::quiet_NaN();

CandidateModel with_default_label(CandidateModel c) {
  if (c.label.empty())
    c.label = c.family ? c.family->label() : std::string("NP");
  return c;
}

Eigen::LDLT<Eigen::MatrixXd> information_solver(const Eigen::MatrixXd& J) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(J);
  const double lo = eig.eigenvalues().cwiseAbs().minCoeff();
  const double hi = eig.eigenvalues().cwiseAbs().maxCoeff();
  if (!(lo > 0.0) || hi / lo > 1e12)
    throw SingularInformationError(
        "information matrix numerically singular (condition > 1e12)");
  return J.ldlt();
}

void check_candidates(const std::vector<CandidateModel>& candidates) {
  if (candidates.empty())
    throw PreconditionError("scores: candidate list is empty");
  int np_count = 0;
  std::set<std::string> labels;
  for (const CandidateModel& raw : candidates) {
    const CandidateModel c = with_default_label(raw);
    if (!c.is_parametric()) ++np_count;
    if (!labels.insert(c.label).second)
      throw PreconditionError("scores: duplicate candidate label '" + c.label +
                              "'");
  }
  if (np_count > 1)
    throw PreconditionError("scores: at most one nonparametric candidate");
}

bool is_constant(const TimeSeries& y) {
  const auto [lo, hi] = std::minmax_element(y.values.begin(), y.values.end());
  return *lo == *hi;
}

int tie_params(const FicRow& row) {
  return row.is_parametric ? row.n_params : std::numeric_limits<int>::max();
}

void assign_ranks(FicReport& report) {
  std::vector<int> order;
  for (std::size_t i = 0; i < report.rows.size(); ++i)
    if (!report.rows[i].error) order.push_back(static_cast<int>(i));
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const FicRow& ra = report.rows[a];
    const FicRow& rb = report.rows[b];
    if (ra.fic != rb.fic) return ra.fic < rb.fic;
    if (tie_params(ra) != tie_params(rb))
      return tie_params(ra) < tie_params(rb);
    return ra.candidate < rb.candidate;
  });
  for (std::size_t r = 0; r < order.size(); ++r)
    report.rows[order[r]].rank = static_cast<int>(r) + 1;
}

void mark_error(FicRow& row, const std::string& message) {
  row.error = message;
  row.mu_hat = kNaN;
  row.v_np = kNaN;
  row.bsq_trunc = kNaN;
  row.fic = kNaN;
  row.b_hat.reset();
  row.v_pm.reset();
  row.v_c.reset();
  row.kappa.reset();
  row.rank = -1;
}

}  // namespace

namespace detail {

std::vector<std::vector<double>> focus_weight_grids(
    const FocusFunctional& focus, const QuadratureRule& q) {
  std::vector<std::vector<double>> grids(focus.k(),
                                         std::vector<double>(q.size()));
  for (int j = 0; j < focus.k(); ++j)
    for (int i = 0; i < q.size(); ++i)
      grids[j][i] = focus.weights()[j].even(q.nodes()[i]);
  return grids;
}

NpFocusContext np_focus_context(const SpectralReference& ref,
                                const FocusFunctional& focus,
                                const std::vector<std::vector<double>>& hg,
                                const QuadratureRule& q) {
  const int k = focus.k();
  NpFocusContext ctx;
  ctx.components.resize(k);
  for (int j = 0; j < k; ++j) {
    double acc = 0.0;
    for (int i = 0; i < q.size(); ++i)
      acc += q.weights()[i] * hg[j][i] * ref.g()[i];
    ctx.components[j] = 2.0 * acc;
  }
  ctx.mu = focus.transform(ctx.components);
  ctx.grad = focus.grad_transform(ctx.components);
  // 4 pi int_{-pi}^{pi} h_a h_b gsq dw, folded: 8 pi sum w h_a h_b gsq.
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < q.size(); ++i) {
    const double s = 8.0 * kPi * q.weights()[i] * ref.g_squared()[i];
    for (int a = 0; a < k; ++a)
      for (int b = a; b < k; ++b) m(a, b) += s * hg[a][i] * hg[b][i];
  }
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < a; ++b) m(a, b) = m(b, a);
  ctx.v_np = std::max(0.0, ctx.grad.dot(m * ctx.grad));
  return ctx;
}

PmCandidateCache pm_candidate_cache(const SpectralReference& ref,
                                    const FitResult& fit,
                                    const QuadratureRule& q) {
  PmCandidateCache cache;
  cache.nat = fit.family.natural(fit.theta_hat);
  cache.f.resize(q.size());
  fit.family.density_grid(cache.nat, q.nodes(), cache.f);
  cache.gradf.resize(fit.family.param_dim(), q.size());
  cache.plug.resize(q.size());
  for (int i = 0; i < q.size(); ++i) {
    cache.gradf.col(i) =
        cache.f[i] * fit.family.grad_log(cache.nat, q.nodes()[i]);
    cache.plug[i] = ref.g_squared()[i] / (cache.f[i] * cache.f[i]);
  }
  return cache;
}

PmFocusParts pm_focus_parts(const PmCandidateCache& cache,
                            const std::vector<std::vector<double>>& hg,
                            const QuadratureRule& q) {
  const int k = static_cast<int>(hg.size());
  const int p = static_cast<int>(cache.gradf.rows());
  PmFocusParts parts;
  parts.components = Eigen::VectorXd::Zero(k);
  parts.c = Eigen::MatrixXd::Zero(k, p);
  parts.d = Eigen::MatrixXd::Zero(k, p);
  for (int j = 0; j < k; ++j) {
    double comp = 0.0;
    Eigen::VectorXd crow = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd drow = Eigen::VectorXd::Zero(p);
    for (int i = 0; i < q.size(); ++i) {
      const double hw = 2.0 * q.weights()[i] * hg[j][i];
      comp += hw * cache.f[i];
      crow += hw * cache.gradf.col(i);
      drow += (hw * cache.plug[i]) * cache.gradf.col(i);
    }
    parts.components[j] = comp;
    parts.c.row(j) = crow.transpose();
    parts.d.row(j) = drow.transpose();
  }
  return parts;
}

FocusScores parametric_focus_scores(const FitResult& fit,
                                    const PmCandidateCache& cache,
                                    const FocusFunctional& focus,
                                    const std::vector<std::vector<double>>& hg,
                                    const NpFocusContext& np,
                                    const QuadratureRule& q, int n) {
  const PmFocusParts parts = pm_focus_parts(cache, hg, q);
  const double mu = focus.transform(parts.components);
  const Eigen::VectorXd gpm = focus.grad_transform(parts.components);
  const Eigen::LDLT<Eigen::MatrixXd> J = information_solver(fit.J_hat);
  const Eigen::VectorXd a = parts.c.transpose() * gpm;
  const Eigen::VectorXd Ja = J.solve(a);
  FocusScores s;
  s.mu = mu;
  s.b = mu - np.mu;
  s.v_np = np.v_np;
  s.v_pm = std::max(0.0, Ja.dot(fit.K_hat * Ja));
  s.v_c = Ja.dot(parts.d.transpose() * np.grad);
  s.kappa = s.v_pm + s.v_np - 2.0 * s.v_c;
  s.bsq_trunc = std::max(0.0, s.b * s.b - s.kappa / n);
  s.fic = s.bsq_trunc + s.v_pm / n;
  return s;
}

}  // namespace detail

CandidateModel CandidateModel::parametric(ParametricSpectralFamily f,
                                          std::string label) {
  CandidateModel c;
  c.label = label.empty() ? f.label() : std::move(label);
  c.family = std::move(f);
  return c;
}

CandidateModel CandidateModel::nonparametric(std::string label) {
  CandidateModel c;
  c.label = std::move(label);
  return c;
}

double pm_focus(const FitResult& fit, const FocusFunctional& focus,
                const QuadratureRule& q) {
  const SpectralDensity f =
      fit.family.spectral_density(fit.family.natural(fit.theta_hat));
  Eigen::VectorXd components(focus.k());
  for (int j = 0; j < focus.k(); ++j) {
    const FocusWeight& h = focus.weights()[j];
    components[j] =
        2.0 * q.integrate([&](double w) { return h.even(w) * f(w); });
  }
  return focus.transform(components);
}

Eigen::MatrixXd c_matrix(const FitResult& fit, const FocusFunctional& focus,
                         const QuadratureRule& q) {
  const Eigen::VectorXd nat = fit.family.natural(fit.theta_hat);
  const auto hg = detail::focus_weight_grids(focus, q);
  const int p = fit.family.param_dim();
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(focus.k(), p);
  for (int i = 0; i < q.size(); ++i) {
    const Eigen::VectorXd gradf =
        fit.family.density(nat, q.nodes()[i]) *
        fit.family.grad_log(nat, q.nodes()[i]);
    for (int j = 0; j < focus.k(); ++j)
      c.row(j) += 2.0 * q.weights()[i] * hg[j][i] * gradf.transpose();
  }
  return c;
}

Eigen::MatrixXd d_matrix(const SpectralReference& ref, const FitResult& fit,
                         const FocusFunctional& focus,
                         const QuadratureRule& q) {
  const auto cache = detail::pm_candidate_cache(ref, fit, q);
  return detail::pm_focus_parts(cache, detail::focus_weight_grids(focus, q), q)
      .d;
}

double np_variance(const SpectralReference& ref, const FocusFunctional& focus,
                   const QuadratureRule& q) {
  return detail::np_focus_context(ref, focus,
                                  detail::focus_weight_grids(focus, q), q)
      .v_np;
}

Variances variances(const SpectralReference& ref, const FitResult& fit,
                    const FocusFunctional& focus, const QuadratureRule& q) {
  const auto hg = detail::focus_weight_grids(focus, q);
  const auto np = detail::np_focus_context(ref, focus, hg, q);
  const auto cache = detail::pm_candidate_cache(ref, fit, q);
  const auto s =
      detail::parametric_focus_scores(fit, cache, focus, hg, np, q, /*n=*/1);
  return {s.v_np, s.v_pm, s.v_c};
}

FicReport fic_scores(const TimeSeries& y,
                     const std::vector<CandidateModel>& candidates,
                     const FocusFunctional& focus, const QuadratureRule& q) {
  check_candidates(candidates);
  FicReport report;
  report.focus_name = focus.name();
  report.criterion = "fic";
  report.n = y.n();
  report.quad_size = q.size();
  report.version = kVersion;

  for (const CandidateModel& raw : candidates) {
    const CandidateModel c = with_default_label(raw);
    FicRow row;
    row.candidate = c.label;
    row.is_parametric = c.is_parametric();
    row.n_params = c.is_parametric() ? c.family->param_dim() : 0;
    report.rows.push_back(std::move(row));
  }

  if (is_constant(y)) {
    for (FicRow& row : report.rows)
      mark_error(row, "degenerate-input: constant series");
    return report;
  }

  const EmpiricalSpectrum spec(y, q);
  const SpectralReference ref = SpectralReference::empirical(spec, q);
  const auto hg = detail::focus_weight_grids(focus, q);

  detail::NpFocusContext np;
  std::optional<std::string> np_failure;
  try {
    np = detail::np_focus_context(ref, focus, hg, q);
  } catch (const Error& e) {
    np_failure = e.what();
  }

  for (std::size_t i = 0; i < candidates.size(); ++i) {
    FicRow& row = report.rows[i];
    if (np_failure) {
      mark_error(row, "nonparametric components unavailable: " + *np_failure);
      continue;
    }
    const CandidateModel c = with_default_label(candidates[i]);
    if (!c.is_parametric()) {
      row.mu_hat = np.mu;
      row.v_np = np.v_np;
      row.bsq_trunc = 0.0;
      row.fic = np.v_np / report.n;
      continue;
    }
    try {
      const FitResult fit = fit_whittle(spec, *c.family, q);
      const auto cache = detail::pm_candidate_cache(ref, fit, q);
      const auto s = detail::parametric_focus_scores(fit, cache, focus, hg,
                                                     np, q, report.n);
      row.mu_hat = s.mu;
      row.b_hat = s.b;
      row.v_np = s.v_np;
      row.v_pm = s.v_pm;
      row.v_c = s.v_c;
      row.kappa = s.kappa;
      row.bsq_trunc = s.bsq_trunc;
      row.fic = s.fic;
    } catch (const Error& e) {
      mark_error(row, e.what());
    }
  }
  assign_ranks(report);
  return report;
}

double z_statistic(const FicRow& row, int n) {
  if (!row.is_parametric)
    throw PreconditionError("z_statistic: needs a parametric row");
  if (row.error || !row.b_hat || !row.v_c)
    throw PreconditionError("z_statistic: row carries no scores");
  const double denom = row.v_np - *row.v_c;
  if (!(denom > 0.0))
    throw DiagnosticUnavailableError(
        "z_statistic: nonpositive denominator v_np - v_c");
  const double b = *row.b_hat;
  return n * b * b / denom;
}

FicReport afic_scores(const TimeSeries& y,
                      const std::vector<CandidateModel>& candidates,
                      const AficWeights& weights, const QuadratureRule& q) {
  check_candidates(candidates);
  if (weights.items.empty())
    throw PreconditionError("afic: empty weight list");
  double total = 0.0;
  for (const auto& item : weights.items) {
    if (item.weight < 0.0)
      throw PreconditionError("afic: negative weight for " +
                              item.focus.name());
    total += item.weight;
  }
  if (!(total > 0.0)) throw PreconditionError("afic: all weights are zero");

  FicReport report;
  report.criterion = "afic";
  report.n = y.n();
  report.quad_size = q.size();
  report.version = kVersion;
  {
    std::string name = "afic(";
    for (std::size_t u = 0; u < weights.items.size(); ++u) {
      if (u > 0) name += ";";
      name += weights.items[u].focus.name();
    }
    report.focus_name = name + ")";
  }

  for (const CandidateModel& raw : candidates) {
    const CandidateModel c = with_default_label(raw);
    FicRow row;
    row.candidate = c.label;
    row.is_parametric = c.is_parametric();
    row.n_params = c.is_parametric() ? c.family->param_dim() : 0;
    if (row.is_parametric) {
      row.b_hat = 0.0;
      row.v_pm = 0.0;
      row.v_c = 0.0;
      row.kappa = 0.0;
    }
    report.rows.push_back(std::move(row));
  }

  if (is_constant(y)) {
    for (FicRow& row : report.rows)
      mark_error(row, "degenerate-input: constant series");
    return report;
  }

  const EmpiricalSpectrum spec(y, q);
  const SpectralReference ref = SpectralReference::empirical(spec, q);

  // One fit (and cache) per parametric candidate, shared across all foci.
  std::vector<std::optional<FitResult>> fits(candidates.size());
  std::vector<std::optional<detail::PmCandidateCache>> caches(
      candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const CandidateModel c = with_default_label(candidates[i]);
    if (!c.is_parametric()) continue;
    try {
      fits[i] = fit_whittle(spec, *c.family, q);
      caches[i] = detail::pm_candidate_cache(ref, *fits[i], q);
    } catch (const Error& e) {
      mark_error(report.rows[i], e.what());
    }
  }

  for (const auto& item : weights.items) {
    const double wu = item.weight;
    const auto hg = detail::focus_weight_grids(item.focus, q);
    detail::NpFocusContext np;
    try {
      np = detail::np_focus_context(ref, item.focus, hg, q);
    } catch (const Error& e) {
      for (FicRow& row : report.rows)
        if (!row.error)
          mark_error(row, "nonparametric components unavailable for " +
                              item.focus.name() + ": " + e.what());
      continue;
    }
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      FicRow& row = report.rows[i];
      if (row.error) continue;
      if (!row.is_parametric) {
        row.mu_hat += wu * np.mu;
        row.v_np += wu * np.v_np;
        row.fic += wu * (np.v_np / report.n);
        continue;
      }
      try {
        const auto s = detail::parametric_focus_scores(
            *fits[i], *caches[i], item.focus, hg, np, q, report.n);
        row.mu_hat += wu * s.mu;
        *row.b_hat += wu * s.b;
        row.v_np += wu * s.v_np;
        *row.v_pm += wu * s.v_pm;
        *row.v_c += wu * s.v_c;
        *row.kappa += wu * s.kappa;
        row.bsq_trunc += wu * s.bsq_trunc;
        row.fic += wu * s.fic;
      } catch (const Error& e) {
        mark_error(row, item.focus.name() + std::string(": ") + e.what());
      }
    }
  }
  assign_ranks(report);
  return report;
}

namespace {

nlohmann::json row_to_json(const FicRow& row) {
  nlohmann::json j;
  j["candidate"] = row.candidate;
  j["parametric"] = row.is_parametric;
  j["n_params"] = row.n_params;
  j["mu_hat"] = row.mu_hat;
  j["b_hat"] = row.b_hat ? nlohmann::json(*row.b_hat) : nlohmann::json();
  j["v_np"] = row.v_np;
  j["v_pm"] = row.v_pm ? nlohmann::json(*row.v_pm) : nlohmann::json();
  j["v_c"] = row.v_c ? nlohmann::json(*row.v_c) : nlohmann::json();
  j["kappa"] = row.kappa ? nlohmann::json(*row.kappa) : nlohmann::json();
  j["bsq_trunc"] = row.bsq_trunc;
  j["fic"] = row.fic;
  j["rank"] = row.rank;
  j["error"] = row.error ? nlohmann::json(*row.error) : nlohmann::json();
  return j;
}

std::string fmt_double(double v) {
  if (!std::isfinite(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_opt(const std::optional<double>& v) {
  return v ? fmt_double(*v) : "";
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string report_to_json(const FicReport& report, int indent) {
  nlohmann::json j;
  j["criterion"] = report.criterion;
  j["focus"] = report.focus_name;
  j["n"] = report.n;
  j["quad_size"] = report.quad_size;
  j["version"] = report.version;
  j["rows"] = nlohmann::json::array();
  for (const FicRow& row : report.rows) j["rows"].push_back(row_to_json(row));
  return j.dump(indent) + "\n";
}

std::string report_to_csv(const FicReport& report) {
  std::string out =
      "candidate,parametric,n_params,rank,mu_hat,b_hat,v_np,v_pm,v_c,kappa,"
      "bsq_trunc,fic,error\n";
  for (const FicRow& row : report.rows) {
    out += csv_escape(row.candidate);
    out += row.is_parametric ? ",1," : ",0,";
    out += std::to_string(row.n_params);
    out += "," + (row.rank > 0 ? std::to_string(row.rank) : std::string());
    out += "," + fmt_double(row.mu_hat);
    out += "," + fmt_opt(row.b_hat);
    out += "," + fmt_double(row.v_np);
    out += "," + fmt_opt(row.v_pm);
    out += "," + fmt_opt(row.v_c);
    out += "," + fmt_opt(row.kappa);
    out += "," + fmt_double(row.bsq_trunc);
    out += "," + fmt_double(row.fic);
    out += "," + (row.error ? csv_escape(*row.error) : std::string());
    out += "\n";
  }
  return out;
}

}  // namespace specfic
