#include "specfic/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <thread>

#include <nlohmann/json.hpp>

#include "fic_detail.hpp"
#include "optimize.hpp"
#include "specfic/version.hpp"

namespace specfic {

namespace {

constexpr double kPi = std::numbers::pi;
const double kNaN = std::numeric_limits<double>::quiet_NaN();

// SplitMix64 finalizer; out(i) for a fixed stream value reproduces the
// classic sequential generator seeded at that stream.
std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t counter_rand(std::uint64_t stream, std::uint64_t i) {
  return mix64(stream + (i + 1) * 0x9E3779B97F4A7C15ULL);
}

double to_unit(std::uint64_t x) {
  // (0, 1]: the log in Box-Muller stays finite.
  return static_cast<double>((x >> 11) + 1) * 0x1.0p-53;
}

}  // namespace

std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index) {
  return mix64(seed + (index + 1) * 0xD1B54A32D192ED03ULL);
}

std::vector<double> standard_normals(std::uint64_t stream, int count) {
  std::vector<double> z(count);
  for (int j = 0; j < count; ++j) {
    const double u1 = to_unit(counter_rand(stream, 2 * j));
    const double u2 = to_unit(counter_rand(stream, 2 * j + 1));
    z[j] = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }
  return z;
}

std::string comparator_name(Comparator c) {
  switch (c) {
    case Comparator::kFic: return "fic";
    case Comparator::kAic: return "aic";
    case Comparator::kBic: return "bic";
    case Comparator::kAlwaysNp: return "always_np";
  }
  return "unknown";
}

GaussianSampler::GaussianSampler(const SpectralDensity& f, int n,
                                 const QuadratureRule& q)
    : n_(n) {
  if (n < 1 || n > 5000)
    throw PreconditionError("sample_gaussian: need 1 <= n <= 5000");
  const std::vector<double> acov = autocovariances(f, n - 1, q);
  Eigen::MatrixXd sigma(n, n);
  for (int s = 0; s < n; ++s)
    for (int t = 0; t <= s; ++t) {
      sigma(s, t) = acov[s - t];
      sigma(t, s) = acov[s - t];
    }
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) {
    sigma.diagonal().array() += 1e-10 * acov[0];
    llt.compute(sigma);
    if (llt.info() != Eigen::Success)
      throw NumericDegeneracyError(
          "sample_gaussian: covariance not positive definite after jitter");
  }
  chol_ = llt.matrixL();
}

TimeSeries GaussianSampler::sample(std::uint64_t seed) const {
  const std::vector<double> z = standard_normals(seed, n_);
  Eigen::Map<const Eigen::VectorXd> zv(z.data(), n_);
  const Eigen::VectorXd y = chol_ * zv;
  TimeSeries out;
  out.values.assign(y.data(), y.data() + n_);
  return out;
}

TimeSeries sample_gaussian(const SpectralDensity& f, int n, std::uint64_t seed,
                           const QuadratureRule& q) {
  return GaussianSampler(f, n, q).sample(seed);
}

// ---------------------------------------------------------------------------
// Monte Carlo engine
// ---------------------------------------------------------------------------

namespace {

struct RepOutcome {
  // estimate[focus][candidate]; NaN marks a failed candidate.
  std::vector<std::vector<double>> estimate;
  // fic[focus][candidate]; NaN for failed.
  std::vector<std::vector<double>> fic;
  std::vector<double> aic;  // per candidate, NaN for np / failed
  std::vector<double> bic;
  bool aborted = false;
  std::string message;
};

int tie_break_select(const std::vector<double>& score,
                     const std::vector<CandidateModel>& candidates) {
  int best = -1;
  for (std::size_t i = 0; i < score.size(); ++i) {
    if (std::isnan(score[i])) continue;
    if (best < 0 || score[i] < score[best]) {
      best = static_cast<int>(i);
    } else if (score[i] == score[best]) {
      const auto params = [&](int idx) {
        return candidates[idx].is_parametric()
                   ? candidates[idx].family->param_dim()
                   : std::numeric_limits<int>::max();
      };
      if (params(static_cast<int>(i)) < params(best) ||
          (params(static_cast<int>(i)) == params(best) &&
           candidates[i].label < candidates[best].label))
        best = static_cast<int>(i);
    }
  }
  return best;
}

}  // namespace

McResult run_mc(const SimSpec& spec) {
  if (spec.replications < 1)
    throw PreconditionError("run_mc: need at least one replication");
  if (spec.n < 8) throw PreconditionError("run_mc: need n >= 8");
  if (spec.candidates.empty())
    throw PreconditionError("run_mc: candidate list is empty");
  if (spec.foci.empty()) throw PreconditionError("run_mc: no focus given");

  std::vector<CandidateModel> candidates;
  int np_index = -1;
  for (const CandidateModel& raw : spec.candidates) {
    CandidateModel c = raw;
    if (c.label.empty()) c.label = c.family ? c.family->label() : "NP";
    if (!c.is_parametric()) np_index = static_cast<int>(candidates.size());
    candidates.push_back(std::move(c));
  }
  const bool wants_np = std::count(spec.comparators.begin(),
                                   spec.comparators.end(),
                                   Comparator::kAlwaysNp) > 0;
  if (wants_np && np_index < 0)
    throw PreconditionError(
        "run_mc: always_np comparator needs a nonparametric candidate");
  const bool need_ml =
      std::count(spec.comparators.begin(), spec.comparators.end(),
                 Comparator::kAic) > 0 ||
      std::count(spec.comparators.begin(), spec.comparators.end(),
                 Comparator::kBic) > 0;

  const QuadratureRule q =
      spec.quad_nodes ? QuadratureRule::composite_gauss_legendre(*spec.quad_nodes)
                      : default_quadrature(spec.n);
  const Eigen::VectorXd truth_nat =
      spec.truth_family.natural(spec.truth_theta);
  const SpectralDensity truth = spec.truth_family.spectral_density(truth_nat);

  const int F = static_cast<int>(spec.foci.size());
  const int C = static_cast<int>(candidates.size());
  const int K = static_cast<int>(spec.comparators.size());
  const int B = spec.replications;

  // Truth values and per-focus weight grids, shared read-only.
  std::vector<std::vector<std::vector<double>>> hg_all(F);
  std::vector<double> mu_true(F);
  {
    const SpectralReference truth_ref = SpectralReference::analytic(truth, q);
    for (int f = 0; f < F; ++f) {
      hg_all[f] = detail::focus_weight_grids(spec.foci[f], q);
      mu_true[f] =
          detail::np_focus_context(truth_ref, spec.foci[f], hg_all[f], q).mu;
    }
  }

  const GaussianSampler sampler(truth, spec.n, q);

  std::vector<RepOutcome> outcomes(B);
  std::atomic<int> next{0};

  auto worker = [&]() {
    for (;;) {
      const int r = next.fetch_add(1);
      if (r >= B) return;
      RepOutcome& out = outcomes[r];
      out.estimate.assign(F, std::vector<double>(C, kNaN));
      out.fic.assign(F, std::vector<double>(C, kNaN));
      out.aic.assign(C, kNaN);
      out.bic.assign(C, kNaN);
      try {
        const TimeSeries y = sampler.sample(derive_stream(spec.seed, r));
        const EmpiricalSpectrum espec(y, q);
        const SpectralReference ref = SpectralReference::empirical(espec, q);

        std::vector<std::optional<FitResult>> fits(C);
        std::vector<std::optional<detail::PmCandidateCache>> caches(C);
        for (int c = 0; c < C; ++c) {
          if (!candidates[c].is_parametric()) continue;
          try {
            fits[c] = fit_whittle(espec, *candidates[c].family, q);
            caches[c] = detail::pm_candidate_cache(ref, *fits[c], q);
            if (need_ml) {
              FitOptions ml_opts;
              ml_opts.multistarts = 1;  // white-noise point
              ml_opts.warm_start = fits[c]->family.natural(fits[c]->theta_hat);
              const FitResult ml =
                  fit_gaussian_ml(y, *candidates[c].family, ml_opts);
              const auto [aic, bic] = aic_bic(ml, spec.n);
              out.aic[c] = aic;
              out.bic[c] = bic;
            }
          } catch (const Error&) {
            fits[c].reset();
            caches[c].reset();
          }
        }

        for (int f = 0; f < F; ++f) {
          detail::NpFocusContext np;
          try {
            np = detail::np_focus_context(ref, spec.foci[f], hg_all[f], q);
          } catch (const Error&) {
            continue;  // every candidate stays failed for this focus
          }
          for (int c = 0; c < C; ++c) {
            if (!candidates[c].is_parametric()) {
              out.estimate[f][c] = np.mu;
              out.fic[f][c] = np.v_np / spec.n;
              continue;
            }
            if (!fits[c]) continue;
            try {
              const auto s = detail::parametric_focus_scores(
                  *fits[c], *caches[c], spec.foci[f], hg_all[f], np, q,
                  spec.n);
              out.estimate[f][c] = s.mu;
              out.fic[f][c] = s.fic;
            } catch (const Error&) {
              // candidate fails for this focus only
            }
          }
        }

        for (int f = 0; f < F; ++f) {
          bool any = false;
          for (int c = 0; c < C; ++c) any = any || !std::isnan(out.estimate[f][c]);
          if (!any) {
            out.aborted = true;
            out.message = "all candidates failed for focus " +
                          spec.foci[f].name();
            break;
          }
        }
      } catch (const std::exception& e) {
        out.aborted = true;
        out.message = e.what();
      }
    }
  };

  const int workers = std::max(1, spec.workers);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  // Serial aggregation in replication order: identical output for any
  // worker count.
  McResult res;
  res.version = kVersion;
  res.seed = spec.seed;
  res.n = spec.n;
  res.quad_size = q.size();
  res.replications = B;
  res.mu_true = mu_true;
  for (const FocusFunctional& f : spec.foci) res.focus_names.push_back(f.name());
  for (const CandidateModel& c : candidates)
    res.candidate_labels.push_back(c.label);
  for (Comparator c : spec.comparators)
    res.comparator_names.push_back(comparator_name(c));

  std::vector<std::vector<double>> sq_sum(F, std::vector<double>(C, 0.0));
  res.valid_count.assign(F, std::vector<int>(C, 0));
  res.failure_count.assign(F, std::vector<int>(C, 0));
  res.selection_counts.assign(
      K, std::vector<std::vector<int>>(F, std::vector<int>(C, 0)));
  std::vector<std::vector<double>> comp_sq(K, std::vector<double>(F, 0.0));
  std::vector<std::vector<int>> comp_n(K, std::vector<int>(F, 0));

  for (int r = 0; r < B; ++r) {
    const RepOutcome& out = outcomes[r];
    if (out.aborted) {
      ++res.aborted;
      if (res.messages.size() < 8 && !out.message.empty())
        res.messages.push_back("replication " + std::to_string(r) + ": " +
                               out.message);
      continue;
    }
    for (int f = 0; f < F; ++f) {
      for (int c = 0; c < C; ++c) {
        const double est = out.estimate[f][c];
        if (std::isnan(est)) {
          ++res.failure_count[f][c];
          continue;
        }
        const double err = est - mu_true[f];
        sq_sum[f][c] += err * err;
        ++res.valid_count[f][c];
      }
      for (int k = 0; k < K; ++k) {
        int sel = -1;
        switch (spec.comparators[k]) {
          case Comparator::kFic:
            sel = tie_break_select(out.fic[f], candidates);
            break;
          case Comparator::kAic:
            sel = tie_break_select(out.aic, candidates);
            break;
          case Comparator::kBic:
            sel = tie_break_select(out.bic, candidates);
            break;
          case Comparator::kAlwaysNp:
            sel = std::isnan(out.estimate[f][np_index]) ? -1 : np_index;
            break;
        }
        if (sel < 0 || std::isnan(out.estimate[f][sel])) continue;
        ++res.selection_counts[k][f][sel];
        const double err = out.estimate[f][sel] - mu_true[f];
        comp_sq[k][f] += err * err;
        ++comp_n[k][f];
      }
    }
  }

  res.rmse.assign(F, std::vector<double>(C, kNaN));
  for (int f = 0; f < F; ++f)
    for (int c = 0; c < C; ++c)
      if (res.valid_count[f][c] > 0)
        res.rmse[f][c] = std::sqrt(sq_sum[f][c] / res.valid_count[f][c]);
  res.comparator_rmse.assign(K, std::vector<double>(F, kNaN));
  for (int k = 0; k < K; ++k)
    for (int f = 0; f < F; ++f)
      if (comp_n[k][f] > 0)
        res.comparator_rmse[k][f] = std::sqrt(comp_sq[k][f] / comp_n[k][f]);
  return res;
}

// ---------------------------------------------------------------------------
// Least-false tables
// ---------------------------------------------------------------------------

std::vector<LeastFalseRow> least_false_table(
    const SpectralDensity& truth,
    const std::vector<ParametricSpectralFamily>& families, int max_lag,
    const QuadratureRule& q) {
  if (families.empty())
    throw PreconditionError("least_false_table: no families given");
  std::vector<double> gv(q.size());
  for (int i = 0; i < q.size(); ++i) gv[i] = truth(q.nodes()[i]);
  double c0 = 0.0;
  for (int i = 0; i < q.size(); ++i) c0 += q.weights()[i] * gv[i];
  c0 *= 2.0;

  std::vector<LeastFalseRow> rows;
  for (const ParametricSpectralFamily& family : families) {
    auto objective = [&](const Eigen::VectorXd& u) {
      return discrepancy_from_grid(
          gv, family, ParamVector::natural(family.from_unconstrained(u)), q);
    };
    const int coef_dim = family.param_dim() - 1;
    std::vector<Eigen::VectorXd> starts;
    const double u3 = std::atanh(0.3), u5 = std::atanh(0.5);
    for (int s = 0; s < 5; ++s) {
      Eigen::VectorXd u = Eigen::VectorXd::Zero(coef_dim + 1);
      for (int j = 0; j < coef_dim; ++j) {
        switch (s) {
          case 1: u[j] = u3; break;
          case 2: u[j] = -u3; break;
          case 3: u[j] = (j % 2 == 0) ? u5 : -u5; break;
          case 4: u[j] = (j % 2 == 0) ? -u5 : u5; break;
          default: break;
        }
      }
      u[coef_dim] = 0.5 * std::log(c0);
      starts.push_back(std::move(u));
      if (coef_dim == 0) break;
    }
    detail::OptimizeOptions opt;
    const detail::OptimizeResult r =
        detail::multistart_minimize(objective, starts, opt);
    LeastFalseRow row;
    row.family_label = family.label();
    row.converged = r.converged && std::isfinite(r.value);
    row.discrepancy = r.value;
    row.theta0 = family.from_unconstrained(r.x);
    row.autocov =
        autocovariances(family.spectral_density(row.theta0), max_lag, q);
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

std::string mc_result_to_json(const McResult& r, int indent) {
  nlohmann::json j;
  j["version"] = r.version;
  j["seed"] = r.seed;
  j["n"] = r.n;
  j["quad_size"] = r.quad_size;
  j["replications"] = r.replications;
  j["aborted"] = r.aborted;
  j["focus"] = r.focus_names;
  j["candidates"] = r.candidate_labels;
  j["comparators"] = r.comparator_names;
  j["mu_true"] = r.mu_true;
  j["rmse"] = r.rmse;
  j["valid_count"] = r.valid_count;
  j["failure_count"] = r.failure_count;
  nlohmann::json sel = nlohmann::json::object();
  nlohmann::json crmse = nlohmann::json::object();
  for (std::size_t k = 0; k < r.comparator_names.size(); ++k) {
    sel[r.comparator_names[k]] = r.selection_counts[k];
    crmse[r.comparator_names[k]] = r.comparator_rmse[k];
  }
  j["selection_counts"] = sel;
  j["comparator_rmse"] = crmse;
  j["messages"] = r.messages;
  return j.dump(indent) + "\n";
}

namespace {

std::string csv_num(double v) {
  if (!std::isfinite(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
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

std::string mc_result_to_csv(const McResult& r) {
  std::string out = "focus,candidate,metric,value\n";
  const int F = static_cast<int>(r.focus_names.size());
  const int C = static_cast<int>(r.candidate_labels.size());
  for (int f = 0; f < F; ++f) {
    out += csv_escape(r.focus_names[f]) + ",,mu_true," +
           csv_num(r.mu_true[f]) + "\n";
    for (int c = 0; c < C; ++c) {
      const std::string prefix = csv_escape(r.focus_names[f]) + "," +
                                 csv_escape(r.candidate_labels[c]) + ",";
      out += prefix + "rmse," + csv_num(r.rmse[f][c]) + "\n";
      out += prefix + "valid_count," + std::to_string(r.valid_count[f][c]) +
             "\n";
      out += prefix + "failure_count," +
             std::to_string(r.failure_count[f][c]) + "\n";
      for (std::size_t k = 0; k < r.comparator_names.size(); ++k)
        out += prefix + "selection_count_" + r.comparator_names[k] + "," +
               std::to_string(r.selection_counts[k][f][c]) + "\n";
    }
    for (std::size_t k = 0; k < r.comparator_names.size(); ++k)
      out += csv_escape(r.focus_names[f]) + ",,rmse_" +
             r.comparator_names[k] + "," + csv_num(r.comparator_rmse[k][f]) +
             "\n";
  }
  return out;
}

}  // namespace specfic
