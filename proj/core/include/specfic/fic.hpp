#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "specfic/estimation.hpp"
#include "specfic/focus.hpp"
#include "specfic/periodogram.hpp"

namespace specfic {

/// A candidate model: a parametric spectral family or the nonparametric
/// (periodogram) alternative. Labels must be unique within a run.
struct CandidateModel {
  std::optional<ParametricSpectralFamily> family;  // nullopt: nonparametric
  std::string label;

  static CandidateModel parametric(ParametricSpectralFamily f,
                                   std::string label = "");
  static CandidateModel nonparametric(std::string label = "NP");

  bool is_parametric() const { return family.has_value(); }
};

/// Per-candidate scores. Fields flagged "parametric only" are empty on the
/// nonparametric row. An errored candidate carries a message and no scores.
struct FicRow {
  std::string candidate;
  bool is_parametric = false;
  int n_params = 0;  // 0 for the nonparametric candidate
  double mu_hat = 0.0;
  std::optional<double> b_hat;   // parametric only
  double v_np = 0.0;
  std::optional<double> v_pm;    // parametric only
  std::optional<double> v_c;     // parametric only
  std::optional<double> kappa;   // parametric only
  double bsq_trunc = 0.0;        // max(0, b_hat^2 - kappa/n); 0 for np
  double fic = 0.0;
  int rank = -1;                 // 1-based; -1 when errored
  std::optional<std::string> error;
};

struct FicReport {
  std::vector<FicRow> rows;  // in candidate order; see the rank field
  std::string focus_name;
  std::string criterion = "fic";  // "fic" or "afic"
  int n = 0;
  int quad_size = 0;
  std::string version;
};

/// mu(F_theta_hat; h, H): H applied to int h_j f_theta_hat dw.
double pm_focus(const FitResult& fit, const FocusFunctional& focus,
                const QuadratureRule& q);

/// k x p matrix whose row j is int h_j(w) grad f_theta_hat(w) dw.
Eigen::MatrixXd c_matrix(const FitResult& fit, const FocusFunctional& focus,
                         const QuadratureRule& q);

/// k x p matrix whose row j is int h_j grad f_theta_hat gsq / f^2 dw, where
/// gsq is the reference's squared-density plug-in (I_n^2/2 when empirical).
Eigen::MatrixXd d_matrix(const SpectralReference& ref, const FitResult& fit,
                         const FocusFunctional& focus,
                         const QuadratureRule& q);

struct Variances {
  double v_np = 0.0;
  double v_pm = 0.0;
  double v_c = 0.0;
};

/// The three limit (co)variances of the nonparametric and parametric focus
/// estimators:
///   v_np = gnp [4pi int h_i h_j gsq dw] gnp^t
///   v_pm = gpm c J^{-1} K J^{-1} c^t gpm^t
///   v_c  = gpm c J^{-1} d^t gnp^t
/// with gnp / gpm the gradients of H at the nonparametric / parametric
/// component vectors. Throws SingularInformationError when J is singular.
Variances variances(const SpectralReference& ref, const FitResult& fit,
                    const FocusFunctional& focus, const QuadratureRule& q);

/// Nonparametric variance alone (no parametric fit required).
double np_variance(const SpectralReference& ref, const FocusFunctional& focus,
                   const QuadratureRule& q);

/// Fits every parametric candidate by Whittle and scores all candidates:
///   FIC_np = v_np/n,
///   FIC_pm = max(0, b^2 - kappa/n) + v_pm/n,  kappa = v_pm + v_np - 2 v_c.
/// Per-candidate failures are recorded in the row without aborting others.
/// Ranking is ascending in fic; ties break toward fewer parameters, then
/// label order (the nonparametric candidate counts as largest).
FicReport fic_scores(const TimeSeries& y,
                     const std::vector<CandidateModel>& candidates,
                     const FocusFunctional& focus, const QuadratureRule& q);

/// Under-model diagnostic Z = n b^2 / (v_np - v_c) for a parametric row.
/// The parametric candidate is preferred over the nonparametric iff Z <= 2,
/// valid when v_np >= v_pm. Throws DiagnosticUnavailableError when the
/// denominator is nonpositive.
double z_statistic(const FicRow& row, int n);

/// Discrete weights over a set of focus functionals.
struct AficWeights {
  struct Item {
    FocusFunctional focus;
    double weight = 0.0;
  };
  std::vector<Item> items;
};

/// Weighted-average criterion: per candidate, the weighted sum of the
/// per-focus FIC summands. Every parametric candidate is fitted once and
/// reused across foci; a point mass on one focus reproduces fic_scores
/// exactly. Row fields hold the corresponding weighted sums.
FicReport afic_scores(const TimeSeries& y,
                      const std::vector<CandidateModel>& candidates,
                      const AficWeights& weights, const QuadratureRule& q);

/// Stable JSON / flat CSV serializations of a report; both embed the
/// toolkit version and quadrature size.
std::string report_to_json(const FicReport& report, int indent = 2);
std::string report_to_csv(const FicReport& report);

}  // namespace specfic
