#pragma once

#include <vector>

#include <Eigen/Dense>

#include "specfic/estimation.hpp"
#include "specfic/fic.hpp"
#include "specfic/focus.hpp"
#include "specfic/periodogram.hpp"

// Shared scoring internals used by both the report builders and the Monte
// Carlo engine, which caches per-candidate node data across foci.
namespace specfic::detail {

/// focus.weights()[j].even at every rule node.
std::vector<std::vector<double>> focus_weight_grids(
    const FocusFunctional& focus, const QuadratureRule& q);

struct NpFocusContext {
  Eigen::VectorXd components;
  Eigen::VectorXd grad;
  double mu = 0.0;
  double v_np = 0.0;
};

NpFocusContext np_focus_context(const SpectralReference& ref,
                                const FocusFunctional& focus,
                                const std::vector<std::vector<double>>& hg,
                                const QuadratureRule& q);

/// Per-(reference, fitted candidate) node data reused across foci.
struct PmCandidateCache {
  Eigen::VectorXd nat;
  std::vector<double> f;     // density at nodes
  Eigen::MatrixXd gradf;     // p x N gradient of the density
  std::vector<double> plug;  // gsq / f^2 at nodes
};

PmCandidateCache pm_candidate_cache(const SpectralReference& ref,
                                    const FitResult& fit,
                                    const QuadratureRule& q);

struct PmFocusParts {
  Eigen::VectorXd components;
  Eigen::MatrixXd c;  // k x p
  Eigen::MatrixXd d;  // k x p
};

PmFocusParts pm_focus_parts(const PmCandidateCache& cache,
                            const std::vector<std::vector<double>>& hg,
                            const QuadratureRule& q);

struct FocusScores {
  double mu = 0.0;
  double b = 0.0;
  double v_np = 0.0;
  double v_pm = 0.0;
  double v_c = 0.0;
  double kappa = 0.0;
  double bsq_trunc = 0.0;
  double fic = 0.0;
};

/// All per-focus scores of one fitted parametric candidate.
FocusScores parametric_focus_scores(const FitResult& fit,
                                    const PmCandidateCache& cache,
                                    const FocusFunctional& focus,
                                    const std::vector<std::vector<double>>& hg,
                                    const NpFocusContext& np,
                                    const QuadratureRule& q, int n);

}  // namespace specfic::detail
