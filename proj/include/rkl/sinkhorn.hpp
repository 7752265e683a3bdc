// Entropic optimal transport between two particle ensembles: log-domain
// Sinkhorn scaling, the sharp divergence Tr(D*plan), and its exact gradient
// with respect to the source particles.
#pragma once

#include <Eigen/Dense>

#include "rkl/measure.hpp"

namespace rkl {

// Squared-difference cost matrix D(i,j) = (source_i - reference_j)^2.
Eigen::MatrixXd cost_matrix(const ParticleEnsemble& source, const ParticleEnsemble& reference);

// Entropic coupling with both marginals uniform at 1/N. The plan is always
// assembled in the log domain as exp((f_i + g_j - D_ij)/eps), so entries stay
// finite even when the exp-domain scalings u = exp(g/eps), v = exp(f/eps)
// would overflow; the scalings are kept for the algebraic identity
// plan(i,j) = scalingV(i) * exp(-cost(i,j)/eps) * scalingU(j).
struct TransportPlan {
  Eigen::MatrixXd plan;        // N x N coupling
  Eigen::MatrixXd cost;        // N x N squared-difference cost
  Eigen::VectorXd scalingU;    // column scalings, exp(potentialG/epsilon)
  Eigen::VectorXd scalingV;    // row scalings, exp(potentialF/epsilon)
  Eigen::VectorXd potentialF;  // row dual potential (log domain)
  Eigen::VectorXd potentialG;  // column dual potential (log domain)
  double epsilon = 0.0;
  int iterations = 0;
  double residual = 0.0;  // sup-norm marginal violation actually achieved
  bool converged = false;
};

// Sharp divergence value sum_ij plan(i,j)*cost(i,j) together with the plan.
struct DivergenceResult {
  double value = 0.0;
  TransportPlan plan;
};

inline constexpr double kSinkhornDefaultTolerance = 1e-9;
inline constexpr int kSinkhornDefaultMaxIterations = 10000;

// Log-domain Sinkhorn iteration with epsilon annealing for cold starts.
// Stops when the sup-norm marginal residual drops below `tolerance`, or flags
// non-convergence in the result after `maxIterations` (non-fatal).
TransportPlan sinkhorn_plan(const ParticleEnsemble& source, const ParticleEnsemble& reference,
                            double epsilon, double tolerance = kSinkhornDefaultTolerance,
                            int maxIterations = kSinkhornDefaultMaxIterations);

DivergenceResult sinkhorn_divergence(const ParticleEnsemble& source,
                                     const ParticleEnsemble& reference, double epsilon,
                                     double tolerance = kSinkhornDefaultTolerance);

// Gradient of the sharp divergence with respect to each source particle,
// obtained by implicit differentiation of the marginal fixed point (see the
// .cpp for the linear system); matches central finite differences of
// sinkhorn_divergence. Requires a plan converged to residual <= 1e-9.
std::vector<double> sinkhorn_gradient(const ParticleEnsemble& source,
                                      const ParticleEnsemble& reference,
                                      const TransportPlan& plan);

// Stateful solver that re-uses the previous dual potentials as warm start.
// Successive solves for slowly moving ensembles then take a handful of
// iterations instead of a full annealing sweep. Same fixed point as
// sinkhorn_plan, so results agree to the convergence tolerance.
class SinkhornSolver {
 public:
  explicit SinkhornSolver(double epsilon, double tolerance = kSinkhornDefaultTolerance,
                          int maxIterations = kSinkhornDefaultMaxIterations);

  const TransportPlan& solve(const ParticleEnsemble& source, const ParticleEnsemble& reference);
  void reset();

 private:
  double epsilon_;
  double tolerance_;
  int maxIterations_;
  bool hasState_ = false;
  Eigen::VectorXd f_, g_;
  TransportPlan last_;
};

}  // namespace rkl
