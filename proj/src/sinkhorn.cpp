#include "rkl/sinkhorn.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <string>

#include "rkl/errors.hpp"

namespace rkl {

namespace {

Eigen::VectorXd to_vector(const ParticleEnsemble& e) {
  Eigen::VectorXd v(e.size());
  for (int i = 0; i < e.size(); ++i) v(i) = e.particle(i);
  return v;
}

// Row-wise log-sum-exp of (g_j - D_ij)/eps, stabilized by the running row max.
void update_f(const Eigen::MatrixXd& D, const Eigen::VectorXd& g, double eps, double logMass,
              Eigen::VectorXd& f) {
  const int n = static_cast<int>(D.rows());
  for (int i = 0; i < n; ++i) {
    const Eigen::ArrayXd a = (g.transpose().array() - D.row(i).array()) / eps;
    const double m = a.maxCoeff();
    f(i) = eps * (logMass - (m + std::log((a - m).exp().sum())));
  }
}

void update_g(const Eigen::MatrixXd& D, const Eigen::VectorXd& f, double eps, double logMass,
              Eigen::VectorXd& g) {
  const int n = static_cast<int>(D.cols());
  for (int j = 0; j < n; ++j) {
    const Eigen::ArrayXd a = (f.array() - D.col(j).array()) / eps;
    const double m = a.maxCoeff();
    g(j) = eps * (logMass - (m + std::log((a - m).exp().sum())));
  }
}

Eigen::MatrixXd assemble_plan(const Eigen::MatrixXd& D, const Eigen::VectorXd& f,
                              const Eigen::VectorXd& g, double eps) {
  return ((((-D).colwise() + f).rowwise() + g.transpose()) / eps).array().exp().matrix();
}

double marginal_residual(const Eigen::MatrixXd& plan, double mass) {
  const double rowErr = (plan.rowwise().sum().array() - mass).abs().maxCoeff();
  const double colErr = (plan.colwise().sum().array() - mass).abs().maxCoeff();
  return std::max(rowErr, colErr);
}

// Iterate at a fixed eps until the residual target or the iteration budget is
// hit; returns the achieved residual and adds consumed sweeps to `iterations`.
double iterate_level(const Eigen::MatrixXd& D, double eps, double logMass, double target,
                     int budget, Eigen::VectorXd& f, Eigen::VectorXd& g, int& iterations) {
  const double mass = std::exp(logMass);
  double residual = std::numeric_limits<double>::infinity();
  for (int it = 0; it < budget; ++it) {
    update_f(D, g, eps, logMass, f);
    update_g(D, f, eps, logMass, g);
    ++iterations;
    residual = marginal_residual(assemble_plan(D, f, g, eps), mass);
    if (residual <= target) break;
  }
  return residual;
}

// Damped Newton step on the dual potentials. Linearizing the marginal map at
// (f, g) gives [[diag(a), pi], [pi^T, diag(b)]] [df; dg] = eps*[mass - a;
// mass - b], with the constant-shift nullspace pinned by dg_{n-1} = 0.
// Near-coincident particles make plain Sinkhorn's linear rate arbitrarily
// slow; once the iterate is close, one Newton step closes the remaining
// decades quadratically. Returns the residual after the (backtracked) step,
// or the incoming residual when no step length improves it.
double newton_polish(const Eigen::MatrixXd& D, double eps, double logMass, Eigen::VectorXd& f,
                     Eigen::VectorXd& g) {
  const int n = static_cast<int>(D.rows());
  const double mass = std::exp(logMass);
  const Eigen::MatrixXd plan = assemble_plan(D, f, g, eps);
  const Eigen::VectorXd a = plan.rowwise().sum();
  const Eigen::VectorXd b = plan.colwise().sum();
  const double incoming = std::max((a.array() - mass).abs().maxCoeff(),
                                   (b.array() - mass).abs().maxCoeff());

  const int m = 2 * n - 1;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd rhs(m);
  M.topLeftCorner(n, n).diagonal() = a;
  if (n > 1) {
    M.topRightCorner(n, n - 1) = plan.leftCols(n - 1);
    M.bottomLeftCorner(n - 1, n) = plan.leftCols(n - 1).transpose();
    M.bottomRightCorner(n - 1, n - 1).diagonal() = b.head(n - 1);
  }
  rhs.head(n) = eps * (mass - a.array()).matrix();
  rhs.tail(n - 1) = eps * (mass - b.head(n - 1).array()).matrix();
  const Eigen::VectorXd sol = M.ldlt().solve(rhs);
  const Eigen::VectorXd df = sol.head(n);
  Eigen::VectorXd dg = Eigen::VectorXd::Zero(n);
  dg.head(n - 1) = sol.tail(n - 1);

  for (double s : {1.0, 0.5, 0.25, 0.125}) {
    const Eigen::VectorXd fc = f + s * df;
    const Eigen::VectorXd gc = g + s * dg;
    const double r = marginal_residual(assemble_plan(D, fc, gc, eps), mass);
    if (r < incoming) {
      f = fc;
      g = gc;
      return r;
    }
  }
  return incoming;
}

TransportPlan finish_plan(const Eigen::MatrixXd& D, const Eigen::VectorXd& f,
                          const Eigen::VectorXd& g, double eps, int iterations, double residual,
                          double tolerance) {
  TransportPlan out;
  out.plan = assemble_plan(D, f, g, eps);
  out.cost = D;
  out.potentialF = f;
  out.potentialG = g;
  out.scalingV = (f / eps).array().exp();
  out.scalingU = (g / eps).array().exp();
  out.epsilon = eps;
  out.iterations = iterations;
  out.residual = residual;
  out.converged = residual <= tolerance;
  return out;
}

TransportPlan solve_from(const Eigen::MatrixXd& D, double eps, double tolerance, int maxIterations,
                         Eigen::VectorXd& f, Eigen::VectorXd& g, bool anneal) {
  const int n = static_cast<int>(D.rows());
  const double logMass = -std::log(static_cast<double>(n));
  int iterations = 0;
  double residual = std::numeric_limits<double>::infinity();

  if (anneal) {
    // Cold starts at eps far below the cost scale converge painfully slowly;
    // walking eps down from a quarter of the largest cost keeps every level a
    // small correction of the previous one.
    double level = std::max(eps, 0.25 * D.maxCoeff());
    const double annealTarget = std::max(tolerance, 1e-7);
    while (level > eps && iterations < maxIterations) {
      iterate_level(D, level, logMass, annealTarget, std::min(50, maxIterations - iterations), f,
                    g, iterations);
      level = std::max(eps, 0.5 * level);
    }
  }
  // Final level. Plain sweeps mix slowly whenever the plan is near a sparse
  // assignment (the update only diffuses along the coupled band), so polish
  // with Newton as soon as the iterate is inside its basin -- warm starts
  // usually land there outright -- and otherwise sweep in short bursts.
  const double mass = std::exp(logMass);
  residual = marginal_residual(assemble_plan(D, f, g, eps), mass);
  while (residual > tolerance && iterations < maxIterations) {
    if (residual < 0.05 * mass) {
      const double polished = newton_polish(D, eps, logMass, f, g);
      ++iterations;
      if (polished < residual) {
        residual = polished;
        continue;
      }
      // Newton stalled; fall back to sweeps to move the iterate.
    }
    residual = iterate_level(D, eps, logMass, tolerance,
                             std::min(20, maxIterations - iterations), f, g, iterations);
  }
  if (std::getenv("RKL_SINKHORN_DEBUG") && residual > tolerance) {
    std::fprintf(stderr, "[sinkhorn-debug] anneal=%d eps=%g iters=%d residual=%.3e maxCost=%g\n",
                 anneal ? 1 : 0, eps, iterations, residual, D.maxCoeff());
  }
  return finish_plan(D, f, g, eps, iterations, residual, tolerance);
}

}  // namespace

Eigen::MatrixXd cost_matrix(const ParticleEnsemble& source, const ParticleEnsemble& reference) {
  const Eigen::VectorXd a = to_vector(source);
  const Eigen::VectorXd b = to_vector(reference);
  Eigen::MatrixXd D(a.size(), b.size());
  for (int i = 0; i < a.size(); ++i) {
    D.row(i) = (b.array() - a(i)).square().transpose();
  }
  return D;
}

TransportPlan sinkhorn_plan(const ParticleEnsemble& source, const ParticleEnsemble& reference,
                            double epsilon, double tolerance, int maxIterations) {
  if (source.size() != reference.size()) {
    throw ConfigError("sinkhorn requires matching particle counts, got " +
                      std::to_string(source.size()) + " vs " + std::to_string(reference.size()));
  }
  if (!(epsilon > 0.0) || !(tolerance > 0.0)) {
    throw ConfigError("sinkhorn requires epsilon > 0 and tolerance > 0");
  }
  const Eigen::MatrixXd D = cost_matrix(source, reference);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(source.size());
  Eigen::VectorXd g = Eigen::VectorXd::Zero(source.size());
  return solve_from(D, epsilon, tolerance, maxIterations, f, g, /*anneal=*/true);
}

DivergenceResult sinkhorn_divergence(const ParticleEnsemble& source,
                                     const ParticleEnsemble& reference, double epsilon,
                                     double tolerance) {
  DivergenceResult out;
  out.plan = sinkhorn_plan(source, reference, epsilon, tolerance);
  out.value = (out.plan.plan.array() * out.plan.cost.array()).sum();
  return out;
}

std::vector<double> sinkhorn_gradient(const ParticleEnsemble& source,
                                      const ParticleEnsemble& reference,
                                      const TransportPlan& plan) {
  const int n = source.size();
  if (reference.size() != n || plan.plan.rows() != n || plan.plan.cols() != n) {
    throw ConfigError("sinkhorn_gradient: mismatched sizes");
  }
  if (!plan.converged || !(plan.residual <= 1e-9)) {
    throw ConfigError("sinkhorn_gradient: stale plan (residual " + std::to_string(plan.residual) +
                      " > 1e-9); re-solve to tolerance 1e-9 first");
  }

  const Eigen::MatrixXd& pi = plan.plan;
  const Eigen::MatrixXd& D = plan.cost;
  const double eps = plan.epsilon;

  // The divergence S = sum pi_ij D_ij depends on D both directly and through
  // the dual potentials pinned by the marginal constraints. Differentiating
  // the constraints sum_j pi_ij = a_i and sum_i pi_ij = b_j gives the
  // symmetric system below; with its solution (lambda, nu),
  //   dS/dD_ij = pi_ij * (1 + (lambda_i + nu_j - D_ij)/eps).
  const Eigen::VectorXd a = pi.rowwise().sum();
  const Eigen::VectorXd b = pi.colwise().sum();
  const Eigen::VectorXd p = (pi.array() * D.array()).rowwise().sum();
  const Eigen::VectorXd q = (pi.array() * D.array()).colwise().sum();

  // The system matrix [[diag(a), pi], [pi^T, diag(b)]] has the one-dimensional
  // nullspace span{[1; -1]} (potentials shift by a constant); pin nu_{n-1}=0
  // and solve the remaining (2n-1) x (2n-1) positive definite block.
  const int m = 2 * n - 1;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd rhs(m);
  M.topLeftCorner(n, n).diagonal() = a;
  if (n > 1) {
    M.topRightCorner(n, n - 1) = pi.leftCols(n - 1);
    M.bottomLeftCorner(n - 1, n) = pi.leftCols(n - 1).transpose();
    M.bottomRightCorner(n - 1, n - 1).diagonal() = b.head(n - 1);
  }
  rhs.head(n) = p;
  rhs.tail(n - 1) = q.head(n - 1);
  const Eigen::VectorXd sol = M.ldlt().solve(rhs);
  const Eigen::VectorXd lambda = sol.head(n);
  Eigen::VectorXd nu = Eigen::VectorXd::Zero(n);
  nu.head(n - 1) = sol.tail(n - 1);

  std::vector<double> grad(static_cast<std::size_t>(n), 0.0);
  for (int k = 0; k < n; ++k) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
      const double dSdD = pi(k, j) * (1.0 + (lambda(k) + nu(j) - D(k, j)) / eps);
      acc += dSdD * 2.0 * (source.particle(k) - reference.particle(j));
    }
    grad[static_cast<std::size_t>(k)] = acc;
  }
  return grad;
}

SinkhornSolver::SinkhornSolver(double epsilon, double tolerance, int maxIterations)
    : epsilon_(epsilon), tolerance_(tolerance), maxIterations_(maxIterations) {
  if (!(epsilon > 0.0) || !(tolerance > 0.0)) {
    throw ConfigError("sinkhorn solver requires epsilon > 0 and tolerance > 0");
  }
}

void SinkhornSolver::reset() { hasState_ = false; }

const TransportPlan& SinkhornSolver::solve(const ParticleEnsemble& source,
                                           const ParticleEnsemble& reference) {
  if (source.size() != reference.size()) {
    throw ConfigError("sinkhorn solver: mismatched particle counts");
  }
  const Eigen::MatrixXd D = cost_matrix(source, reference);
  if (!hasState_ || f_.size() != source.size()) {
    f_ = Eigen::VectorXd::Zero(source.size());
    g_ = Eigen::VectorXd::Zero(source.size());
    last_ = solve_from(D, epsilon_, tolerance_, maxIterations_, f_, g_, /*anneal=*/true);
  } else {
    // Warm starts usually converge in a handful of sweeps, but when the source
    // moves far between solves the stale potentials can leave the plain
    // iteration stalled at small blur. Cap the warm attempt and fall back to a
    // fresh annealed solve rather than burning the whole budget.
    const int warmBudget = std::min(maxIterations_, 80);
    last_ = solve_from(D, epsilon_, tolerance_, warmBudget, f_, g_, /*anneal=*/false);
    if (!last_.converged) {
      f_.setZero();
      g_.setZero();
      last_ = solve_from(D, epsilon_, tolerance_, maxIterations_, f_, g_, /*anneal=*/true);
    }
  }
  hasState_ = true;
  return last_;
}

}  // namespace rkl
