#include "lmdp/quadratic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace lmdp {
namespace {

Eigen::VectorXd project(const Eigen::VectorXd& g, double radius) {
  const double n = g.norm();
  return n > radius ? (g * (radius / n)).eval() : g;
}

struct Spectral {
  Eigen::VectorXd eig;  // clamped at 0
  Eigen::MatrixXd vec;
  double tol = 0.0;
};

Spectral decompose(const Eigen::MatrixXd& f) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(f);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  Spectral s;
  s.eig = es.eigenvalues().cwiseMax(0.0);
  s.vec = es.eigenvectors();
  const double top = s.eig.size() ? s.eig.maxCoeff() : 0.0;
  s.tol = top * 1e-12 * static_cast<double>(std::max<Eigen::Index>(1, f.rows()));
  return s;
}

// Minimum-norm minimizer of the unconstrained quadratic (pseudo-inverse solution).
Eigen::VectorXd pinv_solution(const Spectral& s, const Eigen::VectorXd& b) {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(b.size());
  for (Eigen::Index i = 0; i < b.size(); ++i)
    if (s.eig[i] > s.tol) y[i] = b[i] / s.eig[i];
  return y;
}

QuadraticSolution trust_region(const Eigen::MatrixXd& f, const Eigen::VectorXd& nabla, double radius) {
  QuadraticSolution out;
  const Spectral s = decompose(f);
  const Eigen::VectorXd b = s.vec.transpose() * nabla;
  const double bnorm = b.norm();

  double null_mass = 0.0;
  for (Eigen::Index i = 0; i < b.size(); ++i)
    if (s.eig[i] <= s.tol) null_mass += b[i] * b[i];
  const Eigen::VectorXd y = pinv_solution(s, b);
  if (std::sqrt(null_mass) <= 1e-14 * bnorm && y.norm() <= radius) {
    out.g = s.vec * y;
    out.objective = quadratic_objective(f, nabla, out.g);
    return out;
  }

  // Boundary: find mu > 0 with ||(Lambda + mu)^{-1} b|| = radius by bisection.
  auto step_norm = [&](double mu) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < b.size(); ++i) {
      const double z = b[i] / (s.eig[i] + mu);
      acc += z * z;
    }
    return std::sqrt(acc);
  };
  double lo = 0.0;
  double hi = bnorm / radius;
  for (int it = 0; it < 300 && hi - lo > 1e-17 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (step_norm(mid) > radius)
      lo = mid;
    else
      hi = mid;
    ++out.iterations;
  }
  Eigen::VectorXd z(b.size());
  for (Eigen::Index i = 0; i < b.size(); ++i) z[i] = b[i] / (s.eig[i] + hi);
  out.g = project(s.vec * z, radius);
  out.on_boundary = true;
  out.objective = quadratic_objective(f, nabla, out.g);
  return out;
}

QuadraticSolution projected_gradient(const Eigen::MatrixXd& f, const Eigen::VectorXd& nabla,
                                     double radius, const QuadraticSolverOptions& options) {
  QuadraticSolution out;
  const Spectral s = decompose(f);
  const double lmax = s.eig.size() ? s.eig.maxCoeff() : 0.0;
  const double step = 1.0 / (2.0 * lmax + 1e-12);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(nabla.size());
  double obj = 0.0;
  for (int it = 0; it < options.max_iters; ++it) {
    Eigen::VectorXd next = project(g - step * (2.0 * (f * g) - 2.0 * nabla), radius);
    const double next_obj = quadratic_objective(f, nabla, next);
    ++out.iterations;
    const double decrease = obj - next_obj;
    if (next_obj <= obj) {
      g = std::move(next);
      obj = next_obj;
    }
    if (options.record_trace) out.trace.push_back(obj);
    if (decrease < options.tol) break;
  }
  // Never worse than the projected unconstrained candidate.
  Eigen::VectorXd candidate = project(s.vec * pinv_solution(s, s.vec.transpose() * nabla), radius);
  const double cand_obj = quadratic_objective(f, nabla, candidate);
  if (cand_obj < obj) {
    g = std::move(candidate);
    obj = cand_obj;
  }
  out.g = std::move(g);
  out.objective = obj;
  out.on_boundary = out.g.norm() >= radius * (1.0 - 1e-12);
  return out;
}

}  // namespace

double quadratic_objective(const Eigen::MatrixXd& f, const Eigen::VectorXd& nabla,
                           const Eigen::VectorXd& g) {
  return g.dot(f * g) - 2.0 * g.dot(nabla);
}

QuadraticSolution solve_constrained_quadratic(const Eigen::MatrixXd& f,
                                              const Eigen::VectorXd& nabla, double radius,
                                              const QuadraticSolverOptions& options) {
  if (!(radius > 0.0)) throw std::invalid_argument("ball radius must be > 0");
  if (f.rows() != f.cols() || f.rows() != nabla.size())
    throw std::invalid_argument("quadratic: dimension mismatch");
  if (f.isZero(0.0)) {
    QuadraticSolution out;
    const double n = nabla.norm();
    out.g = n > 0.0 ? (nabla * (radius / n)).eval() : Eigen::VectorXd::Zero(nabla.size());
    out.on_boundary = n > 0.0;
    out.objective = quadratic_objective(f, nabla, out.g);
    return out;
  }
  if (options.method == QuadraticMethod::kProjectedGradient)
    return projected_gradient(f, nabla, radius, options);
  return trust_region(f, nabla, radius);
}

}  // namespace lmdp
