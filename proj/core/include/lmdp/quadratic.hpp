#pragma once

#include <vector>

#include <Eigen/Core>

namespace lmdp {

enum class QuadraticMethod {
  // Eigendecomposition plus secular-equation root finding.
  kTrustRegion,
  // Projected gradient descent with step 1 / (2 lambda_max + eps).
  kProjectedGradient,
};

struct QuadraticSolverOptions {
  QuadraticMethod method = QuadraticMethod::kTrustRegion;
  double tol = 1e-10;
  int max_iters = 5000;
  bool record_trace = false;
};

struct QuadraticSolution {
  Eigen::VectorXd g;
  double objective = 0.0;
  int iterations = 0;
  bool on_boundary = false;
  // Objective after each PGD iteration when record_trace is set.
  std::vector<double> trace;
};

// g^T F g - 2 g^T nabla
double quadratic_objective(const Eigen::MatrixXd& f, const Eigen::VectorXd& nabla,
                           const Eigen::VectorXd& g);

// argmin over ||g|| <= radius of g^T F g - 2 g^T nabla, F symmetric PSD.
QuadraticSolution solve_constrained_quadratic(const Eigen::MatrixXd& f,
                                              const Eigen::VectorXd& nabla, double radius,
                                              const QuadraticSolverOptions& options = {});

}  // namespace lmdp
