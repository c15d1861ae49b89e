#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace qdvqe {

struct ValueGrad {
    double value = 0.0;
    std::vector<double> grad;
};

/// Value and gradient computed together, as the adjoint engine does.
using Objective = std::function<ValueGrad(std::span<const double>)>;

struct BfgsOptions {
    double gtol = 1e-5;
    int max_iterations = 200;
    double c1 = 1e-4;
    double c2 = 0.9;
    int max_line_search_evals = 40;
};

enum class BfgsStatus { Converged, MaxIterations, LineSearchFailed };

std::string to_string(BfgsStatus status);

struct BfgsResult {
    std::vector<double> x;
    double value = 0.0;
    double initial_value = 0.0;
    std::vector<double> grad;
    int iterations = 0;
    /// Every objective call increments both counters.
    int cost_evals = 0;
    int grad_evals = 0;
    BfgsStatus status = BfgsStatus::Converged;
};

/// Quasi-Newton minimization with a dense inverse-Hessian update and a
/// strong-Wolfe line search. Stops when the max-norm of the gradient is at most
/// gtol, after max_iterations, or when the line search fails; in every case the
/// lowest point seen is returned. Throws OptimizationAborted on a non-finite
/// objective value.
BfgsResult bfgs_minimize(const Objective& objective, std::vector<double> x0, const BfgsOptions& options = {});

}  // namespace qdvqe
