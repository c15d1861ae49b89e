#include "qdvqe/bfgs.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include <Eigen/Dense>

#include "qdvqe/errors.hpp"

namespace qdvqe {
namespace {

using Vec = Eigen::VectorXd;

struct Point {
    double alpha = 0.0;
    double value = 0.0;
    double slope = 0.0;  // directional derivative along the search direction
    Vec grad;
};

class CountingObjective {
  public:
    explicit CountingObjective(const Objective& f) : f_(f) {}

    std::pair<double, Vec> operator()(const Vec& x) {
        ++calls_;
        ValueGrad vg = f_(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
        if (!std::isfinite(vg.value)) {
            throw OptimizationAborted("objective returned a non-finite value after " + std::to_string(calls_) +
                                      " evaluations");
        }
        if (vg.grad.size() != static_cast<std::size_t>(x.size())) {
            throw DimensionError("objective gradient has the wrong length");
        }
        Vec g = Eigen::Map<const Vec>(vg.grad.data(), static_cast<Eigen::Index>(vg.grad.size()));
        if (!g.allFinite()) {
            throw OptimizationAborted("objective returned a non-finite gradient");
        }
        return {vg.value, std::move(g)};
    }

    int calls() const noexcept { return calls_; }

  private:
    const Objective& f_;
    int calls_ = 0;
};

// Minimizer of the cubic matching values and slopes at both ends, or the
// midpoint when the cubic has no usable minimum inside the safeguarded range.
double interpolate(const Point& lo, const Point& hi) {
    const double a0 = lo.alpha;
    const double a1 = hi.alpha;
    const double width = a1 - a0;
    const double d1 = lo.slope + hi.slope - 3.0 * (lo.value - hi.value) / (a0 - a1);
    const double disc = d1 * d1 - lo.slope * hi.slope;
    double trial = 0.5 * (a0 + a1);
    if (disc >= 0.0) {
        const double d2 = std::copysign(std::sqrt(disc), width);
        const double denom = hi.slope - lo.slope + 2.0 * d2;
        if (denom != 0.0) {
            trial = a1 - width * (hi.slope + d2 - d1) / denom;
        }
    }
    const double left = std::min(a0, a1) + 0.1 * std::abs(width);
    const double right = std::max(a0, a1) - 0.1 * std::abs(width);
    if (!std::isfinite(trial) || trial < left || trial > right) {
        trial = 0.5 * (a0 + a1);
    }
    return trial;
}

class LineSearch {
  public:
    LineSearch(CountingObjective& f, const Vec& x, const Vec& direction, const Point& origin, const BfgsOptions& opts)
        : f_(f), x_(x), p_(direction), origin_(origin), opts_(opts) {}

    /// Point satisfying the strong Wolfe conditions, or nullopt on failure.
    std::optional<Point> search(double alpha) {
        Point prev = origin_;
        for (int i = 0; evals_ < opts_.max_line_search_evals; ++i) {
            Point cur = evaluate(alpha);
            if (!sufficient_decrease(cur) || (i > 0 && cur.value >= prev.value)) {
                return zoom(prev, cur);
            }
            if (std::abs(cur.slope) <= -opts_.c2 * origin_.slope) {
                return cur;
            }
            if (cur.slope >= 0.0) {
                return zoom(cur, prev);
            }
            prev = cur;
            alpha *= 2.0;
        }
        return std::nullopt;
    }

    const std::optional<Point>& best() const noexcept { return best_; }

  private:
    Point evaluate(double alpha) {
        ++evals_;
        auto [value, grad] = f_(x_ + alpha * p_);
        Point pt{alpha, value, grad.dot(p_), std::move(grad)};
        if (!best_ || pt.value < best_->value) {
            best_ = pt;
        }
        return pt;
    }

    bool sufficient_decrease(const Point& pt) const {
        return pt.value <= origin_.value + opts_.c1 * pt.alpha * origin_.slope;
    }

    std::optional<Point> zoom(Point lo, Point hi) {
        while (evals_ < opts_.max_line_search_evals) {
            if (std::abs(hi.alpha - lo.alpha) < 1e-16 * std::max(1.0, std::abs(lo.alpha))) {
                break;
            }
            Point cur = evaluate(interpolate(lo, hi));
            if (!sufficient_decrease(cur) || cur.value >= lo.value) {
                hi = cur;
                continue;
            }
            if (std::abs(cur.slope) <= -opts_.c2 * origin_.slope) {
                return cur;
            }
            if (cur.slope * (hi.alpha - lo.alpha) >= 0.0) {
                hi = lo;
            }
            lo = cur;
        }
        return std::nullopt;
    }

    CountingObjective& f_;
    const Vec& x_;
    const Vec& p_;
    Point origin_;
    const BfgsOptions& opts_;
    int evals_ = 0;
    std::optional<Point> best_;
};

}  // namespace

std::string to_string(BfgsStatus status) {
    switch (status) {
    case BfgsStatus::Converged:
        return "converged";
    case BfgsStatus::MaxIterations:
        return "max-iterations";
    case BfgsStatus::LineSearchFailed:
        return "line-search-failed";
    }
    return "?";
}

BfgsResult bfgs_minimize(const Objective& objective, std::vector<double> x0, const BfgsOptions& options) {
    if (!(options.gtol > 0.0)) {
        throw ContractViolation("gtol must be positive");
    }
    CountingObjective f(objective);
    const auto n = static_cast<Eigen::Index>(x0.size());
    Vec x = Eigen::Map<const Vec>(x0.data(), n);
    auto [value, grad] = f(x);

    BfgsResult result;
    result.initial_value = value;
    result.status = BfgsStatus::MaxIterations;

    Eigen::MatrixXd inv_hessian = Eigen::MatrixXd::Identity(n, n);
    double previous_value = value + 0.5 * grad.norm();
    for (int it = 0; it <= options.max_iterations; ++it) {
        if (n == 0 || grad.lpNorm<Eigen::Infinity>() <= options.gtol) {
            result.status = BfgsStatus::Converged;
            break;
        }
        if (it == options.max_iterations) {
            break;
        }
        result.iterations = it + 1;
        Vec direction = -inv_hessian * grad;
        double slope = grad.dot(direction);
        if (!(slope < 0.0)) {
            inv_hessian.setIdentity();
            direction = -grad;
            slope = -grad.squaredNorm();
        }
        double alpha = 1.0;
        if (previous_value > value) {
            alpha = std::min(1.0, 1.01 * 2.0 * (value - previous_value) / slope);
        }
        if (!(alpha > 0.0)) {
            alpha = 1.0;
        }

        LineSearch ls(f, x, direction, Point{0.0, value, slope, grad}, options);
        std::optional<Point> step = ls.search(alpha);
        if (!step) {
            // Keep the lowest point the search found, if it improved on x.
            if (ls.best() && ls.best()->value < value) {
                x += ls.best()->alpha * direction;
                value = ls.best()->value;
                grad = ls.best()->grad;
            }
            result.status = BfgsStatus::LineSearchFailed;
            break;
        }
        const Vec s = step->alpha * direction;
        const Vec y = step->grad - grad;
        x += s;
        previous_value = value;
        value = step->value;
        grad = step->grad;

        const double sy = s.dot(y);
        if (sy > 1e-14 * s.norm() * y.norm() && sy > 0.0) {
            const double rho = 1.0 / sy;
            const Vec hy = inv_hessian * y;
            // (I - rho s y^T) H (I - rho y s^T) + rho s s^T, expanded.
            inv_hessian += (rho * rho * y.dot(hy) + rho) * (s * s.transpose()) - rho * (hy * s.transpose() + s * hy.transpose());
        }
    }

    result.x.assign(x.data(), x.data() + n);
    result.value = value;
    result.grad.assign(grad.data(), grad.data() + n);
    result.cost_evals = f.calls();
    result.grad_evals = f.calls();
    return result;
}

}  // namespace qdvqe
