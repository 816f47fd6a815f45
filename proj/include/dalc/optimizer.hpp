#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dalc {

enum class Method { QuasiNewton, GradientDescent };

Method parse_method(const std::string& name);
std::string method_name(Method m);

struct OptimizerConfig {
    std::size_t max_iterations = 1000;
    double gradient_tolerance = 1e-6;  // on the infinity norm
    Method method = Method::QuasiNewton;
    double armijo_c1 = 1e-4;
    double backtrack_factor = 0.5;
    std::size_t memory = 10;  // L-BFGS correction pairs

    void validate() const;
};

struct OptimizerTrace {
    std::size_t iterations = 0;
    std::vector<double> objective_values;  // start value, then one per accepted step
    double final_gradient_norm = 0.0;
    bool converged = false;
};

struct OptimizerResult {
    std::vector<double> point;
    OptimizerTrace trace;
};

/// Thrown when the objective or gradient is not finite at the start or at an
/// accepted point. last_point() is the last point with finite value and gradient
/// (the start itself if that is the offending point).
class OptimizerError : public std::runtime_error {
  public:
    OptimizerError(const std::string& what, std::vector<double> last_point)
        : std::runtime_error(what), last_point_(std::move(last_point)) {}
    const std::vector<double>& last_point() const { return last_point_; }

  private:
    std::vector<double> last_point_;
};

/// Returns f(x) and writes the gradient into grad (same size as x).
using ValueAndGradient = std::function<double(std::span<const double>, std::span<double>)>;

/// Minimizes a smooth function from `start` with Armijo backtracking.
///
/// QuasiNewton is limited-memory BFGS; a correction pair (s, y) is dropped
/// when s.y <= 1e-10 |s| |y|, which keeps the implicit inverse Hessian
/// positive definite. Trial points whose value is not finite fail the Armijo
/// test and are backtracked. Stops when |grad|_inf <= gradient_tolerance
/// (converged), after max_iterations steps, or when no step along the
/// steepest-descent direction makes progress (not converged).
OptimizerResult minimize(const ValueAndGradient& fg, std::vector<double> start,
                         const OptimizerConfig& config);

OptimizerResult minimize(const std::function<double(std::span<const double>)>& f,
                         const std::function<std::vector<double>(std::span<const double>)>& grad,
                         std::vector<double> start, const OptimizerConfig& config);

}  // namespace dalc
