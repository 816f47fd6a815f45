#include "dalc/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace dalc {

Method parse_method(const std::string& name) {
    if (name == "quasi-newton" || name == "lbfgs" || name == "bfgs")
        return Method::QuasiNewton;
    if (name == "gradient-descent" || name == "gd")
        return Method::GradientDescent;
    throw std::invalid_argument("unknown optimizer method '" + name +
                                "' (expected quasi-newton or gradient-descent)");
}

std::string method_name(Method m) {
    return m == Method::QuasiNewton ? "quasi-newton" : "gradient-descent";
}

void OptimizerConfig::validate() const {
    if (max_iterations < 1)
        throw std::invalid_argument("optimizer: max_iterations must be at least 1");
    if (!(gradient_tolerance > 0.0))
        throw std::invalid_argument("optimizer: gradient tolerance must be positive");
    if (!(armijo_c1 > 0.0 && armijo_c1 < 1.0))
        throw std::invalid_argument("optimizer: Armijo constant must lie in (0, 1)");
    if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0))
        throw std::invalid_argument("optimizer: backtracking factor must lie in (0, 1)");
    if (memory < 1)
        throw std::invalid_argument("optimizer: memory must be at least 1");
}

namespace {

double dotp(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

double inf_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v)
        m = std::max(m, std::abs(x));
    return m;
}

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

struct CorrectionPair {
    std::vector<double> s, y;
    double rho;
};

// Two-loop recursion: d = -H g.
void lbfgs_direction(const std::deque<CorrectionPair>& mem, std::span<const double> g,
                     std::span<double> d) {
    std::copy(g.begin(), g.end(), d.begin());
    std::vector<double> a(mem.size());
    for (std::size_t k = mem.size(); k-- > 0;) {
        a[k] = mem[k].rho * dotp(mem[k].s, d);
        for (std::size_t i = 0; i < d.size(); ++i)
            d[i] -= a[k] * mem[k].y[i];
    }
    if (!mem.empty()) {
        const auto& last = mem.back();
        const double gamma = dotp(last.s, last.y) / dotp(last.y, last.y);
        for (double& v : d)
            v *= gamma;
    }
    for (std::size_t k = 0; k < mem.size(); ++k) {
        const double b = mem[k].rho * dotp(mem[k].y, d);
        for (std::size_t i = 0; i < d.size(); ++i)
            d[i] += (a[k] - b) * mem[k].s[i];
    }
    for (double& v : d)
        v = -v;
}

}  // namespace

OptimizerResult minimize(const ValueAndGradient& fg, std::vector<double> start,
                         const OptimizerConfig& config) {
    config.validate();
    const std::size_t n = start.size();
    std::vector<double> x = std::move(start);
    std::vector<double> g(n);
    double f = fg(x, g);
    if (!std::isfinite(f) || !all_finite(g))
        throw OptimizerError("optimizer: objective or gradient not finite at the start point", x);

    OptimizerResult result;
    OptimizerTrace& trace = result.trace;
    trace.objective_values.push_back(f);

    std::deque<CorrectionPair> memory;
    std::vector<double> d(n), x_new(n), g_new(n);
    double gd_step = 0.0;  // last accepted step length for gradient descent

    while (true) {
        if (inf_norm(g) <= config.gradient_tolerance) {
            trace.converged = true;
            break;
        }
        if (trace.iterations >= config.max_iterations)
            break;

        bool steepest = config.method == Method::GradientDescent || memory.empty();
        bool accepted = false;
        double f_new = f;
        for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
            if (steepest) {
                for (std::size_t i = 0; i < n; ++i)
                    d[i] = -g[i];
            } else {
                lbfgs_direction(memory, g, d);
            }
            double slope = dotp(g, d);
            if (!(slope < 0.0)) {
                memory.clear();
                steepest = true;
                for (std::size_t i = 0; i < n; ++i)
                    d[i] = -g[i];
                slope = dotp(g, d);
            }
            const double d_norm = std::sqrt(dotp(d, d));
            double t;
            if (!steepest)
                t = 1.0;
            else if (config.method == Method::GradientDescent && gd_step > 0.0)
                t = 2.0 * gd_step;
            else
                t = std::min(1.0, 1.0 / d_norm);

            const double x_scale = 1.0 + std::sqrt(dotp(x, x));
            while (t * d_norm > 1e-16 * x_scale) {
                for (std::size_t i = 0; i < n; ++i)
                    x_new[i] = x[i] + t * d[i];
                f_new = fg(x_new, g_new);
                if (std::isfinite(f_new) && f_new <= f + config.armijo_c1 * t * slope) {
                    accepted = true;
                    break;
                }
                t *= config.backtrack_factor;
            }
            if (accepted) {
                if (config.method == Method::GradientDescent)
                    gd_step = t;
            } else if (!steepest) {
                memory.clear();
                steepest = true;
            } else {
                break;
            }
        }
        if (!accepted)
            break;
        if (!all_finite(g_new))
            throw OptimizerError("optimizer: gradient not finite at an accepted point", x);

        if (config.method == Method::QuasiNewton) {
            CorrectionPair p{std::vector<double>(n), std::vector<double>(n), 0.0};
            for (std::size_t i = 0; i < n; ++i) {
                p.s[i] = x_new[i] - x[i];
                p.y[i] = g_new[i] - g[i];
            }
            const double sy = dotp(p.s, p.y);
            if (sy > 1e-10 * std::sqrt(dotp(p.s, p.s)) * std::sqrt(dotp(p.y, p.y))) {
                p.rho = 1.0 / sy;
                memory.push_back(std::move(p));
                if (memory.size() > config.memory)
                    memory.pop_front();
            }
        }
        x.swap(x_new);
        g.swap(g_new);
        f = f_new;
        ++trace.iterations;
        trace.objective_values.push_back(f);
    }
    trace.final_gradient_norm = inf_norm(g);
    result.point = std::move(x);
    return result;
}

OptimizerResult minimize(const std::function<double(std::span<const double>)>& f,
                         const std::function<std::vector<double>(std::span<const double>)>& grad,
                         std::vector<double> start, const OptimizerConfig& config) {
    ValueAndGradient fg = [&](std::span<const double> x, std::span<double> g) {
        const double v = f(x);
        const std::vector<double> gv = grad(x);
        if (gv.size() != g.size())
            throw std::invalid_argument("optimizer: gradient has the wrong dimension");
        std::copy(gv.begin(), gv.end(), g.begin());
        return v;
    };
    return minimize(fg, std::move(start), config);
}

}  // namespace dalc
