#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dalc/data.hpp"
#include "dalc/kernels.hpp"
#include "dalc/objective.hpp"
#include "dalc/optimizer.hpp"

namespace dalc {

enum class ModelForm { Primal, Dual };

/// sgn with sgn(0) = +1.
inline int sign_label(double v) { return v >= 0.0 ? 1 : -1; }

/// A trained classifier, either a primal weight vector w (linear kernel only)
/// or dual weights alpha over the m_s + m_t training points, stored
/// source-first, with their kernel.
class DalcModel {
  public:
    static DalcModel primal(std::vector<double> w, DalcHyperparams hp, OptimizerTrace trace,
                            std::size_t m_s, std::size_t m_t);
    static DalcModel dual(std::vector<double> alpha, Dataset support, KernelSpec kernel,
                          DalcHyperparams hp, OptimizerTrace trace, std::size_t m_s,
                          std::size_t m_t);

    ModelForm form() const { return form_; }
    const std::vector<double>& weights() const { return weights_; }
    const KernelSpec& kernel() const { return kernel_; }
    const Dataset& support() const { return support_; }
    const DalcHyperparams& hyperparams() const { return hp_; }
    const OptimizerTrace& trace() const { return trace_; }
    std::size_t source_count() const { return m_s_; }
    std::size_t target_count() const { return m_t_; }
    /// Input dimension the model accepts.
    std::size_t dim() const;

    /// Primal: w.x. Dual: sum_i alpha_i k(x_i, x).
    double decision_value(const SparseVector& x) const;
    double decision_value(std::span<const double> x) const;
    int predict(const SparseVector& x) const { return sign_label(decision_value(x)); }
    int predict(std::span<const double> x) const { return sign_label(decision_value(x)); }

    /// decision_value / sqrt(k(x, x)): the margin the probit losses act on.
    double normalized_margin(const SparseVector& x) const;

    std::vector<double> decision_values(const Dataset& data) const;
    std::vector<int> predict(const Dataset& data) const;

    /// KL(rho_w || pi_0) = |w|^2 / 2, i.e. alpha' K alpha / 2 in the dual.
    double kl() const;

  private:
    DalcModel() = default;
    void check_dim(std::size_t extent) const;

    ModelForm form_ = ModelForm::Primal;
    std::vector<double> weights_;
    Dataset support_;
    KernelSpec kernel_;
    DalcHyperparams hp_;
    OptimizerTrace trace_;
    std::size_t m_s_ = 0, m_t_ = 0;
};

struct TrainOptions {
    /// Train w directly; requires the linear kernel.
    bool primal = false;
    /// Starting point; defaults to w = 0 (primal) or alpha_i = 1/M (dual).
    std::optional<std::vector<double>> start;
};

/// Minimizes the DALC objective. Throws std::invalid_argument when either
/// sample is empty, the source is unlabeled, or primal is requested with a
/// non-linear kernel.
DalcModel train(const Dataset& source, const Dataset& target, const KernelSpec& kernel,
                const DalcHyperparams& hp, const OptimizerConfig& opt = {},
                const TrainOptions& options = {});

class UnsupportedVersionError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Model files are JSON:
//
//   { "format": "dalc-model", "version": 1,
//     "form": "primal" | "dual",
//     "kernel": { "family": "linear" | "rbf", "gamma": g },
//     "hyperparams": { "B": b, "C": c },
//     "m_s": n, "m_t": n, "dim": d,
//     "weights": [...],                    w or alpha
//     "support_points": [ { "indices": [...], "values": [...] }, ... ],   dual only
//     "trace": { "iterations": n, "converged": bool,
//                "final_gradient_norm": g, "objective_values": [...] } }
//
// Numbers are written in shortest round-trip decimal form, so weights reload
// bit-identically. Indices are 0-based.
inline constexpr int kModelFormatVersion = 1;

std::string model_to_json(const DalcModel& model);
DalcModel model_from_json(const std::string& text);
void save_model(const DalcModel& model, const std::filesystem::path& path);
DalcModel load_model(const std::filesystem::path& path);

}  // namespace dalc
