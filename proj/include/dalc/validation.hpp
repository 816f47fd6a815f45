#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dalc/data.hpp"
#include "dalc/kernels.hpp"
#include "dalc/model.hpp"
#include "dalc/objective.hpp"
#include "dalc/optimizer.hpp"

namespace dalc {

/// n values from lo to hi (inclusive), evenly spaced in log10.
std::vector<double> log_space(double lo, double hi, std::size_t n);

struct GridSpec {
    std::vector<double> c_values;
    std::vector<double> b_values;

    /// 20 log-spaced C in [0.01, 1e6] and 20 log-spaced B in [1, 1e8].
    static GridSpec standard();
    static GridSpec log_spaced(double c_lo, double c_hi, std::size_t nc, double b_lo,
                               double b_hi, std::size_t nb);
    void validate() const;
};

/// Partition of 0..n-1 into k folds after a seeded shuffle; fold sizes differ
/// by at most one and every index appears in exactly one fold.
std::vector<std::vector<std::size_t>> make_folds(std::size_t n, std::size_t k,
                                                 std::uint64_t seed);

using Predictor = std::function<int(const SparseVector&)>;
/// Trains on a labeled source and an unlabeled target, returns a classifier.
using Learner = std::function<Predictor(const Dataset& labeled, const Dataset& unlabeled)>;

struct ReverseValidationResult {
    double risk = 0.0;                // mean of fold_risks
    std::vector<double> fold_risks;   // folds that were evaluated
    std::size_t folds_skipped = 0;
};

/// Reverse validation. For each source fold:
///   1. forward = learner(source minus fold, target)
///   2. self-label the target with forward
///   3. reverse = learner(target with self-labels, unlabeled source minus fold)
///   4. record reverse's zero-one error on the held-out labeled fold
/// A fold whose training part holds a single class is skipped; if every fold
/// is skipped the call throws std::runtime_error.
ReverseValidationResult reverse_validation(const Dataset& source, const Dataset& target,
                                           const Learner& learner, std::size_t folds,
                                           std::uint64_t seed);

/// Learner that trains a DALC model with the given settings.
Learner dalc_learner(const KernelSpec& kernel, const DalcHyperparams& hp,
                     const OptimizerConfig& opt = {}, const TrainOptions& options = {});

double reverse_validation_risk(const Dataset& source, const Dataset& target,
                               const KernelSpec& kernel, const DalcHyperparams& hp,
                               std::size_t folds = 5, std::uint64_t seed = 0,
                               const OptimizerConfig& opt = {},
                               const TrainOptions& options = {});

struct ReverseValidationReport {
    GridSpec grid;
    /// risk[ci * b_values.size() + bi] for C = c_values[ci], B = b_values[bi]
    std::vector<double> risk;
    std::size_t selected_c_index = 0;
    std::size_t selected_b_index = 0;
    std::size_t folds = 0;
    std::uint64_t seed = 0;
    std::size_t folds_skipped = 0;  // summed over cells

    double at(std::size_t ci, std::size_t bi) const { return risk[ci * grid.b_values.size() + bi]; }
    DalcHyperparams selected() const {
        return {grid.b_values[selected_b_index], grid.c_values[selected_c_index]};
    }
};

/// Index pair of the smallest risk; ties go to the smallest B, then the smallest C.
std::pair<std::size_t, std::size_t> select_cell(const GridSpec& grid,
                                                const std::vector<double>& risk);

/// Scores every cell with cell_risk (possibly on several threads) and selects
/// the minimum. The result does not depend on the thread count.
ReverseValidationReport grid_search(
    const GridSpec& grid, const std::function<ReverseValidationResult(const DalcHyperparams&)>& cell_risk,
    std::size_t threads = 1);

ReverseValidationReport grid_search(const Dataset& source, const Dataset& target,
                                    const KernelSpec& kernel, const GridSpec& grid,
                                    std::size_t folds = 5, std::uint64_t seed = 0,
                                    const OptimizerConfig& opt = {},
                                    const TrainOptions& options = {}, std::size_t threads = 1);

}  // namespace dalc
