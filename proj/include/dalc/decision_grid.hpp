#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>

#include "dalc/model.hpp"

namespace dalc {

struct GridBounds {
    double x1_min = -2.0, x1_max = 3.0;
    double x2_min = -2.0, x2_max = 2.5;
};

/// CSV with header `x1,x2,value` over a resolution x resolution lattice that
/// includes the rectangle's corners (x2 varies fastest). Requires a model of
/// input dimension 2.
void write_decision_grid(std::ostream& out, const DalcModel& model, const GridBounds& bounds,
                         std::size_t resolution);
void export_decision_grid(const DalcModel& model, const GridBounds& bounds,
                          std::size_t resolution, const std::filesystem::path& path);

}  // namespace dalc
