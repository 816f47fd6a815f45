#include "dalc/decision_grid.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace dalc {

void write_decision_grid(std::ostream& out, const DalcModel& model, const GridBounds& bounds,
                         std::size_t resolution) {
    if (model.dim() != 2)
        throw std::invalid_argument("decision grid: model must be two-dimensional, has dimension " +
                                    std::to_string(model.dim()));
    if (resolution < 2)
        throw std::invalid_argument("decision grid: resolution must be at least 2");
    if (!(bounds.x1_max > bounds.x1_min) || !(bounds.x2_max > bounds.x2_min))
        throw std::invalid_argument("decision grid: empty rectangle");
    const double step1 = (bounds.x1_max - bounds.x1_min) / static_cast<double>(resolution - 1);
    const double step2 = (bounds.x2_max - bounds.x2_min) / static_cast<double>(resolution - 1);
    out << "x1,x2,value\n";
    char buf[96];
    for (std::size_t i = 0; i < resolution; ++i) {
        const double x1 = bounds.x1_min + step1 * static_cast<double>(i);
        for (std::size_t j = 0; j < resolution; ++j) {
            const double x2 = bounds.x2_min + step2 * static_cast<double>(j);
            const std::array<double, 2> x{x1, x2};
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", x1, x2,
                          model.decision_value(std::span<const double>(x)));
            out << buf;
        }
    }
}

void export_decision_grid(const DalcModel& model, const GridBounds& bounds,
                          std::size_t resolution, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    write_decision_grid(out, model, bounds, resolution);
}

}  // namespace dalc
