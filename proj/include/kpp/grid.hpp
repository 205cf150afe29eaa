#ifndef KPP_GRID_HPP
#define KPP_GRID_HPP

#include <vector>

#include "kpp/errors.hpp"

namespace kpp {

struct Grid1D {
    double x_min = -100.0;
    double x_max = 450.0;
    int nx = 5501;

    double dx() const { return (x_max - x_min) / (nx - 1); }
    double x(int i) const { return x_min + i * dx(); }

    void validate() const {
        if (nx < 3) throw ValidationError("Grid1D: nx must be at least 3");
        if (!(x_max > x_min)) throw ValidationError("Grid1D: x_max must exceed x_min");
    }
};

struct Field {
    Grid1D grid;
    double t = 0.0;
    std::vector<double> values;
};

} // namespace kpp

#endif
