#pragma once

#include <string>

#include "lsavg/geometry.hpp"

namespace lsavg {

/// Density w of the measure dmu = w dz.
struct Weight {
    enum class Kind { Constant, Power };
    Kind kind = Kind::Constant;
    double value = 1.0;  ///< constant weight
    Point center;        ///< power weight |z - center|^beta
    double beta = 0.0;

    static Weight constant(double c);
    static Weight power(const Point& center, double beta);

    /// Weight at a cell center; distances to the power center are floored at h/4.
    double eval(const Point& z, double h) const;
    /// Throws InvalidArgument unless w > 0 a.e. and both A_r factors are integrable in R^n.
    void validate(int n, double r = 0.0) const;
    bool is_constant() const { return kind == Kind::Constant; }
    std::string describe() const;
};

}  // namespace lsavg
