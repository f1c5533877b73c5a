#include "lsavg/weight.hpp"

#include <algorithm>
#include <cmath>

#include "lsavg/domain.hpp"

namespace lsavg {

Weight Weight::constant(double c) {
    Weight w;
    w.kind = Kind::Constant;
    w.value = c;
    w.validate(2);
    return w;
}

Weight Weight::power(const Point& center, double beta) {
    Weight w;
    w.kind = Kind::Power;
    w.center = center;
    w.beta = beta;
    w.validate(center.n);
    return w;
}

double Weight::eval(const Point& z, double h) const {
    if (kind == Kind::Constant) return value;
    const double r = std::max(distance(z, center), 0.25 * h);
    return std::pow(r, beta);
}

void Weight::validate(int n, double r) const {
    if (kind == Kind::Constant) {
        if (!(value > 0) || !std::isfinite(value)) throw InvalidArgument("constant weight must be positive");
        return;
    }
    if (center.n != n) throw InvalidArgument("power weight center dimension mismatch");
    if (!(beta > -n)) throw InvalidArgument("power weight needs beta > -n");
    if (r > 1.0 && !(beta / (1.0 - r) > -n)) throw InvalidArgument("power weight needs beta/(1-r) > -n");
}

std::string Weight::describe() const {
    if (kind == Kind::Constant) return "constant(" + format_real(value) + ")";
    return "power(center=" + to_string(center) + ",beta=" + format_real(beta) + ")";
}

}  // namespace lsavg
