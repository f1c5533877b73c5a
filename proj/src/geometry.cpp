#include "lsavg/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <sstream>

namespace lsavg {

std::string to_string(const Point& p) {
    std::ostringstream os;
    os.precision(17);
    os << '(';
    for (int i = 0; i < p.n; ++i) {
        if (i) os << ", ";
        os << p[i];
    }
    os << ')';
    return os.str();
}

double Box::min_extent() const {
    double m = extent(0);
    for (int i = 1; i < dim(); ++i) m = std::min(m, extent(i));
    return m;
}

double Box::volume() const {
    double v = 1.0;
    for (int i = 0; i < dim(); ++i) v *= std::max(0.0, extent(i));
    return v;
}

bool Box::contains_open(const Point& p) const {
    for (int i = 0; i < dim(); ++i)
        if (!(p[i] > lo[i] && p[i] < hi[i])) return false;
    return true;
}

bool Box::contains_closed(const Point& p, double eps) const {
    for (int i = 0; i < dim(); ++i)
        if (p[i] < lo[i] - eps || p[i] > hi[i] + eps) return false;
    return true;
}

double Box::interior_distance(const Point& p) const {
    double d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < dim(); ++i) d = std::min({d, p[i] - lo[i], hi[i] - p[i]});
    return d;
}

void Box::expand(const Box& other) {
    for (int i = 0; i < dim(); ++i) {
        lo[i] = std::min(lo[i], other.lo[i]);
        hi[i] = std::max(hi[i], other.hi[i]);
    }
}

double overlap_volume(const Box& a, const Box& b) {
    double v = 1.0;
    for (int i = 0; i < a.dim(); ++i) {
        const double w = std::min(a.hi[i], b.hi[i]) - std::max(a.lo[i], b.lo[i]);
        if (w <= 0.0) return 0.0;
        v *= w;
    }
    return v;
}

bool touches(const Box& a, const Box& b, double eps) {
    for (int i = 0; i < a.dim(); ++i)
        if (std::min(a.hi[i], b.hi[i]) < std::max(a.lo[i], b.lo[i]) - eps) return false;
    return true;
}

double unit_ball_volume(int k) {
    return std::pow(std::numbers::pi, 0.5 * k) / std::tgamma(0.5 * k + 1.0);
}

}  // namespace lsavg
