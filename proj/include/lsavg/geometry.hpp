#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>

namespace lsavg {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Precondition or schema violation in caller-supplied arguments.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

constexpr int kMaxDim = 3;

/// A point (or vector) in R^n for n in {1, 2, 3}.
struct Point {
    std::array<double, kMaxDim> c{0.0, 0.0, 0.0};
    int n = 2;

    Point() = default;
    explicit Point(int dim) : n(dim) {}
    Point(std::initializer_list<double> coords) : n(static_cast<int>(coords.size())) {
        if (coords.size() == 0 || coords.size() > kMaxDim) {
            throw InvalidArgument("Point: dimension must be 1..3");
        }
        std::size_t i = 0;
        for (double v : coords) c[i++] = v;
    }

    double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }

    bool finite() const {
        for (int i = 0; i < n; ++i)
            if (!std::isfinite(c[static_cast<std::size_t>(i)])) return false;
        return true;
    }
};

inline Point operator+(Point a, const Point& b) {
    for (int i = 0; i < a.n; ++i) a[i] += b[i];
    return a;
}
inline Point operator-(Point a, const Point& b) {
    for (int i = 0; i < a.n; ++i) a[i] -= b[i];
    return a;
}
inline Point operator*(double s, Point a) {
    for (int i = 0; i < a.n; ++i) a[i] *= s;
    return a;
}
inline double dot(const Point& a, const Point& b) {
    double s = 0.0;
    for (int i = 0; i < a.n; ++i) s += a[i] * b[i];
    return s;
}
inline double norm(const Point& a) { return std::sqrt(dot(a, a)); }
inline double distance(const Point& a, const Point& b) { return norm(a - b); }

std::string to_string(const Point& p);

/// Axis-aligned box [lo, hi].
struct Box {
    Point lo;
    Point hi;

    int dim() const { return lo.n; }
    double extent(int i) const { return hi[i] - lo[i]; }
    double min_extent() const;
    double volume() const;
    Point center() const { return 0.5 * (lo + hi); }
    bool contains_open(const Point& p) const;
    bool contains_closed(const Point& p, double eps = 0.0) const;
    /// Euclidean distance from an interior point to the box boundary.
    double interior_distance(const Point& p) const;
    void expand(const Box& other);
};

/// Volume of the box intersection (0 when disjoint or touching).
double overlap_volume(const Box& a, const Box& b);
/// True when the closed boxes share at least one point.
bool touches(const Box& a, const Box& b, double eps = 1e-12);

/// Volume of the unit ball in R^k (V_1 = 2, V_2 = pi, V_3 = 4pi/3).
double unit_ball_volume(int k);

}  // namespace lsavg
