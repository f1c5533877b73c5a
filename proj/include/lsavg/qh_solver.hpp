#pragma once

#include <iosfwd>
#include <limits>
#include <vector>

#include "lsavg/raster.hpp"

namespace lsavg {

enum class Stencil { Axis, Full };

Stencil parse_stencil(const std::string& text);
std::string to_string(Stencil s);

/// Neighbor offsets of a stencil in n dimensions, in lexicographic order.
std::vector<std::array<int, kMaxDim>> stencil_offsets(int n, Stencil s);

/// Discrete quasihyperbolic distance from a base cell.
struct QhField {
    RasterPtr raster;
    Stencil stencil = Stencil::Full;
    Point basePoint;       ///< requested z0
    std::size_t baseCell = 0;
    Point snappedBase;     ///< center of the base cell
    std::vector<double> k;             ///< +inf outside or unreachable
    std::vector<std::int64_t> pred;    ///< -1 at the base and at unreachable cells

    static constexpr double kInf = std::numeric_limits<double>::infinity();

    bool reachable(std::size_t c) const { return k[c] < kInf; }
    /// k at the cell containing z; +inf when z is outside the raster domain.
    double value_at(const Point& z) const;
    std::size_t reachable_count() const;
};

/// Quasihyperbolic weight of the grid edge between cells p and q.
double edge_weight(const RasterDomain& raster, std::size_t p, std::size_t q);

/// Shortest-path relaxation from the cell nearest z0. Ties in the queue are broken by cell index.
QhField solve(const RasterPtr& raster, const Point& z0, Stencil stencil = Stencil::Full);

struct Geodesic {
    std::vector<Point> points;        ///< from z's cell center back to the base cell
    std::vector<std::size_t> cells;
    double weightSum = 0.0;           ///< accumulated from the base outward
};

class UnreachableCell : public Error {
public:
    UnreachableCell(const std::string& what, int label) : Error(what), componentLabel(label) {}
    int componentLabel;
};

Geodesic geodesic(const QhField& field, const Point& z);

/// Connected components of inside cells under the field's stencil; -1 for outside cells.
std::vector<int> component_labels(const RasterDomain& raster, Stencil stencil);

struct MonotonicityReport {
    std::size_t cellsCompared = 0;
    std::size_t violations = 0;
    std::size_t cellsMissingInG = 0;
    double maxViolation = 0.0;  ///< max of kG - kD over compared cells (<= 0 when monotone)
    double tol = 0.0;
    bool ok() const { return violations == 0 && cellsMissingInG == 0; }
};

/// Checks kG <= kD + tol on every reachable cell of D, for D contained in G.
MonotonicityReport subset_monotonicity(const QhField& fieldG, const QhField& fieldD, double tol);

void write_field_csv(std::ostream& os, const QhField& field);
void write_field_binary(std::ostream& os, const QhField& field);
GridFrame read_field_binary(std::istream& is, std::vector<double>& k);

}  // namespace lsavg
