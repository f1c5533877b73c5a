#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lsavg/raster.hpp"
#include "lsavg/tubes.hpp"

namespace lsavg {

enum class SetShape { Box, CuspPiece };

/// One set of a Whitney-type subdivision.
struct SubdivisionSet {
    int id = 0;
    std::string family;  ///< "cube", "cusp" or "custom"
    SetShape shape = SetShape::Box;
    int n = 2;
    int layer = 0;
    Box box;             ///< the set itself for box sets, its bounding box otherwise
    // Cusp parameters; sign is +1/-1 for the half above/below the axis in 2-D, 0 for the whole set.
    double alpha = 0.0;
    int j = 0;
    long long m = 0;
    int ell = 0;
    int sign = 0;

    Point starCenter;
    double d = 0.0;       ///< diameter used by the chain bound (d_r for cusp sets)
    double dx = 0.0;
    double dr = 0.0;
    double delta = 0.0;   ///< lower bound on the distance to the boundary
    double measureUB = 0.0;
    bool skipStarCheck = false;
    std::vector<int> neighbors;

    bool contains(const Point& z) const;
};

// ---- cube family

struct CubeLayer {
    int j = 0;
    long long e = 1;           ///< cubes along an edge
    long long ringCount = 1;   ///< enumerated cube count in the layer, -1 when it overflows
    double nuBound = 1.0;      ///< 2^n n 3^(j(n-1)) for j >= 1
    double side = 0.5;
    double d = 0.0;
    double delta = 0.0;
    double measure = 0.0;      ///< |L_j| = ringCount side^n
    double measureBound = 0.0; ///< n 3^-j for j >= 1
};

/// e_j by the closed form 2 3^j - 1.
long long cube_edge_count(int j);
/// e_j by the recurrence e_0 = 1, e_j = 3 e_{j-1} + 2.
long long cube_edge_count_recurrence(int j);

std::vector<CubeLayer> cube_subdivision(int n, int jMax);
/// Every cube cell of layers 0..jMax for n = 2 or 3, with neighbor lists.
std::vector<SubdivisionSet> cube_cells(int n, int jMax);
/// Cube cell containing z (interior of the unit cube), searching layers up to jMax.
SubdivisionSet cube_cell_at(int n, const Point& z, int jMax);
/// Layer walk from the central cube out to the cell containing z.
std::vector<SubdivisionSet> cube_layer_walk(int n, const Point& z, int jMax);

// ---- chains

enum class Leg { Diameter, Horizontal, Radial };

struct ChainBound {
    std::vector<int> ids;
    double value = 0.0;  ///< 2 sum d/delta over the legs
};

/// 2 sum d(S_i)/delta(S_i); consecutive sets must touch. Throws on broken adjacency.
ChainBound chain_bound(const std::vector<SubdivisionSet>& chain, const std::vector<Leg>& legs = {});

/// (2M)^s sum (j+1)^s |L_j| with M = 2 sqrt(n); s = 0 is allowed as a formal case.
SeriesReport cube_bound_series(int n, double s, int jMax);

// ---- cusp family

/// 1 / sqrt(1 + alpha^2 2^(-2(alpha-1))): tangent-line factor at x = 1/2.
double cusp_c1(double alpha);
/// C(alpha) = C1(alpha) 2^-alpha in delta(S_{j,m}) >= C(alpha) 2^-(alpha j + l).
double cusp_delta_constant(double alpha);
/// Distance factor for d_r: 2^alpha / C1(alpha).
double cusp_distance_factor(double alpha);
/// Constant in k <= C_k (1 + l) 2^((alpha-1) j) for the L-shaped path from (1/3, 0).
double cusp_k_constant(double alpha);

int cusp_layer(long long m);  ///< floor(log2 m) + 1
SubdivisionSet cusp_set(double alpha, int j, long long m, int n = 2, int sign = 0);
/// Sets S_{j,m} for j = 1..J and all m with layer <= L; in 2-D the m > 1 sets are split into halves.
std::vector<SubdivisionSet> cusp_family(double alpha, int n, int J, int L);
/// Membership in the John piece {x > 1/4}.
bool cusp_john_piece(const Point& z);

std::vector<long long> lambda_chain(long long m);

/// Explicit chain bound along the L-shaped path: horizontal legs through S_{i,1}, radial legs
/// through S_{j,lambda}.
double cusp_chain_value(double alpha, int j, long long m);
double cusp_k_bound(double alpha, int j, long long m);
double cusp_measure_bound(double alpha, int n, int j, long long m);

/// sum over m <= mMax of (2 + log2 m)^s / m^2
double cusp_m_sum(double s, long long mMax);

struct CuspSeriesReport {
    SeriesReport series;            ///< terms indexed by j, each summed over m
    double jRatio = 0.0;            ///< exact ratio 2^((alpha-1)s - (alpha(n-1)+1))
    bool seriesCondition = false;   ///< (alpha-1)s - (alpha(n-1)+1) < 0
    bool theoremCondition = false;  ///< (alpha-1)(s-n+1) < n
    double criticalS = 0.0;         ///< n/(alpha-1) + n - 1
};

CuspSeriesReport cusp_upper_series(double alpha, int n, double s, int jMax, long long mMax);

// ---- block family

struct BlockCounts {
    int sizeExponent = 0;
    double edge = 1.0;
};
BlockCounts block_counts(long long m);

struct BlockSeriesReport {
    SeriesReport series;       ///< terms grouped by generation g (m in [2^g, 2^(g+1)))
    SeriesReport majorant;     ///< same grouping with (i+1+3m)^s replaced by m^s (i+4)^s
    double mExponent = 0.0;    ///< s - n log2 3
    bool converges = false;    ///< s < n log2 3 - 1
    double criticalS = 0.0;
};

BlockSeriesReport block_upper_series(int n, double s, long long mMax, int iMax);

// ---- validation

struct ValidationOptions {
    int starSamples = 16;        ///< sampled endpoints per set
    int segmentSteps = 16;
    int overlapSamples = 64;     ///< per set, for curved sets
    std::uint64_t seed = 1;
};

struct ValidationReport {
    std::size_t sets = 0;
    std::size_t overlapViolations = 0;
    double overlapMeasure = 0.0;
    double coveredFraction = 0.0;  ///< raster volume covered, John piece excluded
    bool connected = false;
    std::size_t starViolations = 0;
    std::size_t starSkipped = 0;
    std::size_t whitneyViolations = 0;  ///< d > M delta
    std::vector<std::string> messages;
    bool ok() const { return overlapViolations == 0 && connected && starViolations == 0 && whitneyViolations == 0; }
};

/// Checks overlap, coverage of the raster, adjacency connectivity, star-shapedness and d <= M delta.
/// Neighbor lists are recomputed from geometry when empty.
ValidationReport validate_subdivision(std::vector<SubdivisionSet> sets, const RasterDomain& raster,
                                      double distanceFactor, const ValidationOptions& options = {});

/// Fills neighbor lists by touching bounding boxes (sweep and prune along the first axis).
void compute_neighbors(std::vector<SubdivisionSet>& sets);

void write_subdivision_csv(std::ostream& os, const std::vector<SubdivisionSet>& sets);

}  // namespace lsavg
