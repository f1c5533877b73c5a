#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lsavg/ls_integrals.hpp"

namespace lsavg {

struct ArEstimate {
    double estimate = 0.0;  ///< largest sampled A_r product; a lower bound for the sup
    Point bestCenter;
    double bestRadius = 0.0;
    std::size_t ballsUsed = 0;
    std::vector<double> runningMax;  ///< estimate after each ball
    std::string note;
};

/// Samples balls B inside the domain (centers at inside cells, radius from radiusGrid clipped to
/// the boundary distance) and maximizes (avg_B w)(avg_B w^(1/(1-r)))^(r-1). The ball sequence
/// depends only on the seed, so a larger nBalls extends a smaller run.
ArEstimate ar_estimate(const Weight& weight, const RasterDomain& raster, double r, std::size_t nBalls,
                       const std::vector<double>& radiusGrid, std::uint64_t seed = 1);

/// (1/mu(Omega) sum k^s w h^n)^(1/s).
double weighted_ls(const QhField& field, double s, const Weight& weight);

struct UnionCell {
    std::size_t cell = 0;
    double kUnion = 0.0;
    double k1 = 0.0;  ///< k on G1, 0 off it
    double k2 = 0.0;
    double slack = 0.0;  ///< k1 + k2 - kUnion
};

struct UnionReport {
    std::string id1, id2;
    double h = 0.0;
    double s = 1.0;
    Point z0;
    std::string weight;
    double tol = 0.0;  ///< 5h max(1/d) over the union
    std::size_t cellsChecked = 0;
    std::size_t pointwiseViolations = 0;
    double minSlack = 0.0;
    double C1 = 0.0;    ///< integral of k1^s over G1, divided by mu(G1 u G2)
    double C2 = 0.0;
    double bound = 0.0; ///< 2^s (C1 + C2)
    double mean = 0.0;  ///< integral of kUnion^s over the union, divided by mu(G1 u G2)
    MonotonicityReport monotone1, monotone2;
    std::vector<UnionCell> cells;

    bool pointwise_ok() const { return pointwiseViolations == 0; }
    bool chain_ok() const { return mean < bound; }
    bool ok() const { return pointwise_ok() && chain_ok() && monotone1.ok() && monotone2.ok(); }
};

/// Solves G1, G2 and G1 u G2 on one aligned grid and checks the union inequalities.
UnionReport union_check(const DomainSpec& g1, const DomainSpec& g2, const Point& z0, double h, double s,
                        const std::optional<Weight>& weight = std::nullopt, Stencil stencil = Stencil::Full);

/// The union of two specs as a single spec.
DomainSpec union_spec(const DomainSpec& g1, const DomainSpec& g2);

/// Folds union_check left to right: (G1 u G2), then (G1 u G2) u G3, and so on.
std::vector<UnionReport> union_chain(const std::vector<DomainSpec>& specs, const Point& z0, double h, double s,
                                     const std::optional<Weight>& weight = std::nullopt);

void write_union_csv(std::ostream& os, const UnionReport& report);
void write_union_summary(std::ostream& os, const UnionReport& report);

struct HolderReport {
    double t = 1.0, s = 1.0;
    double lt = 0.0;  ///< normalized L^t
    double ls = 0.0;  ///< normalized L^s
    bool holds = false;
    bool equality = false;
};

/// Discrete Hoelder comparison of normalized L^t and L^s for 0 < t <= s.
HolderReport holder_check(const QhField& field, const std::optional<Weight>& weight, double t, double s);
/// Same comparison on an explicit sample with masses.
HolderReport holder_check(const std::vector<double>& values, const std::vector<double>& masses, double t, double s);

}  // namespace lsavg
