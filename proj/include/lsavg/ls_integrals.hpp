#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lsavg/qh_solver.hpp"
#include "lsavg/weight.hpp"

namespace lsavg {

struct LsValue {
    double raw = 0.0;         ///< sum of k^s w h^n over reachable cells
    double mass = 0.0;        ///< sum of w h^n over all cells of the region
    double normalized = 0.0;  ///< (raw / mass)^(1/s)
    std::size_t cells = 0;
    std::size_t unreachable = 0;
};

/// Region mask restricts the sum to cells with a nonzero entry (same indexing as the raster).
LsValue ls_integral(const QhField& field, double s, const std::optional<Weight>& weight = std::nullopt,
                    const std::vector<std::uint8_t>* region = nullptr);

enum class Trend { Saturating, Growing, Inconclusive };
std::string to_string(Trend t);

struct SweepRow {
    double h = 0.0;
    double truncation = 0.0;
    double raw = 0.0;
    double normalized = 0.0;
    bool clamped = false;  ///< depth beyond what the grid at h resolves
};

struct IntegralReport {
    std::string specId;
    double s = 1.0;
    Point z0;
    std::vector<SweepRow> rows;
    std::vector<double> increments;  ///< along the truncation axis at the finest h
    std::vector<double> ratios;
    Trend classification = Trend::Inconclusive;
    double slope = 0.0;  ///< least-squares slope of log increments per truncation step
    std::string rule;
    std::string note;
};

struct SweepOptions {
    Stencil stencil = Stencil::Full;
    unsigned threads = 0;  ///< 0 = hardware concurrency
};

/// Classifies increments: saturating when the last three ratios are all <= 0.8, growing when
/// all are >= 1.0. Fewer than three points give inconclusive.
Trend classify_increments(const std::vector<double>& values, std::vector<double>* increments = nullptr,
                          std::vector<double>* ratios = nullptr, double* slope = nullptr);

/// Solves once per h on the deepest truncation and integrates over each nested truncation window.
std::vector<IntegralReport> refinement_sweep(const DomainSpec& spec, const Point& z0, const std::vector<double>& sList,
                                             const std::vector<double>& hList,
                                             const std::vector<double>& truncationList,
                                             const SweepOptions& options = {});
IntegralReport refinement_sweep(const DomainSpec& spec, const Point& z0, double s, const std::vector<double>& hList,
                                const std::vector<double>& truncationList, const SweepOptions& options = {});

struct ScanResult {
    std::vector<IntegralReport> reports;
    std::optional<double> largestSaturating;
    std::optional<double> smallestGrowing;
    std::optional<double> estimate;  ///< midpoint of the bracket when it exists
    std::string note;
};

ScanResult threshold_scan(const DomainSpec& spec, const Point& z0, const std::vector<double>& sGrid,
                          const std::vector<double>& hList, const std::vector<double>& truncationList,
                          const SweepOptions& options = {});

struct PoincareResult {
    int j = 0;
    double p = 2.0;
    int truncatedJ = 0;       ///< last room index kept at this h
    double numerator = 0.0;   ///< ||u_j - mean||_p
    double denominator = 0.0; ///< ||grad u_j||_p
    double ratio = 0.0;
    double lowerBound = 0.0;  ///< ((j+1)! / (2^(j+2))^p)^(1/p)
};

/// Exact piecewise evaluation of the rooms-and-halls test function ratio on the truncation that
/// a grid of spacing h resolves.
PoincareResult poincare_ratio(int j, double p, double h, int specJMax = 12);

void write_report_csv(std::ostream& os, const std::vector<IntegralReport>& reports, bool header = true);

}  // namespace lsavg
