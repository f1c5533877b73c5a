#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "lsavg/domain.hpp"

namespace lsavg {

/// Closed cylinder of length l and radius r starting at endA along a unit axis.
/// c is the claimed lower bound on the slice fraction of the trapped component.
struct Tube {
    int index = 0;
    Point endA;
    Point axis;
    double l = 1.0;
    double r = 1.0;
    double c = 1.0;

    int dim() const { return endA.n; }
    void validate() const;
    bool contains(const Point& z) const;
};

struct TubeFamily {
    std::string name;
    std::vector<Tube> tubes;
    bool disjointComponents = true;
};

enum class SeriesClass { Diverges, Converges, Inconclusive };
std::string to_string(SeriesClass c);

struct SeriesReport {
    std::string name;
    double s = 1.0;
    int n = 2;
    std::vector<double> terms;
    std::vector<double> partialSums;
    std::vector<double> ratios;
    SeriesClass classification = SeriesClass::Inconclusive;
    std::string rule;
    std::string note;
};

/// Diverges when the last min(10, count) ratios are all >= 0.999 or the tail terms are
/// nondecreasing; converges when those ratios are all <= 0.99.
SeriesClass classify_series(const std::vector<double>& terms, std::vector<double>* ratios = nullptr);
SeriesReport make_series(const std::string& name, double s, int n, const std::vector<double>& terms);

/// c r^n (l/r)^(s+1)
double tube_term(const Tube& t, double s, int n);
/// V_{n-1} / ((s+1) 2^(s+1)) * c r^n (l/r)^(s+1)
double tube_lower_bound(const Tube& t, double s, int n);

struct VerifyOptions {
    int nSlices = 32;
    int samplesPerSlice = 64;  ///< samples across a diameter (n = 2) or per side of the cross grid (n = 3)
    double tol = 0.05;
};

/// Sampled component of T intersected with the domain, in the tube's local frame.
struct TubeComponent {
    Tube tube;
    int nSlices = 0;
    int side = 0;                    ///< cross-grid points per axis
    std::vector<int> label;          ///< component id per sample, -1 outside
    int chosen = -1;                 ///< label of the selected component
    std::vector<std::size_t> sizes;  ///< sample count per component

    bool in_component(const Point& z) const;
    Point sample_point(std::size_t idx) const;
};

struct VerifyResult {
    bool ok = false;
    double cHat = 0.0;
    bool wallClear = false;
    std::size_t componentCount = 0;
    std::string reason;
    TubeComponent component;
};

VerifyResult verify_essential(const DomainSpec& spec, const Tube& tube, const VerifyOptions& options = {});

/// Pairwise disjointness of sampled components; returns the first colliding pair if any.
bool components_disjoint(const std::vector<TubeComponent>& comps, std::pair<int, int>* collision = nullptr);

TubeFamily rooms_halls_tubes(int J);
TubeFamily disk_rooms_tubes(int J);
TubeFamily cusp_tubes(double alpha, int n, int J);
TubeFamily block_tubes(int n, int J);

/// Surrogate disk-and-rooms terms (2^(s-1))^(j+1) / pi^(s-1) from r < pi 2^-(j+1), l > 1.
double disk_rooms_surrogate_term(int j, double s);

SeriesReport family_series(const TubeFamily& family, double s, int jMax);

struct Certificate {
    bool issued = false;
    std::string reason;
    SeriesReport series;
    std::vector<Tube> tubes;         ///< tubes with the certified c
    std::vector<VerifyResult> checks;
    double lowerBoundSum = 0.0;      ///< sum of tube lower bounds with certified c
};

/// Verifies every tube, checks disjointness, and issues a certificate when the series of
/// certified terms diverges.
Certificate certify_not_averaging(const DomainSpec& spec, const TubeFamily& family, double s,
                                  const VerifyOptions& options = {});

void write_certificate(std::ostream& os, const Certificate& cert);
void write_series_csv(std::ostream& os, const SeriesReport& rep);

}  // namespace lsavg
