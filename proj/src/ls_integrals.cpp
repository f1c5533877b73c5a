#include "lsavg/ls_integrals.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <ostream>
#include <sstream>
#include <thread>

namespace lsavg {

LsValue ls_integral(const QhField& field, double s, const std::optional<Weight>& weight,
                    const std::vector<std::uint8_t>* region) {
    if (!(s > 0) || !std::isfinite(s)) throw InvalidArgument("ls_integral: s must be positive");
    const RasterDomain& r = *field.raster;
    if (region && region->size() != r.mask.size()) throw InvalidArgument("ls_integral: region size mismatch");
    if (weight) weight->validate(r.n());
    const double cell = std::pow(r.h(), r.n());
    LsValue v;
    for (std::size_t c = 0; c < r.mask.size(); ++c) {
        if (!r.inside(c) || (region && !(*region)[c])) continue;
        const double w = weight ? weight->eval(r.frame.center(c), r.h()) : 1.0;
        v.mass += w * cell;
        ++v.cells;
        if (!field.reachable(c)) {
            ++v.unreachable;
            continue;
        }
        v.raw += std::pow(field.k[c], s) * w * cell;
    }
    if (v.cells == 0 || v.cells == v.unreachable) throw InvalidArgument("ls_integral: no reachable cells");
    v.normalized = std::pow(v.raw / v.mass, 1.0 / s);
    return v;
}

std::string to_string(Trend t) {
    switch (t) {
        case Trend::Saturating: return "saturating";
        case Trend::Growing: return "growing";
        default: return "inconclusive";
    }
}

Trend classify_increments(const std::vector<double>& values, std::vector<double>* increments,
                          std::vector<double>* ratios, double* slope) {
    std::vector<double> inc, rat;
    for (std::size_t i = 1; i < values.size(); ++i) inc.push_back(values[i] - values[i - 1]);
    const double scale = values.empty() ? 0.0 : std::abs(values.back());
    const double zero = 1e-13 * scale;
    for (std::size_t i = 1; i < inc.size(); ++i) {
        if (std::abs(inc[i - 1]) <= zero) {
            rat.push_back(std::abs(inc[i]) <= zero ? 0.0 : std::numeric_limits<double>::infinity());
        } else {
            rat.push_back(inc[i] / inc[i - 1]);
        }
    }
    if (slope) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int m = 0;
        for (std::size_t i = 0; i < inc.size(); ++i) {
            if (!(inc[i] > zero)) continue;
            const double x = static_cast<double>(i), y = std::log(inc[i]);
            sx += x, sy += y, sxx += x * x, sxy += x * y;
            ++m;
        }
        *slope = m >= 2 ? (m * sxy - sx * sy) / (m * sxx - sx * sx) : 0.0;
    }
    Trend t = Trend::Inconclusive;
    if (values.size() >= 3) {
        const std::size_t window = std::min<std::size_t>(3, rat.size());
        bool sat = true, grow = true;
        for (std::size_t i = rat.size() - window; i < rat.size(); ++i) {
            sat = sat && rat[i] <= 0.8;
            grow = grow && rat[i] >= 1.0;
        }
        if (sat) t = Trend::Saturating;
        else if (grow) t = Trend::Growing;
    }
    if (increments) *increments = inc;
    if (ratios) *ratios = rat;
    return t;
}

namespace {

constexpr const char* kRule =
    "increments of raw along the truncation axis at the finest h; saturating if the last 3 ratios are <= 0.8, "
    "growing if >= 1.0, else inconclusive; fewer than 3 points forces inconclusive";

struct HResult {
    std::vector<std::vector<SweepRow>> perS;  // [s][truncation]
};

void check_sweep_inputs(const DomainSpec& spec, const std::vector<double>& sList, const std::vector<double>& hList,
                        const std::vector<double>& truncationList) {
    validate(spec);
    if (sList.empty()) throw InvalidArgument("sweep: empty s list");
    for (double s : sList)
        if (!(s > 0)) throw InvalidArgument("sweep: s must be positive");
    if (hList.empty()) throw InvalidArgument("sweep: empty h list");
    for (std::size_t i = 0; i < hList.size(); ++i) {
        if (!(hList[i] > 0)) throw InvalidArgument("sweep: h must be positive");
        if (i && !(hList[i] < hList[i - 1])) throw InvalidArgument("sweep: hList must be strictly decreasing");
    }
    for (std::size_t i = 1; i < truncationList.size(); ++i) {
        if (truncation_depth(spec) && !deeper(spec, truncationList[i - 1], truncationList[i]))
            throw InvalidArgument("sweep: truncationList must be strictly deepening");
    }
}

HResult sweep_one_h(const DomainSpec& spec, const Point& z0, const std::vector<double>& sList, double h,
                    const std::vector<double>& truncationList, Stencil stencil) {
    const bool hasAxis = truncation_depth(spec).has_value();
    const DomainSpec deepest =
        hasAxis && !truncationList.empty() ? with_truncation(spec, truncationList.back()) : spec;
    RasterPtr raster = rasterize(deepest, h);
    const QhField field = solve(raster, z0, stencil);
    const auto effDepth = truncation_depth(raster->effective());

    HResult out;
    out.perS.assign(sList.size(), {});
    std::vector<std::uint8_t> region(raster->mask.size());
    for (double t : truncationList) {
        const bool clamped = hasAxis && effDepth && deeper(spec, *effDepth, t);
        if (hasAxis) {
            const DomainSpec window = with_truncation(spec, t);
            for (std::size_t c = 0; c < region.size(); ++c)
                region[c] = raster->inside(c) && contains(window, raster->frame.center(c));
        } else {
            region = raster->mask;
        }
        for (std::size_t i = 0; i < sList.size(); ++i) {
            SweepRow row;
            row.h = h;
            row.truncation = t;
            row.clamped = clamped;
            const bool any = std::any_of(region.begin(), region.end(), [](std::uint8_t b) { return b != 0; });
            if (any) {
                const LsValue v = ls_integral(field, sList[i], std::nullopt, &region);
                row.raw = v.raw;
                row.normalized = v.normalized;
            }
            out.perS[i].push_back(row);
        }
    }
    return out;
}

}  // namespace

std::vector<IntegralReport> refinement_sweep(const DomainSpec& spec, const Point& z0, const std::vector<double>& sList,
                                             const std::vector<double>& hList,
                                             const std::vector<double>& truncationList, const SweepOptions& options) {
    check_sweep_inputs(spec, sList, hList, truncationList);
    unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    std::vector<HResult> results(hList.size());
    for (std::size_t start = 0; start < hList.size(); start += threads) {
        std::vector<std::future<HResult>> jobs;
        for (std::size_t i = start; i < std::min(hList.size(), start + threads); ++i) {
            jobs.push_back(std::async(std::launch::async, sweep_one_h, std::cref(spec), std::cref(z0),
                                      std::cref(sList), hList[i], std::cref(truncationList), options.stencil));
        }
        for (std::size_t i = 0; i < jobs.size(); ++i) results[start + i] = jobs[i].get();
    }

    std::vector<IntegralReport> reports;
    for (std::size_t si = 0; si < sList.size(); ++si) {
        IntegralReport rep;
        rep.specId = spec.id();
        rep.s = sList[si];
        rep.z0 = z0;
        rep.rule = kRule;
        for (const auto& hr : results)
            for (const auto& row : hr.perS[si]) rep.rows.push_back(row);
        std::vector<double> finest;
        std::size_t clampedCount = 0;
        for (const auto& row : results.back().perS[si]) {
            if (row.clamped) {
                ++clampedCount;
                continue;
            }
            finest.push_back(row.raw);
        }
        rep.classification = classify_increments(finest, &rep.increments, &rep.ratios, &rep.slope);
        std::ostringstream note;
        note << finest.size() << " unclamped truncation points at h=" << format_real(hList.back());
        if (clampedCount) note << "; " << clampedCount << " clamped";
        if (finest.size() < 3) note << "; fewer than 3 points";
        rep.note = note.str();
        reports.push_back(std::move(rep));
    }
    return reports;
}

IntegralReport refinement_sweep(const DomainSpec& spec, const Point& z0, double s, const std::vector<double>& hList,
                                const std::vector<double>& truncationList, const SweepOptions& options) {
    return refinement_sweep(spec, z0, std::vector<double>{s}, hList, truncationList, options).front();
}

ScanResult threshold_scan(const DomainSpec& spec, const Point& z0, const std::vector<double>& sGrid,
                          const std::vector<double>& hList, const std::vector<double>& truncationList,
                          const SweepOptions& options) {
    for (std::size_t i = 1; i < sGrid.size(); ++i)
        if (!(sGrid[i] > sGrid[i - 1])) throw InvalidArgument("threshold_scan: sGrid must be increasing");
    ScanResult out;
    out.reports = refinement_sweep(spec, z0, sGrid, hList, truncationList, options);
    for (const auto& rep : out.reports) {
        if (rep.classification == Trend::Saturating) out.largestSaturating = rep.s;
        if (rep.classification == Trend::Growing && !out.smallestGrowing) out.smallestGrowing = rep.s;
    }
    if (!out.largestSaturating || !out.smallestGrowing) {
        out.note = "no sign change across the s grid; no estimate";
    } else if (*out.largestSaturating > *out.smallestGrowing) {
        out.note = "classifications are not ordered in s; no estimate";
    } else {
        out.estimate = 0.5 * (*out.largestSaturating + *out.smallestGrowing);
        out.note = "critical s in [" + format_real(*out.largestSaturating) + ", " +
                   format_real(*out.smallestGrowing) + "]";
    }
    return out;
}

PoincareResult poincare_ratio(int j, double p, double h, int specJMax) {
    if (j < 1) throw InvalidArgument("poincare_ratio: j must be >= 1");
    if (!(p >= 1.0)) throw InvalidArgument("poincare_ratio: p must be >= 1");
    const auto trunc = truncation_policy(RoomsAndHalls{specJMax}, h);
    const int J = std::get<RoomsAndHalls>(trunc.effective.shape).jMax;
    if (j > J) {
        throw InvalidArgument("poincare_ratio: room " + std::to_string(j) + " is truncated away at h=" +
                              format_real(h) + " (" + trunc.note + ")");
    }
    // Right half only; the mirrored half doubles both integrals and cancels in the ratio.
    double num = rooms::hall(j).volume() / (p + 1.0);
    for (int i = j; i <= J; ++i) num += rooms::room(i).volume();
    for (int i = j + 1; i <= J; ++i) num += rooms::hall(i).volume();
    const double slope = std::ldexp(1.0, j + 2);
    const double den = std::pow(slope, p) * rooms::hall(j).volume();

    PoincareResult out;
    out.j = j;
    out.p = p;
    out.truncatedJ = J;
    out.numerator = std::pow(2.0 * num, 1.0 / p);
    out.denominator = std::pow(2.0 * den, 1.0 / p);
    out.ratio = out.numerator / out.denominator;
    out.lowerBound = std::pow(1.0 / (std::pow(slope, p) * rooms::hall_height(j)), 1.0 / p);
    return out;
}

void write_report_csv(std::ostream& os, const std::vector<IntegralReport>& reports, bool header) {
    if (header) os << "spec_id,s,h,truncation,raw,normalized,classification,slope,clamped\n";
    for (const auto& rep : reports) {
        for (const auto& row : rep.rows) {
            os << '"' << rep.specId << '"' << ',' << format_real(rep.s) << ',' << format_real(row.h) << ','
               << format_real(row.truncation) << ',' << format_real(row.raw) << ',' << format_real(row.normalized)
               << ',' << to_string(rep.classification) << ',' << format_real(rep.slope) << ','
               << (row.clamped ? 1 : 0) << '\n';
        }
    }
}

}  // namespace lsavg
