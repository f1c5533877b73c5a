#include "lsavg/weights_union.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <ostream>
#include <random>

namespace lsavg {

ArEstimate ar_estimate(const Weight& weight, const RasterDomain& raster, double r, std::size_t nBalls,
                       const std::vector<double>& radiusGrid, std::uint64_t seed) {
    if (!(r > 1.0)) throw InvalidArgument("ar_estimate: r must be > 1");
    if (radiusGrid.empty()) throw InvalidArgument("ar_estimate: empty radius grid");
    for (double rho : radiusGrid)
        if (!(rho > 0)) throw InvalidArgument("ar_estimate: radii must be positive");
    weight.validate(raster.n(), r);
    std::vector<std::size_t> inside;
    for (std::size_t c = 0; c < raster.mask.size(); ++c)
        if (raster.inside(c)) inside.push_back(c);
    if (inside.empty()) throw InvalidArgument("ar_estimate: empty raster");

    const GridFrame& f = raster.frame;
    const double h = f.h;
    const double dual = 1.0 / (1.0 - r);
    std::mt19937_64 rng(seed);
    ArEstimate est;
    est.estimate = -std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < nBalls; ++b) {
        const std::size_t center = inside[rng() % inside.size()];
        const double wanted = radiusGrid[rng() % radiusGrid.size()];
        const double radius = std::min(wanted, raster.dist[center]);
        const Point zc = f.center(center);
        const auto base = f.coords(center);
        const int reach = static_cast<int>(std::floor(radius / h));
        double sumW = 0.0, sumDual = 0.0;
        std::size_t count = 0;
        std::array<int, kMaxDim> off{0, 0, 0};
        for (int i = 0; i < f.n; ++i) off[i] = -reach;
        while (true) {
            std::array<int, kMaxDim> c = base;
            bool inFrame = true;
            for (int i = 0; i < f.n; ++i) {
                c[i] += off[i];
                inFrame = inFrame && c[i] >= 0 && c[i] < f.dims[i];
            }
            if (inFrame) {
                const std::size_t idx = f.index(c);
                const Point p = f.center(idx);
                if (raster.inside(idx) && distance(p, zc) <= radius) {
                    const double w = weight.eval(p, h);
                    sumW += w;
                    sumDual += std::pow(w, dual);
                    ++count;
                }
            }
            int axis = 0;
            while (axis < f.n && ++off[axis] > reach) {
                off[axis] = -reach;
                ++axis;
            }
            if (axis == f.n) break;
        }
        if (count == 0) throw InvalidArgument("ar_estimate: ball at " + to_string(zc) + " has no inside cells");
        const double avgW = sumW / static_cast<double>(count);
        const double avgDual = sumDual / static_cast<double>(count);
        const double product = avgW * std::pow(avgDual, r - 1.0);
        if (product > est.estimate) {
            est.estimate = product;
            est.bestCenter = zc;
            est.bestRadius = radius;
        }
        est.runningMax.push_back(est.estimate);
        ++est.ballsUsed;
    }
    est.note = "sampled lower bound for the A_r supremum; no violation found up to " +
               std::to_string(est.ballsUsed) + " balls";
    return est;
}

double weighted_ls(const QhField& field, double s, const Weight& weight) {
    const LsValue v = ls_integral(field, s, weight);
    if (!(v.mass > 0)) throw InvalidArgument("weighted_ls: zero mu-mass");
    return v.normalized;
}

DomainSpec union_spec(const DomainSpec& g1, const DomainSpec& g2) {
    if (g1.dim() != g2.dim()) throw InvalidArgument("union_spec: dimension mismatch");
    UnionOf u;
    auto add = [&](const DomainSpec& g) {
        if (const auto* inner = std::get_if<UnionOf>(&g.shape)) {
            for (const auto& m : inner->members) u.members.push_back(m);
        } else {
            u.members.push_back(TranslatedSpec{g, Point(g.dim())});
        }
    };
    add(g1);
    add(g2);
    return DomainSpec{u};
}

namespace {

Box hull(const Box& a, const Box& b) {
    Box out = a;
    for (int i = 0; i < a.dim(); ++i) {
        out.lo[i] = std::min(a.lo[i], b.lo[i]);
        out.hi[i] = std::max(a.hi[i], b.hi[i]);
    }
    return out;
}

}  // namespace

UnionReport union_check(const DomainSpec& g1, const DomainSpec& g2, const Point& z0, double h, double s,
                        const std::optional<Weight>& weight, Stencil stencil) {
    validate(g1);
    validate(g2);
    if (!(s > 0)) throw InvalidArgument("union_check: s must be positive");
    if (!(h > 0)) throw InvalidArgument("union_check: h must be positive");
    const DomainSpec gu = union_spec(g1, g2);
    const GridFrame frame = frame_for(hull(bounding_box(with_truncation(g1, h)),
                                           bounding_box(with_truncation(g2, h))),
                                      h);
    auto f1 = std::async(std::launch::async, [&] { return rasterize(g1, h, frame); });
    auto f2 = std::async(std::launch::async, [&] { return rasterize(g2, h, frame); });
    const RasterPtr ru = rasterize(gu, h, frame);
    const RasterPtr r1 = f1.get();
    const RasterPtr r2 = f2.get();

    bool anyCommon = false;
    for (std::size_t c = 0; c < ru->mask.size() && !anyCommon; ++c) anyCommon = r1->inside(c) && r2->inside(c);
    if (!anyCommon) throw InvalidArgument("union_check: G1 and G2 do not intersect at this resolution");
    if (!contains(g1, z0) || !contains(g2, z0)) {
        throw InvalidArgument("union_check: z0 = " + to_string(z0) + " is not in the intersection");
    }
    // Use a cell center common to all three grids so the three fields share their base point.
    std::optional<std::size_t> baseCell;
    double best = std::numeric_limits<double>::infinity();
    if (const auto c0 = frame.cell_of(z0)) {
        const auto base = frame.coords(*c0);
        for (int dy = -2; dy <= 2; ++dy)
            for (int dx = -2; dx <= 2; ++dx)
                for (int dz = (frame.n == 3 ? -2 : 0); dz <= (frame.n == 3 ? 2 : 0); ++dz) {
                    std::array<int, kMaxDim> c = base;
                    c[0] += dx;
                    c[1] += dy;
                    if (frame.n == 3) c[2] += dz;
                    bool ok = true;
                    for (int i = 0; i < frame.n; ++i) ok = ok && c[i] >= 0 && c[i] < frame.dims[i];
                    if (!ok) continue;
                    const std::size_t idx = frame.index(c);
                    if (!(r1->inside(idx) && r2->inside(idx))) continue;
                    const double dd = distance(frame.center(idx), z0);
                    if (dd < best) {
                        best = dd;
                        baseCell = idx;
                    }
                }
    }
    if (!baseCell) throw InvalidArgument("union_check: no common grid cell near z0");
    const Point base = frame.center(*baseCell);

    auto k1f = std::async(std::launch::async, [&] { return solve(r1, base, stencil); });
    auto k2f = std::async(std::launch::async, [&] { return solve(r2, base, stencil); });
    const QhField ku = solve(ru, base, stencil);
    const QhField k1 = k1f.get();
    const QhField k2 = k2f.get();

    UnionReport rep;
    rep.id1 = g1.id();
    rep.id2 = g2.id();
    rep.h = h;
    rep.s = s;
    rep.z0 = z0;
    rep.weight = weight ? weight->describe() : std::string("constant(1)");
    double maxInv = 0.0;
    for (std::size_t c = 0; c < ru->mask.size(); ++c)
        if (ru->inside(c)) maxInv = std::max(maxInv, 1.0 / ru->dist[c]);
    rep.tol = 5.0 * h * maxInv;
    rep.minSlack = std::numeric_limits<double>::infinity();

    const double cell = std::pow(h, frame.n);
    double mass = 0.0, rawU = 0.0, raw1 = 0.0, raw2 = 0.0;
    for (std::size_t c = 0; c < ru->mask.size(); ++c) {
        if (!ru->inside(c)) continue;
        const double w = (weight ? weight->eval(frame.center(c), h) : 1.0) * cell;
        mass += w;
        UnionCell uc;
        uc.cell = c;
        uc.kUnion = ku.k[c];
        uc.k1 = r1->inside(c) ? k1.k[c] : 0.0;
        uc.k2 = r2->inside(c) ? k2.k[c] : 0.0;
        uc.slack = uc.k1 + uc.k2 - uc.kUnion;
        ++rep.cellsChecked;
        if (!(uc.slack >= -rep.tol)) ++rep.pointwiseViolations;
        rep.minSlack = std::min(rep.minSlack, uc.slack);
        if (std::isfinite(uc.kUnion)) rawU += std::pow(uc.kUnion, s) * w;
        if (std::isfinite(uc.k1)) raw1 += std::pow(uc.k1, s) * w;
        if (std::isfinite(uc.k2)) raw2 += std::pow(uc.k2, s) * w;
        rep.cells.push_back(uc);
    }
    rep.mean = rawU / mass;
    rep.C1 = raw1 / mass;
    rep.C2 = raw2 / mass;
    rep.bound = std::pow(2.0, s) * (rep.C1 + rep.C2);
    const double monoTol = 5.0 * h * maxInv;
    rep.monotone1 = subset_monotonicity(ku, k1, monoTol);
    rep.monotone2 = subset_monotonicity(ku, k2, monoTol);
    return rep;
}

std::vector<UnionReport> union_chain(const std::vector<DomainSpec>& specs, const Point& z0, double h, double s,
                                     const std::optional<Weight>& weight) {
    if (specs.size() < 2) throw InvalidArgument("union_chain: need at least two domains");
    std::vector<UnionReport> out;
    DomainSpec acc = specs.front();
    for (std::size_t i = 1; i < specs.size(); ++i) {
        out.push_back(union_check(acc, specs[i], z0, h, s, weight));
        acc = union_spec(acc, specs[i]);
    }
    return out;
}

void write_union_csv(std::ostream& os, const UnionReport& report) {
    os << "cell,k_union,k1*,k2*,slack\n";
    for (const auto& c : report.cells) {
        os << c.cell << ',' << format_real(c.kUnion) << ',' << format_real(c.k1) << ',' << format_real(c.k2) << ','
           << format_real(c.slack) << '\n';
    }
}

void write_union_summary(std::ostream& os, const UnionReport& r) {
    os << "g1: " << r.id1 << "\ng2: " << r.id2 << "\nh: " << format_real(r.h) << "\ns: " << format_real(r.s)
       << "\nweight: " << r.weight << "\ntol: " << format_real(r.tol) << "\ncells: " << r.cellsChecked
       << "\npointwise_violations: " << r.pointwiseViolations << "\nmin_slack: " << format_real(r.minSlack)
       << "\nC1: " << format_real(r.C1) << "\nC2: " << format_real(r.C2) << "\nbound_2s_C1_C2: "
       << format_real(r.bound) << "\nachieved_mean: " << format_real(r.mean)
       << "\nsubset_violations_g1: " << r.monotone1.violations << "\nsubset_violations_g2: " << r.monotone2.violations
       << "\nok: " << (r.ok() ? "true" : "false") << '\n';
}

HolderReport holder_check(const std::vector<double>& values, const std::vector<double>& masses, double t, double s) {
    if (!(t > 0) || !(t <= s)) throw InvalidArgument("holder_check: need 0 < t <= s");
    if (values.size() != masses.size()) throw InvalidArgument("holder_check: size mismatch");
    double mass = 0.0, at = 0.0, as = 0.0;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(masses[i] > 0)) continue;
        const double v = std::abs(values[i]);
        mass += masses[i];
        at += std::pow(v, t) * masses[i];
        as += std::pow(v, s) * masses[i];
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (!(mass > 0)) throw InvalidArgument("holder_check: zero mass");
    HolderReport rep;
    rep.t = t;
    rep.s = s;
    rep.lt = std::pow(at / mass, 1.0 / t);
    rep.ls = std::pow(as / mass, 1.0 / s);
    // Discrete Hoelder is exact; the tolerance only absorbs rounding in pow and the sums.
    rep.holds = rep.lt <= rep.ls * (1.0 + 1e-12);
    rep.equality = t == s || lo == hi;
    return rep;
}

HolderReport holder_check(const QhField& field, const std::optional<Weight>& weight, double t, double s) {
    const RasterDomain& r = *field.raster;
    std::vector<double> values, masses;
    for (std::size_t c = 0; c < r.mask.size(); ++c) {
        if (!r.inside(c) || !field.reachable(c)) continue;
        values.push_back(field.k[c]);
        masses.push_back(weight ? weight->eval(r.frame.center(c), r.h()) : 1.0);
    }
    return holder_check(values, masses, t, s);
}

}  // namespace lsavg
