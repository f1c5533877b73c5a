#include "lsavg/whitney.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <queue>
#include <limits>
#include <random>
#include <tuple>

namespace lsavg {

namespace {

double cusp_radius_lo(const SubdivisionSet& s, double x) {
    return (1.0 - std::ldexp(1.0, 1 - s.ell)) * std::pow(x, s.alpha);
}
double cusp_radius_hi(const SubdivisionSet& s, double x) { return (1.0 - std::ldexp(1.0, -s.ell)) * std::pow(x, s.alpha); }

double radial_part(const Point& z) {
    double r2 = 0.0;
    for (int i = 1; i < z.n; ++i) r2 += z[i] * z[i];
    return std::sqrt(r2);
}

bool cusp_piece_contains(const SubdivisionSet& s, const Point& z, double slack) {
    const double x = z[0];
    if (x < s.box.lo[0] - slack || x > s.box.hi[0] + slack) return false;
    if (s.sign > 0 && z[1] < -slack) return false;
    if (s.sign < 0 && z[1] > slack) return false;
    const double r = radial_part(z);
    const double lo = cusp_radius_lo(s, std::clamp(x, s.box.lo[0], s.box.hi[0]));
    const double hi = cusp_radius_hi(s, std::clamp(x, s.box.lo[0], s.box.hi[0]));
    return r >= lo * (1.0 - 1e-12) - slack && r <= hi * (1.0 + 1e-12) + slack;
}

bool interior_contains(const SubdivisionSet& s, const Point& z) {
    if (s.shape == SetShape::Box) return s.box.contains_open(z);
    const double x = z[0];
    if (!(x > s.box.lo[0] && x < s.box.hi[0])) return false;
    if (s.sign > 0 && !(z[1] > 0)) return false;
    if (s.sign < 0 && !(z[1] < 0)) return false;
    const double r = radial_part(z);
    return r > cusp_radius_lo(s, x) && r < cusp_radius_hi(s, x);
}

bool sets_touch(const SubdivisionSet& a, const SubdivisionSet& b) {
    if (!a.neighbors.empty()) return std::find(a.neighbors.begin(), a.neighbors.end(), b.id) != a.neighbors.end();
    return touches(a.box, b.box, 1e-12);
}

double ipow3(int j) { return std::pow(3.0, j); }

/// Overlap volume, treating overlaps thinner than rounding noise as touching.
double interior_overlap(const Box& a, const Box& b) {
    double v = 1.0;
    for (int i = 0; i < a.dim(); ++i) {
        const double len = std::min(a.hi[i], b.hi[i]) - std::max(a.lo[i], b.lo[i]);
        const double scale = std::max({a.extent(i), b.extent(i), 1e-300});
        if (len <= 1e-12 * scale) return 0.0;
        v *= len;
    }
    return v;
}

}  // namespace

bool SubdivisionSet::contains(const Point& z) const {
    if (z.n != n) throw InvalidArgument("SubdivisionSet::contains: dimension mismatch");
    if (shape == SetShape::Box) return box.contains_closed(z, 1e-12 * std::max(1.0, box.min_extent()));
    return cusp_piece_contains(*this, z, 0.0);
}

// ---------------------------------------------------------------------------
// cube family

long long cube_edge_count(int j) {
    if (j < 0 || j > 37) throw InvalidArgument("cube_edge_count: j out of range");
    long long p = 1;
    for (int i = 0; i < j; ++i) p *= 3;
    return 2 * p - 1;
}

long long cube_edge_count_recurrence(int j) {
    if (j < 0 || j > 37) throw InvalidArgument("cube_edge_count_recurrence: j out of range");
    long long e = 1;
    for (int i = 1; i <= j; ++i) e = 3 * e + 2;
    return e;
}

namespace {

long long ipow(long long b, int e) {
    long long r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

double layer_side(int j) { return 0.5 / ipow3(j); }
double layer_delta(int j) { return 1.0 / (4.0 * ipow3(j)); }
/// Half of the outer side of the hollow cube formed by layers 0..j.
double layer_half_extent(int j) { return j == 0 ? 0.25 : 0.5 - 0.25 / ipow3(j); }

SubdivisionSet make_cube_cell(int n, int j, const std::array<long long, kMaxDim>& idx, int id) {
    SubdivisionSet s;
    s.id = id;
    s.family = "cube";
    s.shape = SetShape::Box;
    s.n = n;
    s.layer = j;
    const double side = layer_side(j);
    const double lo0 = 0.5 - layer_half_extent(j);
    s.box = Box{Point(n), Point(n)};
    for (int i = 0; i < n; ++i) {
        s.box.lo[i] = lo0 + static_cast<double>(idx[i]) * side;
        s.box.hi[i] = s.box.lo[i] + side;
    }
    s.starCenter = s.box.center();
    s.delta = layer_delta(j);
    s.d = 2.0 * std::sqrt(static_cast<double>(n)) * s.delta;
    s.dx = s.dr = s.d;
    s.measureUB = std::pow(side, n);
    return s;
}

}  // namespace

std::vector<CubeLayer> cube_subdivision(int n, int jMax) {
    if (n < 1) throw InvalidArgument("cube_subdivision: n must be >= 1");
    if (jMax < 0) throw InvalidArgument("cube_subdivision: jMax must be >= 0");
    std::vector<CubeLayer> layers;
    for (int j = 0; j <= jMax; ++j) {
        CubeLayer L;
        L.j = j;
        L.e = cube_edge_count(j);
        if (j == 0) {
            L.ringCount = 1;
        } else {
            __int128 outer = 1, inner = 1;
            for (int i = 0; i < n; ++i) {
                outer *= L.e;
                inner *= L.e - 2;
            }
            const __int128 ring = outer - inner;
            L.ringCount = ring > std::numeric_limits<long long>::max() ? -1 : static_cast<long long>(ring);
        }
        L.nuBound = j == 0 ? 1.0 : std::pow(2.0, n) * n * std::pow(3.0, j * (n - 1));
        L.side = layer_side(j);
        L.delta = layer_delta(j);
        L.d = 2.0 * std::sqrt(static_cast<double>(n)) * L.delta;
        if (j == 0) {
            L.measure = std::pow(L.side, n);
        } else {
            // o^n - i^n = (o - i) sum o^k i^(n-1-k), with o - i = 3^-j; avoids cancellation.
            const double o = 2.0 * layer_half_extent(j), in = 2.0 * layer_half_extent(j - 1);
            double sum = 0.0;
            for (int k = 0; k < n; ++k) sum += std::pow(o, k) * std::pow(in, n - 1 - k);
            L.measure = sum / ipow3(j);
        }
        L.measureBound = j == 0 ? std::pow(0.5, n) : n / ipow3(j);
        layers.push_back(L);
    }
    return layers;
}

std::vector<SubdivisionSet> cube_cells(int n, int jMax) {
    if (n != 2 && n != 3) throw InvalidArgument("cube_cells: explicit enumeration supports n = 2, 3");
    std::vector<SubdivisionSet> cells;
    cells.push_back(make_cube_cell(n, 0, {0, 0, 0}, 0));
    for (int j = 1; j <= jMax; ++j) {
        const long long e = cube_edge_count(j);
        std::array<long long, kMaxDim> idx{0, 0, 0};
        const long long total = ipow(e, n);
        for (long long code = 0; code < total; ++code) {
            long long rest = code;
            bool ring = false;
            for (int i = 0; i < n; ++i) {
                idx[i] = rest % e;
                rest /= e;
                ring = ring || idx[i] == 0 || idx[i] == e - 1;
            }
            if (ring) cells.push_back(make_cube_cell(n, j, idx, static_cast<int>(cells.size())));
        }
    }
    compute_neighbors(cells);
    return cells;
}

SubdivisionSet cube_cell_at(int n, const Point& z, int jMax) {
    if (z.n != n) throw InvalidArgument("cube_cell_at: dimension mismatch");
    double rho = 0.0;
    for (int i = 0; i < n; ++i) {
        if (!(z[i] > 0.0 && z[i] < 1.0)) throw InvalidArgument("cube_cell_at: point outside the unit cube");
        rho = std::max(rho, std::abs(z[i] - 0.5));
    }
    int j = 0;
    while (rho > layer_half_extent(j)) {
        if (++j > jMax) throw InvalidArgument("cube_cell_at: point lies beyond layer jMax");
    }
    if (j == 0) return make_cube_cell(n, 0, {0, 0, 0}, 0);
    const long long e = cube_edge_count(j);
    const double side = layer_side(j);
    const double lo0 = 0.5 - layer_half_extent(j);
    std::array<long long, kMaxDim> idx{0, 0, 0};
    bool ring = false;
    int far = 0;
    for (int i = 0; i < n; ++i) {
        idx[i] = std::clamp(static_cast<long long>(std::floor((z[i] - lo0) / side)), 0LL, e - 1);
        ring = ring || idx[i] == 0 || idx[i] == e - 1;
        if (std::abs(z[i] - 0.5) > std::abs(z[far] - 0.5)) far = i;
    }
    if (!ring) idx[far] = z[far] < 0.5 ? 0 : e - 1;
    return make_cube_cell(n, j, idx, -1);
}

std::vector<SubdivisionSet> cube_layer_walk(int n, const Point& z, int jMax) {
    std::vector<SubdivisionSet> chain{cube_cell_at(n, z, jMax)};
    while (chain.back().layer > 0) {
        const SubdivisionSet& cur = chain.back();
        const double inner = layer_half_extent(cur.layer - 1);
        Point p = cur.starCenter;
        for (int i = 0; i < n; ++i) {
            // Project onto the inner hollow cube, then step slightly inside it.
            const double lo = 0.5 - inner, hi = 0.5 + inner;
            const double nudge = 1e-9 * layer_side(cur.layer);
            p[i] = std::clamp(p[i], lo + nudge, hi - nudge);
        }
        chain.push_back(cube_cell_at(n, p, cur.layer - 1));
    }
    std::reverse(chain.begin(), chain.end());
    for (std::size_t i = 0; i < chain.size(); ++i) chain[i].id = static_cast<int>(i);
    return chain;
}

// ---------------------------------------------------------------------------
// chains

ChainBound chain_bound(const std::vector<SubdivisionSet>& chain, const std::vector<Leg>& legs) {
    if (chain.empty()) throw InvalidArgument("chain_bound: empty chain");
    if (!legs.empty() && legs.size() != chain.size()) throw InvalidArgument("chain_bound: one leg per set required");
    ChainBound cb;
    for (std::size_t i = 0; i < chain.size(); ++i) {
        const SubdivisionSet& s = chain[i];
        if (i > 0 && !sets_touch(chain[i - 1], s)) {
            throw InvalidArgument("chain_bound: sets " + std::to_string(chain[i - 1].id) + " and " +
                                  std::to_string(s.id) + " are not adjacent");
        }
        if (!(s.delta > 0)) throw InvalidArgument("chain_bound: delta must be positive");
        const Leg leg = legs.empty() ? Leg::Diameter : legs[i];
        const double d = leg == Leg::Horizontal ? s.dx : (leg == Leg::Radial ? s.dr : s.d);
        cb.value += 2.0 * d / s.delta;
        cb.ids.push_back(s.id);
    }
    return cb;
}

SeriesReport cube_bound_series(int n, double s, int jMax) {
    if (!(s >= 0.0)) throw InvalidArgument("cube_bound_series: s must be >= 0");
    const double M = 2.0 * std::sqrt(static_cast<double>(n));
    std::vector<double> terms;
    for (const CubeLayer& L : cube_subdivision(n, jMax))
        terms.push_back(std::pow(2.0 * M, s) * std::pow(L.j + 1.0, s) * L.measure);
    SeriesReport rep = make_series("cube-bound", s, n, terms);
    return rep;
}

// ---------------------------------------------------------------------------
// cusp family

double cusp_c1(double alpha) {
    if (!(alpha > 1.0)) throw InvalidArgument("cusp: alpha must be > 1");
    const double slope = alpha * std::pow(2.0, -(alpha - 1.0));
    return 1.0 / std::sqrt(1.0 + slope * slope);
}

double cusp_delta_constant(double alpha) { return cusp_c1(alpha) * std::pow(2.0, -alpha); }

double cusp_distance_factor(double alpha) { return std::pow(2.0, alpha) / cusp_c1(alpha); }

double cusp_k_constant(double alpha) {
    const double geometric = 1.0 / (1.0 - std::pow(2.0, 1.0 - alpha));
    return std::max(2.0 * geometric, 4.0) / cusp_delta_constant(alpha);
}

int cusp_layer(long long m) {
    if (m < 1) throw InvalidArgument("cusp: m must be >= 1");
    int l = 0;
    while (m > 0) {
        ++l;
        m >>= 1;
    }
    return l;
}

SubdivisionSet cusp_set(double alpha, int j, long long m, int n, int sign) {
    if (!(alpha > 1.0)) throw InvalidArgument("cusp_set: alpha must be > 1");
    if (j < 1) throw InvalidArgument("cusp_set: j must be >= 1");
    if (m < 1) throw InvalidArgument("cusp_set: m must be >= 1");
    if (n != 2 && n != 3) throw InvalidArgument("cusp_set: n must be 2 or 3");
    SubdivisionSet s;
    s.family = "cusp";
    s.shape = SetShape::CuspPiece;
    s.n = n;
    s.alpha = alpha;
    s.j = j;
    s.m = m;
    s.ell = cusp_layer(m);
    s.layer = s.ell;
    s.sign = m == 1 ? 0 : sign;
    const double unit = std::ldexp(1.0, -(j + s.ell));
    const double x0 = static_cast<double>(m) * unit, x1 = static_cast<double>(m + 1) * unit;
    const double rmax = (1.0 - std::ldexp(1.0, -s.ell)) * std::pow(x1, alpha);
    s.box = Box{Point(n), Point(n)};
    s.box.lo[0] = x0;
    s.box.hi[0] = x1;
    for (int i = 1; i < n; ++i) {
        s.box.lo[i] = -rmax;
        s.box.hi[i] = rmax;
    }
    if (n == 2 && s.sign > 0) s.box.lo[1] = 0.0;
    if (n == 2 && s.sign < 0) s.box.hi[1] = 0.0;
    s.dx = unit;
    s.dr = std::pow(x1, alpha) * std::ldexp(1.0, -s.ell);
    s.d = s.dr;
    s.delta = cusp_delta_constant(alpha) * std::pow(2.0, -(alpha * j + s.ell));
    s.measureUB = cusp_measure_bound(alpha, n, j, m);
    const double xm = 0.5 * (x0 + x1);
    s.starCenter = Point(n);
    s.starCenter[0] = xm;
    if (s.sign != 0) {
        const double rm = 0.5 * ((1.0 - std::ldexp(1.0, 1 - s.ell)) + (1.0 - std::ldexp(1.0, -s.ell))) *
                          std::pow(xm, alpha);
        s.starCenter[1] = s.sign * rm;
    }
    // Whole sets with m > 1 are rings around the axis.
    s.skipStarCheck = m > 1 && s.sign == 0;
    return s;
}

std::vector<SubdivisionSet> cusp_family(double alpha, int n, int J, int L) {
    if (J < 1 || L < 1 || L > 30) throw InvalidArgument("cusp_family: need J >= 1 and 1 <= L <= 30");
    std::vector<SubdivisionSet> sets;
    std::map<std::tuple<int, long long, int>, int> ids;
    for (int j = 1; j <= J; ++j) {
        for (long long m = 1; m < (1LL << L); ++m) {
            const std::vector<int> signs = (n == 2 && m > 1) ? std::vector<int>{1, -1} : std::vector<int>{0};
            for (int sg : signs) {
                SubdivisionSet s = cusp_set(alpha, j, m, n, sg);
                s.id = static_cast<int>(sets.size());
                ids[{j, m, s.sign}] = s.id;
                sets.push_back(s);
            }
        }
    }
    auto link = [&](int a, int b) {
        sets[a].neighbors.push_back(b);
        sets[b].neighbors.push_back(a);
    };
    for (auto& s : sets) {
        if (s.m > 1) {
            const long long parent = s.m / 2;
            link(s.id, ids.at({s.j, parent, parent == 1 ? 0 : s.sign}));
        }
        if (s.m > 1 && cusp_layer(s.m + 1) == s.ell) link(s.id, ids.at({s.j, s.m + 1, s.sign}));
        if (s.m == 1 && s.j < J) link(s.id, ids.at({s.j + 1, 1LL, 0}));
    }
    for (auto& s : sets) {
        std::sort(s.neighbors.begin(), s.neighbors.end());
        s.neighbors.erase(std::unique(s.neighbors.begin(), s.neighbors.end()), s.neighbors.end());
    }
    return sets;
}

bool cusp_john_piece(const Point& z) { return z[0] > 0.25; }

std::vector<long long> lambda_chain(long long m) {
    if (m < 1) throw InvalidArgument("lambda_chain: m must be >= 1");
    std::vector<long long> out;
    for (; m >= 1; m >>= 1) out.push_back(m);
    return out;
}

double cusp_chain_value(double alpha, int j, long long m) {
    double value = 0.0;
    for (int i = 1; i <= j; ++i) {
        const SubdivisionSet s = cusp_set(alpha, i, 1);
        value += 2.0 * s.dx / s.delta;
    }
    for (long long lambda : lambda_chain(m)) {
        const SubdivisionSet s = cusp_set(alpha, j, lambda);
        value += 2.0 * s.dr / s.delta;
    }
    return value;
}

double cusp_k_bound(double alpha, int j, long long m) {
    return cusp_k_constant(alpha) * (1.0 + cusp_layer(m)) * std::pow(2.0, (alpha - 1.0) * j);
}

double cusp_measure_bound(double alpha, int n, int j, long long m) {
    const int ell = cusp_layer(m);
    return std::pow(2.0, -j * (alpha * (n - 1) + 1.0)) * std::pow(2.0, -2.0 * ell);
}

double cusp_m_sum(double s, long long mMax) {
    double acc = 0.0;
    for (long long m = 1; m <= mMax; ++m) {
        const double md = static_cast<double>(m);
        acc += std::pow(2.0 + std::log2(md), s) / (md * md);
    }
    return acc;
}

CuspSeriesReport cusp_upper_series(double alpha, int n, double s, int jMax, long long mMax) {
    if (!(alpha > 1.0)) throw InvalidArgument("cusp_upper_series: alpha must be > 1");
    if (jMax < 1 || mMax < 1) throw InvalidArgument("cusp_upper_series: jMax and mMax must be >= 1");
    // The m-sum does not depend on j; group by layer since every m in a layer has the same bound.
    double mSum = 0.0;
    for (int ell = 1;; ++ell) {
        const long long first = 1LL << (ell - 1);
        if (first > mMax) break;
        const long long last = std::min(mMax, (1LL << ell) - 1);
        mSum += static_cast<double>(last - first + 1) * std::pow(1.0 + ell, s) * std::pow(2.0, -2.0 * ell);
    }
    std::vector<double> terms;
    const double Ck = cusp_k_constant(alpha);
    for (int j = 1; j <= jMax; ++j) {
        const double kj = std::pow(Ck * std::pow(2.0, (alpha - 1.0) * j), s);
        terms.push_back(kj * std::pow(2.0, -j * (alpha * (n - 1) + 1.0)) * mSum);
    }
    CuspSeriesReport rep;
    rep.series = make_series("cusp-upper", s, n, terms);
    rep.jRatio = std::pow(2.0, (alpha - 1.0) * s - (alpha * (n - 1) + 1.0));
    rep.seriesCondition = (alpha - 1.0) * s - (alpha * (n - 1) + 1.0) < 0;
    rep.theoremCondition = (alpha - 1.0) * (s - n + 1.0) < n;
    rep.criticalS = n / (alpha - 1.0) + n - 1.0;
    rep.series.note += "; series condition " + std::string(rep.seriesCondition ? "holds" : "fails") +
                       ", theorem condition " + (rep.theoremCondition ? "holds" : "fails");
    return rep;
}

// ---------------------------------------------------------------------------
// block family

BlockCounts block_counts(long long m) {
    if (m < 1) throw InvalidArgument("block_counts: m must be >= 1");
    BlockCounts c;
    c.sizeExponent = cusp_layer(m) - 1;
    c.edge = std::pow(3.0, -c.sizeExponent);
    return c;
}

BlockSeriesReport block_upper_series(int n, double s, long long mMax, int iMax) {
    if (!(s >= 1.0)) throw InvalidArgument("block_upper_series: s must be >= 1");
    if (mMax < 1 || iMax < 0) throw InvalidArgument("block_upper_series: need mMax >= 1, iMax >= 0");
    const double p = n * std::log2(3.0);
    std::vector<double> terms, major;
    for (int g = 0;; ++g) {
        const long long first = 1LL << g;
        if (first > mMax) break;
        const long long last = std::min(mMax, (1LL << (g + 1)) - 1);
        double t = 0.0, u = 0.0;
        for (long long m = first; m <= last; ++m) {
            const double md = static_cast<double>(m);
            const double w = std::pow(md, -p);
            for (int i = 0; i <= iMax; ++i) {
                const double geo = std::pow(3.0, -i);
                t += std::pow(i + 1.0 + 3.0 * md, s) * w * geo;
                u += std::pow(md, s) * std::pow(i + 4.0, s) * w * geo;
            }
        }
        terms.push_back(t);
        major.push_back(u);
    }
    BlockSeriesReport rep;
    rep.series = make_series("block-upper", s, n, terms);
    rep.majorant = make_series("block-upper-majorant", s, n, major);
    rep.mExponent = s - p;
    rep.criticalS = p - 1.0;
    rep.converges = s < rep.criticalS;
    rep.series.note += "; grouped by generation; m-exponent " + format_real(rep.mExponent);
    return rep;
}

// ---------------------------------------------------------------------------
// validation

void compute_neighbors(std::vector<SubdivisionSet>& sets) {
    std::vector<std::size_t> order(sets.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return sets[a].box.lo[0] < sets[b].box.lo[0]; });
    for (auto& s : sets) s.neighbors.clear();
    for (std::size_t a = 0; a < order.size(); ++a) {
        const Box& A = sets[order[a]].box;
        for (std::size_t b = a + 1; b < order.size(); ++b) {
            const Box& B = sets[order[b]].box;
            if (B.lo[0] > A.hi[0] + 1e-12) break;
            if (touches(A, B, 1e-12)) {
                sets[order[a]].neighbors.push_back(sets[order[b]].id);
                sets[order[b]].neighbors.push_back(sets[order[a]].id);
            }
        }
    }
    for (auto& s : sets) std::sort(s.neighbors.begin(), s.neighbors.end());
}

ValidationReport validate_subdivision(std::vector<SubdivisionSet> sets, const RasterDomain& raster,
                                      double distanceFactor, const ValidationOptions& options) {
    ValidationReport rep;
    rep.sets = sets.size();
    if (sets.empty()) {
        rep.messages.push_back("no sets");
        return rep;
    }
    bool haveNeighbors = std::any_of(sets.begin(), sets.end(), [](const auto& s) { return !s.neighbors.empty(); });
    if (!haveNeighbors) compute_neighbors(sets);
    std::map<int, std::size_t> byId;
    for (std::size_t i = 0; i < sets.size(); ++i) byId[sets[i].id] = i;
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    auto sample_in = [&](const SubdivisionSet& s, Point& out) {
        for (int attempt = 0; attempt < 200; ++attempt) {
            Point p(s.n);
            for (int i = 0; i < s.n; ++i) p[i] = s.box.lo[i] + unit(rng) * s.box.extent(i);
            if (interior_contains(s, p)) {
                out = p;
                return true;
            }
        }
        return false;
    };

    // Pairwise overlap among sets whose boxes overlap.
    std::vector<std::size_t> order(sets.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return sets[a].box.lo[0] < sets[b].box.lo[0]; });
    for (std::size_t a = 0; a < order.size(); ++a) {
        const SubdivisionSet& A = sets[order[a]];
        for (std::size_t b = a + 1; b < order.size(); ++b) {
            const SubdivisionSet& B = sets[order[b]];
            if (B.box.lo[0] >= A.box.hi[0]) break;
            const double boxOverlap = interior_overlap(A.box, B.box);
            if (boxOverlap <= 0.0) continue;
            if (A.shape == SetShape::Box && B.shape == SetShape::Box) {
                ++rep.overlapViolations;
                rep.overlapMeasure += boxOverlap;
                rep.messages.push_back("sets " + std::to_string(A.id) + " and " + std::to_string(B.id) + " overlap");
                continue;
            }
            int hits = 0;
            Point p;
            for (int k = 0; k < options.overlapSamples; ++k)
                if (sample_in(A, p) && interior_contains(B, p)) ++hits;
            if (hits > 0) {
                ++rep.overlapViolations;
                rep.overlapMeasure += boxOverlap * hits / options.overlapSamples;
                rep.messages.push_back("sets " + std::to_string(A.id) + " and " + std::to_string(B.id) +
                                       " overlap (sampled)");
            }
        }
    }

    // Coverage of the raster, excluding the cusp John piece.
    const bool cusp = std::any_of(sets.begin(), sets.end(), [](const auto& s) { return s.family == "cusp"; });
    std::vector<std::uint8_t> covered(raster.mask.size(), 0);
    const GridFrame& f = raster.frame;
    for (const auto& s : sets) {
        std::array<int, kMaxDim> lo{0, 0, 0}, hi{0, 0, 0};
        for (int i = 0; i < f.n; ++i) {
            lo[i] = std::max(0, static_cast<int>(std::floor((s.box.lo[i] - f.origin[i]) / f.h)));
            hi[i] = std::min(f.dims[i] - 1, static_cast<int>(std::floor((s.box.hi[i] - f.origin[i]) / f.h)));
        }
        std::array<int, kMaxDim> c = lo;
        while (true) {
            const std::size_t idx = f.index(c);
            if (raster.inside(idx) && !covered[idx] && s.contains(f.center(idx))) covered[idx] = 1;
            int axis = 0;
            while (axis < f.n && ++c[axis] > hi[axis]) {
                c[axis] = lo[axis];
                ++axis;
            }
            if (axis == f.n) break;
        }
    }
    std::size_t considered = 0, hit = 0;
    for (std::size_t c = 0; c < raster.mask.size(); ++c) {
        if (!raster.inside(c)) continue;
        if (cusp && cusp_john_piece(f.center(c))) continue;
        ++considered;
        hit += covered[c];
    }
    rep.coveredFraction = considered ? static_cast<double>(hit) / static_cast<double>(considered) : 0.0;

    // Connectivity of the adjacency graph.
    std::vector<std::uint8_t> seen(sets.size(), 0);
    std::queue<std::size_t> queue;
    queue.push(0);
    seen[0] = 1;
    std::size_t reached = 1;
    while (!queue.empty()) {
        const std::size_t a = queue.front();
        queue.pop();
        for (int nb : sets[a].neighbors) {
            auto it = byId.find(nb);
            if (it == byId.end() || seen[it->second]) continue;
            seen[it->second] = 1;
            ++reached;
            queue.push(it->second);
        }
    }
    rep.connected = reached == sets.size();
    if (!rep.connected) rep.messages.push_back("adjacency graph is not connected");

    // Star-shapedness about the recorded center, and the distance factor.
    for (const auto& s : sets) {
        if (s.d > distanceFactor * s.delta * (1.0 + 1e-12)) {
            ++rep.whitneyViolations;
            rep.messages.push_back("set " + std::to_string(s.id) + " has d > M delta");
        }
        if (s.skipStarCheck) {
            ++rep.starSkipped;
            continue;
        }
        const double slack = 1e-12 * std::max(s.box.min_extent(), 1e-300);
        bool ok = true;
        Point end;
        for (int k = 0; k < options.starSamples && ok; ++k) {
            if (!sample_in(s, end)) continue;
            for (int t = 1; t < options.segmentSteps && ok; ++t) {
                const double u = static_cast<double>(t) / options.segmentSteps;
                const Point q = s.starCenter + u * (end - s.starCenter);
                ok = s.shape == SetShape::Box ? s.box.contains_closed(q, slack) : cusp_piece_contains(s, q, slack);
            }
        }
        if (!ok) {
            ++rep.starViolations;
            rep.messages.push_back("set " + std::to_string(s.id) + " is not star-shaped about its center");
        }
    }
    if (rep.starSkipped) rep.messages.push_back(std::to_string(rep.starSkipped) + " ring-shaped sets skipped by the star check");
    if (cusp) rep.messages.push_back("John piece {x > 1/4} excluded from coverage");
    return rep;
}

void write_subdivision_csv(std::ostream& os, const std::vector<SubdivisionSet>& sets) {
    os << "id,family,layer,d,delta,neighbors\n";
    for (const auto& s : sets) {
        os << s.id << ',' << s.family << ',' << s.layer << ',' << format_real(s.d) << ',' << format_real(s.delta) << ',';
        for (std::size_t i = 0; i < s.neighbors.size(); ++i) os << (i ? ";" : "") << s.neighbors[i];
        os << '\n';
    }
}

}  // namespace lsavg
