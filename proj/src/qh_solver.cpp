#include "lsavg/qh_solver.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <queue>

namespace lsavg {

Stencil parse_stencil(const std::string& text) {
    if (text == "axis") return Stencil::Axis;
    if (text == "full") return Stencil::Full;
    throw InvalidArgument("stencil must be 'axis' or 'full', got '" + text + "'");
}

std::string to_string(Stencil s) { return s == Stencil::Axis ? "axis" : "full"; }

std::vector<std::array<int, kMaxDim>> stencil_offsets(int n, Stencil s) {
    std::vector<std::array<int, kMaxDim>> out;
    const int span = n == 3 ? 27 : (n == 2 ? 9 : 3);
    for (int code = 0; code < span; ++code) {
        std::array<int, kMaxDim> o{0, 0, 0};
        int c = code, nonzero = 0;
        for (int i = n - 1; i >= 0; --i) {
            o[i] = c % 3 - 1;
            c /= 3;
            nonzero += o[i] != 0;
        }
        if (nonzero == 0) continue;
        if (s == Stencil::Axis && nonzero != 1) continue;
        out.push_back(o);
    }
    return out;
}

double edge_weight(const RasterDomain& raster, std::size_t p, std::size_t q) {
    const auto a = raster.frame.coords(p);
    const auto b = raster.frame.coords(q);
    double len2 = 0.0;
    for (int i = 0; i < raster.n(); ++i) len2 += double(a[i] - b[i]) * double(a[i] - b[i]);
    return raster.h() * std::sqrt(len2) * 0.5 * (1.0 / raster.dist[p] + 1.0 / raster.dist[q]);
}

namespace {

struct Neighborhood {
    std::vector<std::array<int, kMaxDim>> offsets;
    std::vector<double> lengths;
};

Neighborhood neighborhood(int n, Stencil s, double h) {
    Neighborhood nb;
    nb.offsets = stencil_offsets(n, s);
    for (const auto& o : nb.offsets) {
        double l2 = 0.0;
        for (int i = 0; i < n; ++i) l2 += double(o[i]) * o[i];
        nb.lengths.push_back(h * std::sqrt(l2));
    }
    return nb;
}

template <class F>
void for_neighbors(const GridFrame& f, const Neighborhood& nb, std::size_t c, F&& fn) {
    const auto ijk = f.coords(c);
    for (std::size_t k = 0; k < nb.offsets.size(); ++k) {
        std::array<int, kMaxDim> q = ijk;
        bool ok = true;
        for (int i = 0; i < f.n; ++i) {
            q[i] += nb.offsets[k][i];
            if (q[i] < 0 || q[i] >= f.dims[i]) {
                ok = false;
                break;
            }
        }
        if (ok) fn(f.index(q), nb.lengths[k]);
    }
}

std::size_t snap_base(const RasterDomain& r, const Point& z0) {
    if (z0.n != r.n()) throw InvalidArgument("base point dimension does not match the raster");
    if (!z0.finite()) throw InvalidArgument("base point is not finite");
    if (!contains(r.spec, z0)) throw InvalidArgument("base point " + to_string(z0) + " is outside " + r.spec.id());
    if (!contains(r.effective(), z0)) {
        throw InvalidArgument("base point " + to_string(z0) + " lies in a region dropped by truncation (" +
                              r.truncation.note + ")");
    }
    const auto home = r.frame.cell_of(z0);
    if (home && r.inside(*home)) return *home;
    // Nearest inside cell center within two cells; ties go to the lower index.
    std::size_t best = 0;
    double bestD = std::numeric_limits<double>::infinity();
    std::array<int, kMaxDim> c{0, 0, 0};
    for (int i = 0; i < r.n(); ++i) c[i] = static_cast<int>(std::floor((z0[i] - r.frame.origin[i]) / r.h()));
    const int reach = 2;
    const int span = 2 * reach + 1;
    const int total = r.n() == 3 ? span * span * span : span * span;
    for (int code = 0; code < total; ++code) {
        std::array<int, kMaxDim> q = c;
        int rest = code;
        bool ok = true;
        for (int i = 0; i < r.n(); ++i) {
            q[i] += rest % span - reach;
            rest /= span;
            if (q[i] < 0 || q[i] >= r.frame.dims[i]) ok = false;
        }
        if (!ok) continue;
        const std::size_t idx = r.frame.index(q);
        if (!r.inside(idx)) continue;
        const double d = distance(r.frame.center(idx), z0);
        if (d < bestD || (d == bestD && idx < best)) {
            bestD = d;
            best = idx;
        }
    }
    if (!std::isfinite(bestD)) {
        throw InvalidArgument("base point " + to_string(z0) + " has no inside cell within two cells at h=" +
                              format_real(r.h()));
    }
    return best;
}

}  // namespace

double QhField::value_at(const Point& z) const {
    const auto c = raster->frame.cell_of(z);
    if (!c || !raster->inside(*c)) return kInf;
    return k[*c];
}

std::size_t QhField::reachable_count() const {
    return static_cast<std::size_t>(std::count_if(k.begin(), k.end(), [](double v) { return v < kInf; }));
}

QhField solve(const RasterPtr& raster, const Point& z0, Stencil stencil) {
    if (!raster) throw InvalidArgument("solve: null raster");
    const RasterDomain& r = *raster;
    QhField f;
    f.raster = raster;
    f.stencil = stencil;
    f.basePoint = z0;
    f.baseCell = snap_base(r, z0);
    f.snappedBase = r.frame.center(f.baseCell);
    const std::size_t total = r.frame.cell_count();
    f.k.assign(total, QhField::kInf);
    f.pred.assign(total, -1);

    const Neighborhood nb = neighborhood(r.n(), stencil, r.h());
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    std::vector<std::uint8_t> done(total, 0);
    f.k[f.baseCell] = 0.0;
    queue.push({0.0, f.baseCell});
    while (!queue.empty()) {
        const auto [kp, p] = queue.top();
        queue.pop();
        if (done[p]) continue;
        done[p] = 1;
        const double invP = 1.0 / r.dist[p];
        for_neighbors(r.frame, nb, p, [&](std::size_t q, double len) {
            if (!r.mask[q] || done[q]) return;
            const double w = len * 0.5 * (invP + 1.0 / r.dist[q]);
            const double cand = kp + w;
            if (cand < f.k[q]) {
                f.k[q] = cand;
                f.pred[q] = static_cast<std::int64_t>(p);
                queue.push({cand, q});
            } else if (cand == f.k[q] && static_cast<std::int64_t>(p) < f.pred[q]) {
                f.pred[q] = static_cast<std::int64_t>(p);
            }
        });
    }
    return f;
}

std::vector<int> component_labels(const RasterDomain& raster, Stencil stencil) {
    const std::size_t total = raster.frame.cell_count();
    std::vector<int> label(total, -1);
    const Neighborhood nb = neighborhood(raster.n(), stencil, raster.h());
    int next = 0;
    std::vector<std::size_t> stack;
    for (std::size_t s = 0; s < total; ++s) {
        if (!raster.inside(s) || label[s] >= 0) continue;
        label[s] = next;
        stack.push_back(s);
        while (!stack.empty()) {
            const std::size_t c = stack.back();
            stack.pop_back();
            for_neighbors(raster.frame, nb, c, [&](std::size_t q, double) {
                if (raster.inside(q) && label[q] < 0) {
                    label[q] = next;
                    stack.push_back(q);
                }
            });
        }
        ++next;
    }
    return label;
}

Geodesic geodesic(const QhField& field, const Point& z) {
    const RasterDomain& r = *field.raster;
    const auto cell = r.frame.cell_of(z);
    if (!cell || !r.inside(*cell)) throw InvalidArgument("geodesic: " + to_string(z) + " is not in an inside cell");
    if (!field.reachable(*cell)) {
        const auto labels = component_labels(r, field.stencil);
        throw UnreachableCell("geodesic: cell of " + to_string(z) + " is in component " +
                                  std::to_string(labels[*cell]) + ", base cell is in component " +
                                  std::to_string(labels[field.baseCell]),
                              labels[*cell]);
    }
    Geodesic g;
    for (std::int64_t c = static_cast<std::int64_t>(*cell); c >= 0; c = field.pred[static_cast<std::size_t>(c)]) {
        g.cells.push_back(static_cast<std::size_t>(c));
        g.points.push_back(r.frame.center(static_cast<std::size_t>(c)));
    }
    // Same summation order as the relaxation, so the total reproduces k bit for bit.
    const Neighborhood nb = neighborhood(r.n(), field.stencil, r.h());
    double acc = 0.0;
    for (std::size_t i = g.cells.size() - 1; i > 0; --i) {
        const std::size_t p = g.cells[i], q = g.cells[i - 1];
        const auto a = r.frame.coords(p), b = r.frame.coords(q);
        double len2 = 0.0;
        for (int d = 0; d < r.n(); ++d) len2 += double(a[d] - b[d]) * double(a[d] - b[d]);
        const double len = r.h() * std::sqrt(len2);
        acc = acc + len * 0.5 * (1.0 / r.dist[p] + 1.0 / r.dist[q]);
    }
    g.weightSum = acc;
    return g;
}

MonotonicityReport subset_monotonicity(const QhField& fieldG, const QhField& fieldD, double tol) {
    const RasterDomain& G = *fieldG.raster;
    const RasterDomain& D = *fieldD.raster;
    if (!G.frame.aligned_with(D.frame)) throw InvalidArgument("subset_monotonicity: grids are not aligned");
    if (distance(fieldG.snappedBase, fieldD.snappedBase) > 1e-9 * G.h()) {
        throw InvalidArgument("subset_monotonicity: base points differ (" + to_string(fieldG.snappedBase) + " vs " +
                              to_string(fieldD.snappedBase) + ")");
    }
    MonotonicityReport rep;
    rep.tol = tol;
    rep.maxViolation = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < D.mask.size(); ++c) {
        if (!fieldD.reachable(c)) continue;
        const auto g = G.frame.cell_of(D.frame.center(c));
        if (!g || !G.inside(*g)) {
            ++rep.cellsMissingInG;
            continue;
        }
        ++rep.cellsCompared;
        const double diff = fieldG.k[*g] - fieldD.k[c];
        rep.maxViolation = std::max(rep.maxViolation, diff);
        if (diff > tol) ++rep.violations;
    }
    return rep;
}

void write_field_csv(std::ostream& os, const QhField& field) {
    static const char* axis[] = {"x", "y", "z"};
    const RasterDomain& r = *field.raster;
    os << "cell";
    for (int i = 0; i < r.n(); ++i) os << ',' << axis[i];
    os << ",k\n";
    for (std::size_t c = 0; c < r.mask.size(); ++c) {
        if (!r.inside(c)) continue;
        const Point p = r.frame.center(c);
        os << c;
        for (int i = 0; i < r.n(); ++i) os << ',' << format_real(p[i]);
        os << ',' << (field.reachable(c) ? format_real(field.k[c]) : std::string("inf")) << '\n';
    }
}

void write_field_binary(std::ostream& os, const QhField& field) {
    write_frame_header(os, field.raster->frame, "LSAVGFLD");
    os.write(reinterpret_cast<const char*>(field.k.data()), static_cast<std::streamsize>(field.k.size() * sizeof(double)));
}

GridFrame read_field_binary(std::istream& is, std::vector<double>& k) {
    GridFrame f = read_frame_header(is, "LSAVGFLD");
    k.resize(f.cell_count());
    is.read(reinterpret_cast<char*>(k.data()), static_cast<std::streamsize>(k.size() * sizeof(double)));
    if (!is) throw Error("truncated field");
    return f;
}

}  // namespace lsavg
