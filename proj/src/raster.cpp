#include "lsavg/raster.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>

namespace lsavg {

std::size_t GridFrame::cell_count() const {
    std::size_t c = 1;
    for (int i = 0; i < n; ++i) c *= static_cast<std::size_t>(dims[i]);
    return c;
}

std::size_t GridFrame::index(const std::array<int, kMaxDim>& ijk) const {
    std::size_t idx = 0;
    for (int i = n - 1; i >= 0; --i) idx = idx * static_cast<std::size_t>(dims[i]) + static_cast<std::size_t>(ijk[i]);
    return idx;
}

std::array<int, kMaxDim> GridFrame::coords(std::size_t idx) const {
    std::array<int, kMaxDim> ijk{0, 0, 0};
    for (int i = 0; i < n; ++i) {
        ijk[i] = static_cast<int>(idx % static_cast<std::size_t>(dims[i]));
        idx /= static_cast<std::size_t>(dims[i]);
    }
    return ijk;
}

Point GridFrame::center(std::size_t idx) const {
    const auto ijk = coords(idx);
    Point p(n);
    for (int i = 0; i < n; ++i) p[i] = origin[i] + (ijk[i] + 0.5) * h;
    return p;
}

std::optional<std::size_t> GridFrame::cell_of(const Point& z) const {
    if (z.n != n) throw InvalidArgument("cell_of: dimension mismatch");
    std::array<int, kMaxDim> ijk{0, 0, 0};
    for (int i = 0; i < n; ++i) {
        const double f = std::floor((z[i] - origin[i]) / h);
        if (!(f >= 0 && f < dims[i])) return std::nullopt;
        ijk[i] = static_cast<int>(f);
    }
    return index(ijk);
}

bool GridFrame::aligned_with(const GridFrame& other) const {
    if (n != other.n || h != other.h) return false;
    for (int i = 0; i < n; ++i) {
        const double shift = (origin[i] - other.origin[i]) / h;
        if (std::abs(shift - std::round(shift)) > 1e-9) return false;
    }
    return true;
}

GridFrame frame_for(const Box& box, double h) {
    if (!(h > 0)) throw InvalidArgument("grid spacing h must be positive");
    GridFrame f;
    f.n = box.dim();
    f.h = h;
    f.origin = Point(f.n);
    for (int i = 0; i < f.n; ++i) {
        const double lo = std::floor(box.lo[i] / h) - 2.0;
        const double hi = std::ceil(box.hi[i] / h) + 2.0;
        const double cells = hi - lo;
        if (cells > 1e7) throw InvalidArgument("grid too large for h");
        f.origin[i] = lo * h;
        f.dims[i] = static_cast<int>(cells);
    }
    const double total = static_cast<double>(f.cell_count());
    if (total > 2e8) throw InvalidArgument("grid too large for h");
    return f;
}

namespace {

// One-dimensional lower envelope of parabolas; f holds squared distances along a line.
void edt_1d(const double* f, double* out, int len, std::vector<int>& v, std::vector<double>& z) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    v.resize(static_cast<std::size_t>(len));
    z.resize(static_cast<std::size_t>(len) + 1);
    int k = -1;
    for (int q = 0; q < len; ++q) {
        if (f[q] == inf) continue;
        double s = -inf;
        while (k >= 0) {
            const int p = v[k];
            s = ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * (q - p));
            if (s > z[k]) break;
            --k;
        }
        ++k;
        v[k] = q;
        z[k] = k == 0 ? -inf : s;
        z[k + 1] = inf;
    }
    if (k < 0) {
        std::fill(out, out + len, inf);
        return;
    }
    int j = 0;
    for (int q = 0; q < len; ++q) {
        while (z[j + 1] < q) ++j;
        const double d = q - v[j];
        out[q] = d * d + f[v[j]];
    }
}

}  // namespace

std::vector<double> squared_distance_transform(const GridFrame& frame, const std::vector<std::uint8_t>& mask) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    const std::size_t total = frame.cell_count();
    std::vector<double> g(total);
    for (std::size_t i = 0; i < total; ++i) g[i] = mask[i] ? inf : 0.0;

    std::vector<int> v;
    std::vector<double> z, line, out;
    std::size_t stride = 1;
    for (int axis = 0; axis < frame.n; ++axis) {
        const int len = frame.dims[axis];
        line.resize(static_cast<std::size_t>(len));
        out.resize(static_cast<std::size_t>(len));
        const std::size_t lines = total / static_cast<std::size_t>(len);
        for (std::size_t l = 0; l < lines; ++l) {
            const std::size_t lowPart = l % stride;
            const std::size_t highPart = l / stride;
            const std::size_t base = highPart * stride * static_cast<std::size_t>(len) + lowPart;
            for (int q = 0; q < len; ++q) line[q] = g[base + static_cast<std::size_t>(q) * stride];
            edt_1d(line.data(), out.data(), len, v, z);
            for (int q = 0; q < len; ++q) g[base + static_cast<std::size_t>(q) * stride] = out[q];
        }
        stride *= static_cast<std::size_t>(len);
    }
    return g;
}

RasterPtr rasterize(const DomainSpec& spec, double h) {
    validate(spec);
    if (!(h > 0)) throw InvalidArgument("grid spacing h must be positive");
    TruncationResult trunc = truncation_policy(spec, h);
    return rasterize(spec, h, frame_for(bounding_box(trunc.effective), h));
}

RasterPtr rasterize(const DomainSpec& spec, double h, const GridFrame& frame) {
    validate(spec);
    if (!(h > 0) || frame.h != h) throw InvalidArgument("frame spacing must equal h > 0");
    if (frame.n != spec.dim()) throw InvalidArgument("frame dimension does not match the domain");
    auto r = std::make_shared<RasterDomain>();
    r->frame = frame;
    r->spec = spec;
    r->truncation = truncation_policy(spec, h);
    const DomainSpec& eff = r->truncation.effective;

    const std::size_t total = frame.cell_count();
    r->mask.assign(total, 0);
    for (std::size_t i = 0; i < total; ++i) {
        if (contains(eff, frame.center(i))) {
            r->mask[i] = 1;
            ++r->insideCount;
        }
    }
    if (r->insideCount == 0) {
        throw InvalidArgument("empty rasterization of " + spec.id() + " at h=" + format_real(h) + " (h too coarse)");
    }
    r->volumeEstimate = static_cast<double>(r->insideCount) * std::pow(h, frame.n);

    const std::vector<double> sq = squared_distance_transform(frame, r->mask);
    r->dist.assign(total, 0.0);
    for (std::size_t i = 0; i < total; ++i) {
        if (!r->mask[i]) continue;
        double d = h * std::sqrt(sq[i]) - 0.5 * h;
        if (auto a = analytic_distance(eff, frame.center(i))) d = std::min(d, *a);
        r->dist[i] = std::max(d, 0.5 * h);
    }
    return r;
}

void write_frame_header(std::ostream& os, const GridFrame& frame, const char magic[8]) {
    os.write(magic, 8);
    const std::int32_t n = frame.n;
    os.write(reinterpret_cast<const char*>(&n), sizeof n);
    os.write(reinterpret_cast<const char*>(&frame.h), sizeof frame.h);
    for (int i = 0; i < frame.n; ++i) os.write(reinterpret_cast<const char*>(&frame.origin.c[i]), sizeof(double));
    for (int i = 0; i < frame.n; ++i) {
        const std::int32_t d = frame.dims[i];
        os.write(reinterpret_cast<const char*>(&d), sizeof d);
    }
}

GridFrame read_frame_header(std::istream& is, const char magic[8]) {
    char got[8];
    is.read(got, 8);
    if (!is || std::memcmp(got, magic, 8) != 0) throw Error("bad binary header");
    GridFrame f;
    std::int32_t n = 0;
    is.read(reinterpret_cast<char*>(&n), sizeof n);
    if (n < 1 || n > kMaxDim) throw Error("bad binary header dimension");
    f.n = n;
    f.origin = Point(n);
    is.read(reinterpret_cast<char*>(&f.h), sizeof f.h);
    for (int i = 0; i < n; ++i) is.read(reinterpret_cast<char*>(&f.origin.c[i]), sizeof(double));
    for (int i = 0; i < n; ++i) {
        std::int32_t d = 0;
        is.read(reinterpret_cast<char*>(&d), sizeof d);
        f.dims[i] = d;
    }
    if (!is) throw Error("truncated binary header");
    return f;
}

void write_raster_binary(std::ostream& os, const RasterDomain& raster) {
    write_frame_header(os, raster.frame, "LSAVGMSK");
    os.write(reinterpret_cast<const char*>(raster.mask.data()), static_cast<std::streamsize>(raster.mask.size()));
}

GridFrame read_raster_binary(std::istream& is, std::vector<std::uint8_t>& mask) {
    GridFrame f = read_frame_header(is, "LSAVGMSK");
    mask.resize(f.cell_count());
    is.read(reinterpret_cast<char*>(mask.data()), static_cast<std::streamsize>(mask.size()));
    if (!is) throw Error("truncated mask");
    return f;
}

void write_raster_csv(std::ostream& os, const RasterDomain& raster) {
    static const char* axis[] = {"x", "y", "z"};
    os << "cell";
    for (int i = 0; i < raster.n(); ++i) os << ',' << axis[i];
    os << ",dist\n";
    for (std::size_t c = 0; c < raster.mask.size(); ++c) {
        if (!raster.inside(c)) continue;
        const Point p = raster.frame.center(c);
        os << c;
        for (int i = 0; i < raster.n(); ++i) os << ',' << format_real(p[i]);
        os << ',' << format_real(raster.dist[c]) << '\n';
    }
}

}  // namespace lsavg
