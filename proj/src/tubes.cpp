#include "lsavg/tubes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

namespace lsavg {

void Tube::validate() const {
    if (endA.n != axis.n || (endA.n != 2 && endA.n != 3)) throw InvalidArgument("Tube: dimension must be 2 or 3");
    if (!(l > 0) || !(r > 0)) throw InvalidArgument("Tube: l and r must be positive");
    if (!(c > 0 && c <= 1)) throw InvalidArgument("Tube: c must lie in (0, 1]");
    if (std::abs(norm(axis) - 1.0) > 1e-12) throw InvalidArgument("Tube: axis must be a unit vector");
}

bool Tube::contains(const Point& z) const {
    const Point d = z - endA;
    const double t = dot(d, axis);
    if (t < 0 || t > l) return false;
    const Point perp = d - t * axis;
    return norm(perp) <= r;
}

std::string to_string(SeriesClass c) {
    switch (c) {
        case SeriesClass::Diverges: return "diverges";
        case SeriesClass::Converges: return "converges";
        default: return "inconclusive";
    }
}

SeriesClass classify_series(const std::vector<double>& terms, std::vector<double>* ratios) {
    std::vector<double> rat;
    for (std::size_t i = 1; i < terms.size(); ++i) rat.push_back(terms[i] / terms[i - 1]);
    if (ratios) *ratios = rat;
    if (rat.empty()) return SeriesClass::Inconclusive;
    const std::size_t window = std::min<std::size_t>(10, rat.size());
    bool div = true, conv = true, nondecreasing = true;
    for (std::size_t i = rat.size() - window; i < rat.size(); ++i) {
        div = div && rat[i] >= 0.999;
        conv = conv && rat[i] <= 0.99;
        nondecreasing = nondecreasing && terms[i + 1] >= terms[i];
    }
    if (div || nondecreasing) return SeriesClass::Diverges;
    if (conv) return SeriesClass::Converges;
    return SeriesClass::Inconclusive;
}

SeriesReport make_series(const std::string& name, double s, int n, const std::vector<double>& terms) {
    SeriesReport rep;
    rep.name = name;
    rep.s = s;
    rep.n = n;
    rep.terms = terms;
    double acc = 0.0;
    for (double t : terms) rep.partialSums.push_back(acc += t);
    rep.classification = classify_series(terms, &rep.ratios);
    rep.rule = "tail = last min(10, count) term ratios; diverges if all >= 0.999 or tail terms nondecreasing; "
               "converges if all <= 0.99";
    rep.note = std::to_string(terms.size()) + " terms";
    return rep;
}

double tube_term(const Tube& t, double s, int n) { return t.c * std::pow(t.r, n) * std::pow(t.l / t.r, s + 1.0); }

double tube_lower_bound(const Tube& t, double s, int n) {
    if (!(s >= 1.0)) throw InvalidArgument("tube_lower_bound: s must be >= 1");
    return unit_ball_volume(n - 1) / ((s + 1.0) * std::pow(2.0, s + 1.0)) * tube_term(t, s, n);
}

namespace {

struct Frame {
    Point e1, e2;  // orthonormal directions across the axis (e2 unused for n = 2)
};

Frame cross_frame(const Point& axis) {
    Frame f;
    if (axis.n == 2) {
        f.e1 = Point{-axis[1], axis[0]};
        return f;
    }
    int least = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(axis[i]) < std::abs(axis[least])) least = i;
    Point b(3);
    b[least] = 1.0;
    Point c1{axis[1] * b[2] - axis[2] * b[1], axis[2] * b[0] - axis[0] * b[2], axis[0] * b[1] - axis[1] * b[0]};
    c1 = (1.0 / norm(c1)) * c1;
    Point c2{axis[1] * c1[2] - axis[2] * c1[1], axis[2] * c1[0] - axis[0] * c1[2], axis[0] * c1[1] - axis[1] * c1[0]};
    f.e1 = c1;
    f.e2 = c2;
    return f;
}

double cross_coord(int k, int side, double r) { return -r + (k + 0.5) * 2.0 * r / side; }

}  // namespace

Point TubeComponent::sample_point(std::size_t idx) const {
    const int n = tube.dim();
    const std::size_t perSlice = n == 2 ? static_cast<std::size_t>(side) : static_cast<std::size_t>(side) * side;
    const int i = static_cast<int>(idx / perSlice);
    const std::size_t rest = idx % perSlice;
    const Frame f = cross_frame(tube.axis);
    const double t = (i + 0.5) * tube.l / nSlices;
    Point p = tube.endA + t * tube.axis;
    if (n == 2) return p + cross_coord(static_cast<int>(rest), side, tube.r) * f.e1;
    const int a = static_cast<int>(rest % side), b = static_cast<int>(rest / side);
    return p + cross_coord(a, side, tube.r) * f.e1 + cross_coord(b, side, tube.r) * f.e2;
}

bool TubeComponent::in_component(const Point& z) const {
    if (chosen < 0 || !tube.contains(z)) return false;
    const int n = tube.dim();
    const Frame f = cross_frame(tube.axis);
    const Point d = z - tube.endA;
    auto to_index = [&](double v, double lo, double step, int count) {
        return std::clamp(static_cast<int>(std::floor((v - lo) / step)), 0, count - 1);
    };
    const int i = to_index(dot(d, tube.axis), 0.0, tube.l / nSlices, nSlices);
    const double step = 2.0 * tube.r / side;
    const int a = to_index(dot(d, f.e1), -tube.r, step, side);
    std::size_t idx;
    if (n == 2) {
        idx = static_cast<std::size_t>(i) * side + a;
    } else {
        const int b = to_index(dot(d, f.e2), -tube.r, step, side);
        idx = (static_cast<std::size_t>(i) * side + b) * side + a;
    }
    return label[idx] == chosen;
}

VerifyResult verify_essential(const DomainSpec& spec, const Tube& tube, const VerifyOptions& options) {
    tube.validate();
    if (tube.dim() != spec.dim()) throw InvalidArgument("verify_essential: tube and domain dimensions differ");
    if (options.nSlices < 2 || options.samplesPerSlice < 4) throw InvalidArgument("verify_essential: too few samples");
    {
        Box tb{tube.endA, tube.endA};
        const Point endB = tube.endA + tube.l * tube.axis;
        tb.expand(Box{endB, endB});
        for (int i = 0; i < tb.dim(); ++i) {
            tb.lo[i] -= tube.r;
            tb.hi[i] += tube.r;
        }
        const Box bb = bounding_box(spec);
        for (int i = 0; i < tb.dim(); ++i) {
            if (tb.hi[i] < bb.lo[i] || tb.lo[i] > bb.hi[i]) {
                throw InvalidArgument("verify_essential: tube " + std::to_string(tube.index) +
                                      " does not meet the bounding box of " + spec.id());
            }
        }
    }
    const int n = tube.dim();
    TubeComponent comp;
    comp.tube = tube;
    comp.nSlices = options.nSlices;
    comp.side = options.samplesPerSlice;
    const int side = comp.side;
    const std::size_t perSlice = n == 2 ? static_cast<std::size_t>(side) : static_cast<std::size_t>(side) * side;
    const std::size_t total = perSlice * static_cast<std::size_t>(comp.nSlices);

    // Cross-section samples inside the disk, and those on its rim.
    std::vector<std::uint8_t> inDisk(perSlice, 0), rim(perSlice, 0);
    auto cross_inside = [&](int a, int b) {
        if (a < 0 || a >= side || b < 0 || b >= side) return false;
        const double u = cross_coord(a, side, tube.r), v = cross_coord(b, side, tube.r);
        return u * u + v * v <= tube.r * tube.r;
    };
    for (std::size_t k = 0; k < perSlice; ++k) {
        if (n == 2) {
            inDisk[k] = 1;
            rim[k] = k == 0 || k + 1 == perSlice;
        } else {
            const int a = static_cast<int>(k % side), b = static_cast<int>(k / side);
            inDisk[k] = cross_inside(a, b);
            rim[k] = inDisk[k] && (!cross_inside(a - 1, b) || !cross_inside(a + 1, b) || !cross_inside(a, b - 1) ||
                                   !cross_inside(a, b + 1));
        }
    }

    std::vector<std::uint8_t> hit(total, 0);
    for (std::size_t idx = 0; idx < total; ++idx)
        if (inDisk[idx % perSlice]) hit[idx] = contains(spec, comp.sample_point(idx));

    comp.label.assign(total, -1);
    std::vector<std::size_t> stack;
    int next = 0;
    auto neighbors = [&](std::size_t idx, auto&& fn) {
        const int i = static_cast<int>(idx / perSlice);
        const std::size_t k = idx % perSlice;
        if (i > 0) fn(idx - perSlice);
        if (i + 1 < comp.nSlices) fn(idx + perSlice);
        const int a = static_cast<int>(k % side);
        if (a > 0) fn(idx - 1);
        if (a + 1 < side) fn(idx + 1);
        if (n == 3) {
            const int b = static_cast<int>(k / side);
            if (b > 0) fn(idx - side);
            if (b + 1 < side) fn(idx + side);
        }
    };
    for (std::size_t s0 = 0; s0 < total; ++s0) {
        if (!hit[s0] || comp.label[s0] >= 0) continue;
        comp.label[s0] = next;
        std::size_t count = 0;
        stack.push_back(s0);
        while (!stack.empty()) {
            const std::size_t c = stack.back();
            stack.pop_back();
            ++count;
            neighbors(c, [&](std::size_t q) {
                if (hit[q] && comp.label[q] < 0) {
                    comp.label[q] = next;
                    stack.push_back(q);
                }
            });
        }
        comp.sizes.push_back(count);
        ++next;
    }

    VerifyResult res;
    res.componentCount = comp.sizes.size();
    if (comp.sizes.empty()) {
        throw InvalidArgument("verify_essential: tube " + std::to_string(tube.index) + " does not meet " + spec.id());
    }
    comp.chosen = static_cast<int>(std::max_element(comp.sizes.begin(), comp.sizes.end()) - comp.sizes.begin());

    const double eps = 1e-9;
    res.wallClear = true;
    res.cHat = 1.0;
    std::size_t diskCount = 0;
    for (std::size_t k = 0; k < perSlice; ++k) diskCount += inDisk[k];
    for (int i = 0; i < comp.nSlices; ++i) {
        std::size_t count = 0;
        for (std::size_t k = 0; k < perSlice; ++k) {
            const std::size_t idx = static_cast<std::size_t>(i) * perSlice + k;
            if (comp.label[idx] != comp.chosen) continue;
            ++count;
            if (!rim[k] || !res.wallClear) continue;
            // Probe just outside the wall along the sample's radial direction.
            const Point p = comp.sample_point(idx);
            const Point d = p - tube.endA;
            const Point onAxis = tube.endA + dot(d, tube.axis) * tube.axis;
            Point radial = p - onAxis;
            const double len = norm(radial);
            if (len == 0) continue;
            radial = (1.0 / len) * radial;
            if (contains(spec, onAxis + tube.r * (1.0 + eps) * radial)) res.wallClear = false;
        }
        res.cHat = std::min(res.cHat, static_cast<double>(count) / static_cast<double>(diskCount));
    }
    std::ostringstream why;
    if (!res.wallClear) why << "component reaches the wall; ";
    if (res.cHat < tube.c * (1.0 - options.tol))
        why << "slice fraction " << format_real(res.cHat) << " below claimed c=" << format_real(tube.c) << "; ";
    if (res.componentCount > 1) why << res.componentCount << " components, largest selected; ";
    res.ok = res.wallClear && res.cHat >= tube.c * (1.0 - options.tol);
    res.reason = why.str().empty() ? "ok" : why.str();
    res.component = std::move(comp);
    return res;
}

bool components_disjoint(const std::vector<TubeComponent>& comps, std::pair<int, int>* collision) {
    for (std::size_t a = 0; a < comps.size(); ++a) {
        for (std::size_t b = 0; b < comps.size(); ++b) {
            if (a == b) continue;
            const auto& A = comps[a];
            for (std::size_t idx = 0; idx < A.label.size(); ++idx) {
                if (A.label[idx] != A.chosen) continue;
                if (comps[b].in_component(A.sample_point(idx))) {
                    if (collision) *collision = {static_cast<int>(a), static_cast<int>(b)};
                    return false;
                }
            }
        }
    }
    return true;
}

TubeFamily rooms_halls_tubes(int J) {
    TubeFamily fam;
    fam.name = "rooms-halls";
    for (int j = 1; j <= J; ++j) {
        Tube t;
        t.index = j;
        t.endA = Point{0.5 * (rooms::xPrime(j) + rooms::x(j + 1)), 0.5};
        t.axis = Point{0.0, 1.0};
        t.l = 0.25;
        t.r = std::ldexp(1.0, -(j + 3));
        t.c = 1.0;
        fam.tubes.push_back(t);
    }
    return fam;
}

TubeFamily disk_rooms_tubes(int J) {
    TubeFamily fam;
    fam.name = "disk-rooms";
    for (int j = 1; j <= J; ++j) {
        const double tc = 0.5 * (disk_rooms::theta(j) + disk_rooms::theta(j + 1));
        const double phi = std::ldexp(std::numbers::pi, -(j + 1));
        Tube t;
        t.index = j;
        t.axis = Point{std::cos(tc), std::sin(tc)};
        t.endA = std::cos(phi) * t.axis;
        t.r = disk_rooms::half_chord(j);
        t.l = disk_rooms::extrusion(j, 2.0);
        t.c = 1.0;
        fam.tubes.push_back(t);
    }
    return fam;
}

double disk_rooms_surrogate_term(int j, double s) {
    return std::pow(std::pow(2.0, s - 1.0), j + 1) / std::pow(std::numbers::pi, s - 1.0);
}

TubeFamily cusp_tubes(double alpha, int n, int J) {
    if (!(alpha > 1.0)) throw InvalidArgument("cusp_tubes: alpha must be > 1");
    TubeFamily fam;
    fam.name = "cusp";
    for (int j = 1; j <= J; ++j) {
        const double a = std::ldexp(1.0, -j), b = std::ldexp(1.0, -(j - 1));
        Tube t;
        t.index = j;
        t.endA = Point(n);
        t.endA[0] = a;
        t.axis = Point(n);
        t.axis[0] = 1.0;
        t.l = b - a;
        t.r = std::pow(b, alpha);
        t.c = std::pow(a / b, alpha * n);
        fam.tubes.push_back(t);
    }
    return fam;
}

TubeFamily block_tubes(int n, int J) {
    if (n != 2 && n != 3) throw InvalidArgument("block_tubes: n must be 2 or 3");
    TubeFamily fam;
    fam.name = "blocks";
    for (int j = 1; j <= J; ++j) {
        const Box first = block::box(n, 1 << j);
        const double e = std::pow(3.0, -j);
        Tube t;
        t.index = j;
        t.endA = first.center();
        t.endA[n - 1] = first.lo[n - 1];
        t.axis = Point(n);
        t.axis[n - 1] = 1.0;
        t.l = std::pow(2.0 / 3.0, j);
        // The column of 2^j cubes: inscribed in 2-D, circumscribed cylinder in 3-D.
        t.r = n == 2 ? 0.5 * e : e / std::sqrt(2.0);
        t.c = n == 2 ? 1.0 : 2.0 / std::numbers::pi;
        fam.tubes.push_back(t);
    }
    return fam;
}

SeriesReport family_series(const TubeFamily& family, double s, int jMax) {
    if (family.tubes.empty()) throw InvalidArgument("family_series: empty family");
    const int n = family.tubes.front().dim();
    std::vector<double> terms;
    for (const Tube& t : family.tubes) {
        if (t.index > jMax) break;
        terms.push_back(tube_term(t, s, n));
    }
    return make_series(family.name, s, n, terms);
}

Certificate certify_not_averaging(const DomainSpec& spec, const TubeFamily& family, double s,
                                  const VerifyOptions& options) {
    Certificate cert;
    if (family.tubes.empty()) {
        cert.reason = "empty family";
        return cert;
    }
    const int n = family.tubes.front().dim();
    std::vector<TubeComponent> comps;
    std::vector<double> terms;
    for (const Tube& t : family.tubes) {
        VerifyResult v = verify_essential(spec, t, options);
        if (!v.ok) {
            cert.reason = "tube " + std::to_string(t.index) + " not verified: " + v.reason;
            cert.checks.push_back(std::move(v));
            return cert;
        }
        Tube certified = t;
        certified.c = std::min(t.c, v.cHat * (1.0 + options.tol));
        cert.tubes.push_back(certified);
        terms.push_back(tube_term(certified, s, n));
        cert.lowerBoundSum += tube_lower_bound(certified, s, n);
        comps.push_back(v.component);
        cert.checks.push_back(std::move(v));
    }
    std::pair<int, int> clash;
    if (!components_disjoint(comps, &clash)) {
        cert.reason = "components of tubes " + std::to_string(family.tubes[clash.first].index) + " and " +
                      std::to_string(family.tubes[clash.second].index) + " overlap";
        return cert;
    }
    cert.series = make_series(family.name, s, n, terms);
    if (cert.series.classification != SeriesClass::Diverges) {
        cert.reason = "series " + to_string(cert.series.classification) + "; no certificate";
        return cert;
    }
    cert.issued = true;
    cert.reason = "verified tubes with divergent series";
    return cert;
}

void write_certificate(std::ostream& os, const Certificate& cert) {
    os << "certificate: " << (cert.issued ? "issued" : "refused") << '\n';
    os << "reason: " << cert.reason << '\n';
    os << "family: " << cert.series.name << '\n';
    os << "s: " << format_real(cert.series.s) << '\n';
    os << "rule: " << cert.series.rule << '\n';
    os << "classification: " << to_string(cert.series.classification) << '\n';
    os << "lower_bound_sum: " << format_real(cert.lowerBoundSum) << '\n';
    os << "tubes:\n";
    for (std::size_t i = 0; i < cert.tubes.size(); ++i) {
        const Tube& t = cert.tubes[i];
        os << "  - index: " << t.index << ", endA: " << to_string(t.endA) << ", axis: " << to_string(t.axis)
           << ", l: " << format_real(t.l) << ", r: " << format_real(t.r) << ", c: " << format_real(t.c);
        if (i < cert.checks.size())
            os << ", cHat: " << format_real(cert.checks[i].cHat) << ", wallClear: " << cert.checks[i].wallClear;
        os << '\n';
    }
    os << "terms:\n";
    for (std::size_t i = 0; i < cert.series.terms.size(); ++i)
        os << "  - " << format_real(cert.series.terms[i]) << ", partial: " << format_real(cert.series.partialSums[i])
           << '\n';
}

void write_series_csv(std::ostream& os, const SeriesReport& rep) {
    os << "name,s,index,term,partial_sum,ratio,classification\n";
    for (std::size_t i = 0; i < rep.terms.size(); ++i) {
        os << rep.name << ',' << format_real(rep.s) << ',' << i + 1 << ',' << format_real(rep.terms[i]) << ','
           << format_real(rep.partialSums[i]) << ',' << (i ? format_real(rep.ratios[i - 1]) : std::string()) << ','
           << to_string(rep.classification) << '\n';
    }
}

}  // namespace lsavg
