#include "lsavg/domain.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace lsavg {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double radial(const Point& z) {
    double r2 = 0.0;
    for (int i = 1; i < z.n; ++i) r2 += z[i] * z[i];
    return std::sqrt(r2);
}

void require_dim(const DomainSpec& spec, const Point& z) {
    if (z.n != spec.dim()) {
        throw InvalidArgument("dimension mismatch: point has n=" + std::to_string(z.n) +
                              ", domain " + spec.id() + " has n=" + std::to_string(spec.dim()));
    }
}

Box cube_box(int n, double lo, double hi) {
    Box b{Point(n), Point(n)};
    for (int i = 0; i < n; ++i) {
        b.lo[i] = lo;
        b.hi[i] = hi;
    }
    return b;
}

std::vector<Box> tower_boxes(const BlockTower& t) {
    std::vector<Box> boxes;
    boxes.reserve(static_cast<std::size_t>(t.mMax));
    for (int m = 1; m <= t.mMax; ++m) boxes.push_back(block::box(t.n, m));
    return boxes;
}

// Blocks whose extent along the stacking axis comes within eps of z.
std::vector<Box> tower_candidates(const BlockTower& t, const Point& z) {
    const double y = z[t.n - 1];
    const double eps = 1e-9;
    std::vector<Box> boxes;
    if (y <= 1.0 + eps) boxes.push_back(block::box(t.n, 1));
    double base = 1.0;
    for (int g = 1; (1 << g) <= t.mMax; ++g) {
        const double e = std::pow(3.0, -g);
        const int first = 1 << g;
        const int last = std::min(t.mMax, (1 << (g + 1)) - 1);
        const double top = base + (last - first + 1) * e;
        if (y >= base - eps && y <= top + eps) {
            const int k = static_cast<int>(std::floor((y - base) / e));
            for (int kk = std::max(0, k - 1); kk <= k + 1; ++kk)
                if (first + kk <= last) boxes.push_back(block::box(t.n, first + kk));
        }
        base += std::ldexp(1.0, g) * e;
    }
    return boxes;
}

// Interior of a union of closed boxes: z is interior iff every orthant corner of a tiny
// cube around z lies in the closed union.
bool box_union_interior(const std::vector<Box>& boxes, const Point& z) {
    double minExtent = std::numeric_limits<double>::infinity();
    bool inClosed = false;
    for (const Box& b : boxes) {
        if (b.contains_open(z)) return true;
        minExtent = std::min(minExtent, b.min_extent());
        inClosed = inClosed || b.contains_closed(z);
    }
    if (!inClosed) return false;
    const double eps = 1e-9 * minExtent;
    const int corners = 1 << z.n;
    for (int mask = 0; mask < corners; ++mask) {
        Point q = z;
        for (int i = 0; i < z.n; ++i) q[i] += ((mask >> i) & 1) ? eps : -eps;
        bool covered = false;
        for (const Box& b : boxes) {
            if (b.contains_closed(q)) {
                covered = true;
                break;
            }
        }
        if (!covered) return false;
    }
    return true;
}

bool rooms_contains(const RoomsAndHalls& r, const Point& z) {
    const double y = z[1];
    if (!(y > 0.0)) return false;
    const double ax = std::abs(z[0]);
    if (ax < 0.5) return y < 1.0;
    for (int j = 1; j <= r.jMax; ++j) {
        // ax == x_j and ax == x'_j sit on the shared face with the hall.
        if (ax <= rooms::xPrime(j)) return y < rooms::hall_height(j);
        if (ax < rooms::x(j + 1)) return y < 1.0;
    }
    return false;
}

bool disk_room_contains(int j, const Point& z) {
    const double tc = 0.5 * (disk_rooms::theta(j) + disk_rooms::theta(j + 1));
    const double phi = 0.5 * (disk_rooms::theta(j + 1) - disk_rooms::theta(j));
    const Point nrm{std::cos(tc), std::sin(tc)};
    const Point tan{-std::sin(tc), std::cos(tc)};
    const Point mid = std::cos(phi) * nrm;
    const Point d = z - mid;
    const double u = dot(d, tan);
    const double v = dot(d, nrm);
    return std::abs(u) < disk_rooms::half_chord(j) && v > 0.0 && v < disk_rooms::extrusion(j, 3.0);
}

}  // namespace

// ---------------------------------------------------------------------------
// catalog helpers

namespace rooms {
double x(int j) { return 1.0 - std::ldexp(1.0, -j); }
double xPrime(int j) { return j == 0 ? 0.0 : x(j) + std::ldexp(1.0, -(j + 2)); }
Box room(int j) { return Box{{xPrime(j), 0.0}, {x(j + 1), 1.0}}; }
Box hall(int j) { return Box{{x(j), 0.0}, {xPrime(j), hall_height(j)}}; }
double hall_height(int j) {
    double f = 1.0;
    for (int i = 2; i <= j + 1; ++i) f *= i;
    return 1.0 / f;
}
}  // namespace rooms

namespace disk_rooms {
double theta(int j) { return (1.0 - std::ldexp(1.0, 1 - j)) * std::numbers::pi; }
double half_chord(int j) { return std::sin(std::ldexp(std::numbers::pi, -(j + 1))); }
double extrusion(int j, double outerRadius) {
    const double a = half_chord(j);
    return std::sqrt(outerRadius * outerRadius - a * a) - std::cos(std::ldexp(std::numbers::pi, -(j + 1)));
}
std::array<Point, 4> rectangle(int j, double outerRadius) {
    const double tc = 0.5 * (theta(j) + theta(j + 1));
    const Point nrm{std::cos(tc), std::sin(tc)};
    const Point zj{std::cos(theta(j)), std::sin(theta(j))};
    const Point zn{std::cos(theta(j + 1)), std::sin(theta(j + 1))};
    const double t = extrusion(j, outerRadius);
    return {zj, zn, zn + t * nrm, zj + t * nrm};
}
}  // namespace disk_rooms

namespace block {
int generation(int m) {
    if (m < 1) throw InvalidArgument("block index m must be >= 1");
    return std::bit_width(static_cast<unsigned>(m)) - 1;
}
double edge(int m) { return std::pow(3.0, -generation(m)); }
Box box(int n, int m) {
    if (m == 1) return cube_box(n, 0.0, 1.0);
    const int g = generation(m);
    const double e = edge(m);
    double base = 1.0;
    for (int i = 1; i < g; ++i) base += std::pow(2.0 / 3.0, i);
    const int k = m - (1 << g);
    Box b = cube_box(n, 0.5 - 0.5 * e, 0.5 + 0.5 * e);
    b.lo[n - 1] = base + k * e;
    b.hi[n - 1] = base + (k + 1) * e;
    return b;
}
}  // namespace block

// ---------------------------------------------------------------------------
// DomainSpec

int DomainSpec::dim() const {
    return std::visit(overloaded{
                          [](const UnitCube& s) { return s.n; },
                          [](const Ball& s) { return s.n; },
                          [](const Cusp& s) { return s.n; },
                          [](const RoomsAndHalls&) { return 2; },
                          [](const DiskAndRooms&) { return 2; },
                          [](const BlockTower& s) { return s.n; },
                          [](const BoxUnion& s) { return s.boxes.empty() ? 0 : s.boxes.front().dim(); },
                          [](const UnionOf& s) { return s.members.empty() ? 0 : s.members.front().spec.dim(); },
                      },
                      shape);
}

std::string DomainSpec::kind() const {
    return std::visit(overloaded{
                          [](const UnitCube&) { return std::string("unitcube"); },
                          [](const Ball&) { return std::string("ball"); },
                          [](const Cusp&) { return std::string("cusp"); },
                          [](const RoomsAndHalls&) { return std::string("rooms"); },
                          [](const DiskAndRooms&) { return std::string("diskrooms"); },
                          [](const BlockTower&) { return std::string("blocks"); },
                          [](const BoxUnion&) { return std::string("boxes"); },
                          [](const UnionOf&) { return std::string("union"); },
                      },
                      shape);
}

std::string DomainSpec::id() const {
    std::ostringstream os;
    os << kind() << '(';
    std::visit(overloaded{
                   [&](const UnitCube& s) { os << "n=" << s.n; },
                   [&](const Ball& s) { os << "n=" << s.n << ",r=" << format_real(s.radius); },
                   [&](const Cusp& s) {
                       os << "alpha=" << format_real(s.alpha) << ",n=" << s.n;
                       if (s.tipCut > 0) os << ",cut=" << format_real(s.tipCut);
                   },
                   [&](const RoomsAndHalls& s) { os << "jmax=" << s.jMax; },
                   [&](const DiskAndRooms& s) { os << "jmax=" << s.jMax; },
                   [&](const BlockTower& s) { os << "n=" << s.n << ",mmax=" << s.mMax; },
                   [&](const BoxUnion& s) { os << "count=" << s.boxes.size(); },
                   [&](const UnionOf& s) {
                       for (std::size_t i = 0; i < s.members.size(); ++i) os << (i ? "+" : "") << s.members[i].spec.id();
                   },
               },
               shape);
    os << ')';
    return os.str();
}

void validate(const DomainSpec& spec) {
    auto dimOk = [](int n) { return n == 2 || n == 3; };
    std::visit(overloaded{
                   [&](const UnitCube& s) {
                       if (!dimOk(s.n)) throw InvalidArgument("UnitCube: n must be 2 or 3");
                   },
                   [&](const Ball& s) {
                       if (!dimOk(s.n) || s.center.n != s.n) throw InvalidArgument("Ball: n must be 2 or 3");
                       if (!(s.radius > 0)) throw InvalidArgument("Ball: radius must be positive");
                   },
                   [&](const Cusp& s) {
                       if (!dimOk(s.n)) throw InvalidArgument("Cusp: n must be 2 or 3");
                       if (!(s.alpha > 1.0)) throw InvalidArgument("Cusp: alpha must be > 1");
                       if (!(s.tipCut >= 0.0 && s.tipCut < 1.0)) throw InvalidArgument("Cusp: tipCut in [0,1)");
                   },
                   [&](const RoomsAndHalls& s) {
                       if (s.jMax < 1 || s.jMax > 40) throw InvalidArgument("RoomsAndHalls: jMax in [1,40]");
                   },
                   [&](const DiskAndRooms& s) {
                       if (s.jMax < 1 || s.jMax > 40) throw InvalidArgument("DiskAndRooms: jMax in [1,40]");
                   },
                   [&](const BlockTower& s) {
                       if (!dimOk(s.n)) throw InvalidArgument("BlockTower: n must be 2 or 3");
                       if (s.mMax < 1 || s.mMax > (1 << 20)) throw InvalidArgument("BlockTower: mMax in [1,2^20]");
                   },
                   [&](const BoxUnion& s) {
                       if (s.boxes.empty()) throw InvalidArgument("BoxUnion: no boxes");
                       const int n = s.boxes.front().dim();
                       if (!dimOk(n)) throw InvalidArgument("BoxUnion: n must be 2 or 3");
                       for (const Box& b : s.boxes) {
                           if (b.dim() != n || b.hi.n != n) throw InvalidArgument("BoxUnion: mixed dimensions");
                           if (!(b.min_extent() > 0)) throw InvalidArgument("BoxUnion: degenerate box");
                       }
                   },
                   [&](const UnionOf& s) {
                       if (s.members.empty()) throw InvalidArgument("UnionOf: no members");
                       const int n = s.members.front().spec.dim();
                       for (const auto& m : s.members) {
                           validate(m.spec);
                           if (m.spec.dim() != n || m.offset.n != n) throw InvalidArgument("UnionOf: mixed dimensions");
                       }
                   },
               },
               spec.shape);
}

bool contains(const DomainSpec& spec, const Point& z) {
    require_dim(spec, z);
    return std::visit(overloaded{
                          [&](const UnitCube& s) {
                              for (int i = 0; i < s.n; ++i)
                                  if (!(z[i] > 0.0 && z[i] < 1.0)) return false;
                              return true;
                          },
                          [&](const Ball& s) { return distance(z, s.center) < s.radius; },
                          [&](const Cusp& s) {
                              const double x = z[0];
                              return x > s.tipCut && x > 0.0 && x < 1.0 && radial(z) < std::pow(x, s.alpha);
                          },
                          [&](const RoomsAndHalls& s) { return rooms_contains(s, z); },
                          [&](const DiskAndRooms& s) {
                              if (dot(z, z) < 1.0) return true;
                              for (int j = 1; j <= s.jMax; ++j)
                                  if (disk_room_contains(j, z)) return true;
                              return false;
                          },
                          [&](const BlockTower& s) { return box_union_interior(tower_candidates(s, z), z); },
                          [&](const BoxUnion& s) { return box_union_interior(s.boxes, z); },
                          [&](const UnionOf& s) {
                              for (const auto& m : s.members)
                                  if (contains(m.spec, z - m.offset)) return true;
                              return false;
                          },
                      },
                      spec.shape);
}

Box bounding_box(const DomainSpec& spec) {
    return std::visit(overloaded{
                          [](const UnitCube& s) { return cube_box(s.n, 0.0, 1.0); },
                          [](const Ball& s) {
                              Box b{s.center, s.center};
                              for (int i = 0; i < s.n; ++i) {
                                  b.lo[i] -= s.radius;
                                  b.hi[i] += s.radius;
                              }
                              return b;
                          },
                          [](const Cusp& s) {
                              Box b = cube_box(s.n, -1.0, 1.0);
                              b.lo[0] = s.tipCut;
                              b.hi[0] = 1.0;
                              return b;
                          },
                          [](const RoomsAndHalls& s) {
                              const double w = rooms::x(s.jMax + 1);
                              return Box{{-w, 0.0}, {w, 1.0}};
                          },
                          [](const DiskAndRooms& s) {
                              Box b{{-1.0, -1.0}, {1.0, 1.0}};
                              for (int j = 1; j <= s.jMax; ++j)
                                  for (const Point& v : disk_rooms::rectangle(j, 3.0)) b.expand(Box{v, v});
                              return b;
                          },
                          [](const BlockTower& s) {
                              auto boxes = tower_boxes(s);
                              Box b = boxes.front();
                              for (const Box& x : boxes) b.expand(x);
                              return b;
                          },
                          [](const BoxUnion& s) {
                              Box b = s.boxes.front();
                              for (const Box& x : s.boxes) b.expand(x);
                              return b;
                          },
                          [](const UnionOf& s) {
                              Box b = bounding_box(s.members.front().spec);
                              b.lo = b.lo + s.members.front().offset;
                              b.hi = b.hi + s.members.front().offset;
                              for (const auto& m : s.members) {
                                  Box x = bounding_box(m.spec);
                                  x.lo = x.lo + m.offset;
                                  x.hi = x.hi + m.offset;
                                  b.expand(x);
                              }
                              return b;
                          },
                      },
                      spec.shape);
}

std::optional<double> analytic_distance(const DomainSpec& spec, const Point& z) {
    require_dim(spec, z);
    return std::visit(overloaded{
                          [&](const UnitCube& s) -> std::optional<double> {
                              return cube_box(s.n, 0.0, 1.0).interior_distance(z);
                          },
                          [&](const Ball& s) -> std::optional<double> { return s.radius - distance(z, s.center); },
                          [&](const Cusp& s) -> std::optional<double> {
                              // Vertical gap to the graph r = x^alpha, plus the flat ends.
                              const double x = z[0];
                              double d = std::min(std::pow(x, s.alpha) - radial(z), 1.0 - x);
                              d = std::min(d, x - s.tipCut);
                              return d;
                          },
                          [&](const BoxUnion& s) -> std::optional<double> {
                              if (s.boxes.size() != 1) return std::nullopt;
                              return s.boxes.front().interior_distance(z);
                          },
                          [&](const auto&) -> std::optional<double> { return std::nullopt; },
                      },
                      spec.shape);
}

TruncationResult truncation_policy(const DomainSpec& spec, double h) {
    if (!(h > 0)) throw InvalidArgument("truncation_policy: h must be positive");
    const double minSize = 2.0 * h;
    TruncationResult out{spec, false, 0.0, ""};
    std::ostringstream note;
    std::visit(overloaded{
                   [&](const Cusp& s) {
                       // Width 2 x^alpha falls below 2h for x < h^(1/alpha).
                       const double cut = std::pow(h, 1.0 / s.alpha);
                       if (cut > s.tipCut) {
                           Cusp e = s;
                           e.tipCut = cut;
                           out.effective = e;
                           out.changed = true;
                           const double p = s.alpha * (s.n - 1) + 1.0;
                           out.droppedMeasureBound = unit_ball_volume(s.n - 1) * std::pow(cut, p) / p;
                           note << "cusp tip x<" << format_real(cut) << " dropped";
                       }
                   },
                   [&](const RoomsAndHalls& s) {
                       int keep = 0;
                       for (int j = 1; j <= s.jMax; ++j) {
                           const double width = std::ldexp(1.0, -(j + 2));
                           if (width < minSize || rooms::hall_height(j) < minSize) break;
                           keep = j;
                       }
                       if (keep < s.jMax) {
                           out.effective = RoomsAndHalls{keep};
                           out.changed = true;
                           for (int j = keep + 1; j <= s.jMax; ++j)
                               out.droppedMeasureBound += 2.0 * (rooms::room(j).volume() + rooms::hall(j).volume());
                           note << "rooms/halls j>" << keep << " dropped";
                       }
                   },
                   [&](const DiskAndRooms& s) {
                       int keep = 0;
                       for (int j = 1; j <= s.jMax; ++j) {
                           const double smallest =
                               std::min(2.0 * disk_rooms::half_chord(j), disk_rooms::extrusion(j, 3.0));
                           if (smallest < minSize) break;
                           keep = j;
                       }
                       if (keep < s.jMax) {
                           out.effective = DiskAndRooms{keep};
                           out.changed = true;
                           for (int j = keep + 1; j <= s.jMax; ++j)
                               out.droppedMeasureBound +=
                                   2.0 * disk_rooms::half_chord(j) * disk_rooms::extrusion(j, 3.0);
                           note << "disk rooms j>" << keep << " dropped";
                       }
                   },
                   [&](const BlockTower& s) {
                       int keep = 0;
                       for (int m = 1; m <= s.mMax; ++m) {
                           if (block::edge(m) < minSize) break;
                           keep = m;
                       }
                       if (keep < s.mMax) {
                           out.effective = BlockTower{s.n, keep};
                           out.changed = true;
                           for (int m = keep + 1; m <= s.mMax; ++m)
                               out.droppedMeasureBound += std::pow(block::edge(m), s.n);
                           note << "blocks m>" << keep << " dropped";
                       }
                   },
                   [&](const UnionOf& s) {
                       UnionOf e;
                       for (const auto& m : s.members) {
                           auto r = truncation_policy(m.spec, h);
                           out.changed = out.changed || r.changed;
                           out.droppedMeasureBound += r.droppedMeasureBound;
                           if (r.changed) note << r.note << "; ";
                           e.members.push_back({r.effective, m.offset});
                       }
                       out.effective = e;
                   },
                   [&](const auto&) {},
               },
               spec.shape);
    out.note = out.changed ? note.str() : "unchanged";
    return out;
}

std::optional<double> truncation_depth(const DomainSpec& spec) {
    return std::visit(overloaded{
                          [](const Cusp& s) -> std::optional<double> { return s.tipCut; },
                          [](const RoomsAndHalls& s) -> std::optional<double> { return s.jMax; },
                          [](const DiskAndRooms& s) -> std::optional<double> { return s.jMax; },
                          [](const BlockTower& s) -> std::optional<double> { return s.mMax; },
                          [](const auto&) -> std::optional<double> { return std::nullopt; },
                      },
                      spec.shape);
}

DomainSpec with_truncation(const DomainSpec& spec, double depth) {
    return std::visit(overloaded{
                          [&](Cusp s) -> DomainSpec {
                              s.tipCut = depth;
                              return s;
                          },
                          [&](RoomsAndHalls s) -> DomainSpec {
                              s.jMax = static_cast<int>(std::lround(depth));
                              return s;
                          },
                          [&](DiskAndRooms s) -> DomainSpec {
                              s.jMax = static_cast<int>(std::lround(depth));
                              return s;
                          },
                          [&](BlockTower s) -> DomainSpec {
                              s.mMax = static_cast<int>(std::lround(depth));
                              return s;
                          },
                          [&](const auto& s) -> DomainSpec { return s; },
                      },
                      spec.shape);
}

bool deeper(const DomainSpec& spec, double a, double b) {
    return std::holds_alternative<Cusp>(spec.shape) ? b < a : b > a;
}

// ---------------------------------------------------------------------------
// text form

std::string format_real(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_real(const std::string& text) {
    auto parse_one = [&](std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
        if (!s.empty() && s.front() == '+') s.remove_prefix(1);
        double v = 0.0;
        auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
            throw InvalidArgument("not a number: '" + text + "'");
        return v;
    };
    const auto slash = text.find('/');
    if (slash == std::string::npos) return parse_one(text);
    const double den = parse_one(std::string_view(text).substr(slash + 1));
    if (den == 0.0) throw InvalidArgument("zero denominator in '" + text + "'");
    return parse_one(std::string_view(text).substr(0, slash)) / den;
}

Point parse_point(const std::string& text) {
    Point p(0);
    std::size_t start = 0;
    while (true) {
        const auto comma = text.find(',', start);
        const std::string part = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        if (p.n >= kMaxDim) throw InvalidArgument("point has more than 3 coordinates: '" + text + "'");
        p[p.n] = parse_real(part);
        ++p.n;
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return p;
}

namespace {

std::string point_text(const Point& p) {
    std::string s;
    for (int i = 0; i < p.n; ++i) {
        if (i) s += ',';
        s += format_real(p[i]);
    }
    return s;
}

const std::string& get(const std::map<std::string, std::string>& kv, const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw InvalidArgument("missing key '" + key + "'");
    return it->second;
}

std::string get_or(const std::map<std::string, std::string>& kv, const std::string& key, const std::string& dflt) {
    auto it = kv.find(key);
    return it == kv.end() ? dflt : it->second;
}

int parse_int(const std::string& s) {
    const double v = parse_real(s);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw InvalidArgument("not an integer: '" + s + "'");
    return static_cast<int>(v);
}

}  // namespace

std::map<std::string, std::string> to_kv(const DomainSpec& spec) {
    std::map<std::string, std::string> kv;
    kv["kind"] = spec.kind();
    std::visit(overloaded{
                   [&](const UnitCube& s) { kv["n"] = std::to_string(s.n); },
                   [&](const Ball& s) {
                       kv["n"] = std::to_string(s.n);
                       kv["center"] = point_text(s.center);
                       kv["radius"] = format_real(s.radius);
                   },
                   [&](const Cusp& s) {
                       kv["alpha"] = format_real(s.alpha);
                       kv["n"] = std::to_string(s.n);
                       kv["tipcut"] = format_real(s.tipCut);
                   },
                   [&](const RoomsAndHalls& s) { kv["jmax"] = std::to_string(s.jMax); },
                   [&](const DiskAndRooms& s) { kv["jmax"] = std::to_string(s.jMax); },
                   [&](const BlockTower& s) {
                       kv["n"] = std::to_string(s.n);
                       kv["mmax"] = std::to_string(s.mMax);
                   },
                   [&](const BoxUnion& s) {
                       std::string text;
                       for (std::size_t i = 0; i < s.boxes.size(); ++i) {
                           if (i) text += ';';
                           text += point_text(s.boxes[i].lo) + ":" + point_text(s.boxes[i].hi);
                       }
                       kv["boxes"] = text;
                   },
                   [&](const UnionOf& s) {
                       kv["members"] = std::to_string(s.members.size());
                       for (std::size_t i = 0; i < s.members.size(); ++i) {
                           const std::string pre = "m" + std::to_string(i) + ".";
                           for (const auto& [k, v] : to_kv(s.members[i].spec)) kv[pre + k] = v;
                           kv[pre + "offset"] = point_text(s.members[i].offset);
                       }
                   },
               },
               spec.shape);
    return kv;
}

DomainSpec from_kv(const std::map<std::string, std::string>& kv, const std::string& prefix) {
    auto key = [&](const std::string& k) { return prefix + k; };
    const std::string kind = get(kv, key("kind"));
    DomainSpec spec;
    if (kind == "unitcube") {
        spec = UnitCube{parse_int(get_or(kv, key("n"), "2"))};
    } else if (kind == "ball") {
        Ball b;
        b.n = parse_int(get_or(kv, key("n"), "2"));
        b.center = parse_point(get_or(kv, key("center"), b.n == 2 ? "0,0" : "0,0,0"));
        b.radius = parse_real(get_or(kv, key("radius"), "1"));
        spec = b;
    } else if (kind == "cusp") {
        spec = Cusp{parse_real(get(kv, key("alpha"))), parse_int(get_or(kv, key("n"), "2")),
                    parse_real(get_or(kv, key("tipcut"), "0"))};
    } else if (kind == "rooms") {
        spec = RoomsAndHalls{parse_int(get_or(kv, key("jmax"), "8"))};
    } else if (kind == "diskrooms") {
        spec = DiskAndRooms{parse_int(get_or(kv, key("jmax"), "8"))};
    } else if (kind == "blocks") {
        spec = BlockTower{parse_int(get_or(kv, key("n"), "2")), parse_int(get_or(kv, key("mmax"), "7"))};
    } else if (kind == "boxes") {
        BoxUnion u;
        const std::string text = get(kv, key("boxes"));
        std::size_t start = 0;
        while (start <= text.size()) {
            const auto semi = text.find(';', start);
            const std::string part = text.substr(start, semi == std::string::npos ? std::string::npos : semi - start);
            const auto colon = part.find(':');
            if (colon == std::string::npos) throw InvalidArgument("box must be 'lo:hi', got '" + part + "'");
            u.boxes.push_back(Box{parse_point(part.substr(0, colon)), parse_point(part.substr(colon + 1))});
            if (semi == std::string::npos) break;
            start = semi + 1;
        }
        spec = u;
    } else if (kind == "union") {
        UnionOf u;
        const int count = parse_int(get(kv, key("members")));
        for (int i = 0; i < count; ++i) {
            const std::string pre = key("m" + std::to_string(i) + ".");
            DomainSpec member = from_kv(kv, pre);
            Point offset = Point(member.dim());
            auto it = kv.find(pre + "offset");
            if (it != kv.end()) offset = parse_point(it->second);
            u.members.push_back({member, offset});
        }
        spec = u;
    } else {
        throw InvalidArgument("unknown spec kind '" + kind + "'");
    }
    validate(spec);
    return spec;
}

std::string to_text(const DomainSpec& spec) {
    std::string out;
    for (const auto& [k, v] : to_kv(spec)) out += k + " = " + v + "\n";
    return out;
}

DomainSpec from_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return std::string();
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw InvalidArgument("expected 'key = value', got '" + line + "'");
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return from_kv(kv);
}

}  // namespace lsavg
