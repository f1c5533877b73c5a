#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lsavg/geometry.hpp"

namespace lsavg {

/// Open unit cube (0,1)^n.
struct UnitCube {
    int n = 2;
};

/// Open ball; the unit disk is Ball{2, {0,0}, 1}.
struct Ball {
    int n = 2;
    Point center{0.0, 0.0};
    double radius = 1.0;
};

/// {(x, y): 0 < x < 1, |y| < x^alpha}, optionally with the tip {x <= tipCut} removed.
struct Cusp {
    double alpha = 2.0;
    int n = 2;
    double tipCut = 0.0;
};

/// Planar rooms-and-halls domain truncated after room/hall jMax.
struct RoomsAndHalls {
    int jMax = 8;
};

/// Unit disk with rooms R_1..R_jMax attached along the upper semicircle.
struct DiskAndRooms {
    int jMax = 8;
};

/// Tower of stacked cubes Omega_1..Omega_mMax; block m has edge 3^-floor(log2 m).
struct BlockTower {
    int n = 2;
    int mMax = 7;
};

/// Interior of a finite union of closed axis-aligned boxes.
struct BoxUnion {
    std::vector<Box> boxes;
};

struct DomainSpec;

struct TranslatedSpec;

/// Union of translated member domains.
struct UnionOf {
    std::vector<TranslatedSpec> members;
};

struct DomainSpec {
    using Shape =
        std::variant<UnitCube, Ball, Cusp, RoomsAndHalls, DiskAndRooms, BlockTower, BoxUnion, UnionOf>;
    Shape shape;

    DomainSpec() = default;
    template <class T>
    DomainSpec(T s) : shape(std::move(s)) {}  // NOLINT: implicit by design of the catalog

    int dim() const;
    /// Short identifier used in reports ("cusp", "rooms", ...).
    std::string kind() const;
    /// Identifier including parameters, e.g. "cusp(alpha=3,n=2)".
    std::string id() const;
};

struct TranslatedSpec {
    DomainSpec spec;
    Point offset;
};

/// Validates the catalog invariants; throws InvalidArgument on violation.
void validate(const DomainSpec& spec);

/// Exact membership test. Throws InvalidArgument on dimension mismatch.
bool contains(const DomainSpec& spec, const Point& z);

/// Finite bounding box of the domain.
Box bounding_box(const DomainSpec& spec);

/// Closed-form upper bound on d(z, boundary) for z inside the domain, when one exists.
std::optional<double> analytic_distance(const DomainSpec& spec, const Point& z);

/// Result of dropping features that a grid of spacing h cannot resolve.
struct TruncationResult {
    DomainSpec effective;
    bool changed = false;
    double droppedMeasureBound = 0.0;
    std::string note;
};

/// Drops rooms, halls, blocks and cusp tip regions whose smallest dimension is below 2h.
TruncationResult truncation_policy(const DomainSpec& spec, double h);

/// Depth parameter of the family's truncation axis: cusp tipCut, rooms/disk jMax, tower mMax.
/// Families without infinite features report nullopt.
std::optional<double> truncation_depth(const DomainSpec& spec);

/// Copy of the spec truncated at the given depth (no-op for families without features).
DomainSpec with_truncation(const DomainSpec& spec, double depth);

/// True when depth b is strictly deeper than depth a for this family.
bool deeper(const DomainSpec& spec, double a, double b);

// Geometry helpers for the catalog families.
namespace rooms {
double x(int j);       ///< x_j = 1 - 2^-j
double xPrime(int j);  ///< x'_j = x_j + 2^-(j+2), x'_0 = 0
Box room(int j);       ///< R_j (right half)
Box hall(int j);       ///< H_j (right half), j >= 1
double hall_height(int j);
}  // namespace rooms

namespace disk_rooms {
double theta(int j);
/// Vertices (z_j, z_{j+1}, outer_{j+1}, outer_j) of the rectangle extruded to radius R.
std::array<Point, 4> rectangle(int j, double outerRadius);
/// Chord half-length sin(pi 2^-(j+1)).
double half_chord(int j);
/// Radial extrusion length until the outer vertices reach radius R.
double extrusion(int j, double outerRadius);
}  // namespace disk_rooms

namespace block {
int generation(int m);  ///< floor(log2 m)
double edge(int m);     ///< 3^-generation(m)
Box box(int n, int m);
}  // namespace block

/// Plain-text key/value form of a spec. Nested members use "m<i>." prefixes.
std::map<std::string, std::string> to_kv(const DomainSpec& spec);
DomainSpec from_kv(const std::map<std::string, std::string>& kv, const std::string& prefix = "");
std::string to_text(const DomainSpec& spec);
DomainSpec from_text(const std::string& text);

/// Parses "a", "a/b" or scientific notation.
double parse_real(const std::string& text);
Point parse_point(const std::string& text);
std::string format_real(double v);

}  // namespace lsavg
