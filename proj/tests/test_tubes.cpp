#include "doctest.h"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "lsavg/ls_integrals.hpp"
#include "lsavg/tubes.hpp"

using namespace lsavg;

namespace {

// c V_{n-1} r^{n-1} integral_0^{l/2} (x/r)^s dx, by adaptive Gauss-Kronrod.
double quadrature_bound(int n, double s, double c, double r, double l) {
    const double v = n == 2 ? 2.0 : std::numbers::pi;
    auto f = [&](double x) { return std::pow(x / r, s); };
    const double I = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, l / 2, 15, 1e-15);
    return c * v * std::pow(r, n - 1) * I;
}

Tube make_tube(int n, double c, double r, double l) {
    Tube t;
    t.endA = Point(n);
    t.axis = Point(n);
    t.axis[0] = 1.0;
    t.c = c;
    t.r = r;
    t.l = l;
    return t;
}

}  // namespace

TEST_CASE("tube lower bound closed form") {
    CHECK(tube_lower_bound(make_tube(2, 1.0, 1.0, 4.0), 1.0, 2) == doctest::Approx(4.0).epsilon(1e-14));
    for (double r : {0.1, 0.5, 2.0})
        CHECK(tube_lower_bound(make_tube(2, 1.0, r, r), 1.0, 2) == doctest::Approx(r * r / 4).epsilon(1e-14));
    const double full = tube_lower_bound(make_tube(3, 1.0, 0.3, 2.0), 2.5, 3);
    for (double c : {0.5, 0.1, 1e-6})
        CHECK(tube_lower_bound(make_tube(3, c, 0.3, 2.0), 2.5, 3) == doctest::Approx(c * full).epsilon(1e-14));
    CHECK_THROWS_AS(tube_lower_bound(make_tube(2, 1.0, 1.0, 1.0), 0.5, 2), InvalidArgument);
}

TEST_CASE("tube lower bound agrees with quadrature to 10 digits") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const int n = 2 + static_cast<int>(rng() % 2);
        const double s = 1.0 + 4.0 * U(rng), c = 0.05 + 0.95 * U(rng), r = 0.01 + U(rng), l = 0.05 + 3 * U(rng);
        const double mine = tube_lower_bound(make_tube(n, c, r, l), s, n);
        const double oracle = quadrature_bound(n, s, c, r, l);
        CHECK(std::abs(mine - oracle) <= 1e-10 * std::abs(oracle));
    }
}

TEST_CASE("rooms and halls terms are 1/16 at s = 1") {
    const SeriesReport rep = family_series(rooms_halls_tubes(16), 1.0, 16);
    REQUIRE(rep.terms.size() == 16);
    for (double t : rep.terms) CHECK(std::abs(t - 0.0625) <= 1e-12 * 0.0625);
    CHECK(std::abs(rep.partialSums.back() - 1.0) <= 1e-12);
    CHECK(rep.classification == SeriesClass::Diverges);
    // (1/4^(s+1)) (2^(s-1))^(j+3)
    const SeriesReport s2 = family_series(rooms_halls_tubes(8), 2.0, 8);
    for (std::size_t i = 0; i < s2.terms.size(); ++i)
        CHECK(s2.terms[i] == doctest::Approx(std::pow(2.0, i + 4.0) / 64.0).epsilon(1e-12));
}

TEST_CASE("cusp term ratio") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        const double alpha = 1.1 + 2.9 * U(rng), s = 1.0 + 4.0 * U(rng);
        const int n = 2 + static_cast<int>(rng() % 2);
        const SeriesReport rep = family_series(cusp_tubes(alpha, n, 12), s, 12);
        const double expected = std::pow(2.0, (alpha - 1) * (s - n + 1) - n);
        for (double r : rep.ratios) CHECK(std::abs(r - expected) <= 1e-12 * expected);
    }
    CHECK(family_series(cusp_tubes(3.0, 2, 12), 3.0, 12).classification == SeriesClass::Diverges);
    CHECK(family_series(cusp_tubes(3.0, 2, 12), 1.0, 12).classification == SeriesClass::Converges);
}

TEST_CASE("block tube ratio 2^(s+1)/3^n") {
    const SeriesReport s1 = family_series(block_tubes(2, 12), 1.0, 12);
    for (double r : s1.ratios) CHECK(r == doctest::Approx(4.0 / 9.0).epsilon(1e-12));
    CHECK(s1.classification == SeriesClass::Converges);
    const SeriesReport s3 = family_series(block_tubes(2, 12), 3.0, 12);
    for (double r : s3.ratios) CHECK(r == doctest::Approx(16.0 / 9.0).epsilon(1e-12));
    CHECK(s3.classification == SeriesClass::Diverges);
}

TEST_CASE("disk and rooms surrogate terms") {
    for (int j = 1; j < 10; ++j) CHECK(disk_rooms_surrogate_term(j, 1.0) == 1.0);
    for (const Tube& t : disk_rooms_tubes(8).tubes) {
        CHECK(t.r < std::numbers::pi * std::pow(2.0, -(t.index + 1)));
        CHECK(t.l > 1.0);
    }
}

TEST_CASE("series classification") {
    CHECK(classify_series({1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1}) == SeriesClass::Diverges);
    CHECK(classify_series({1, 0.5, 0.25, 0.125, 0.0625}) == SeriesClass::Converges);
    std::vector<double> slow;
    for (int i = 0; i < 30; ++i) slow.push_back(std::pow(0.995, i));
    CHECK(classify_series(slow) == SeriesClass::Inconclusive);
    const SeriesReport rep = make_series("x", 1.0, 2, {1, 2, 3});
    CHECK(rep.partialSums == std::vector<double>{1, 3, 6});
}

TEST_CASE("classification is invariant under rescaling the tubes") {
    for (double lambda : {0.1, 7.0}) {
        TubeFamily fam = cusp_tubes(3.0, 2, 12);
        const SeriesReport base = family_series(fam, 2.5, 12);
        for (Tube& t : fam.tubes) {
            t.endA = lambda * t.endA;
            t.l *= lambda;
            t.r *= lambda;
        }
        const SeriesReport scaled = family_series(fam, 2.5, 12);
        CHECK(scaled.classification == base.classification);
        CHECK(scaled.terms[3] == doctest::Approx(lambda * lambda * base.terms[3]).epsilon(1e-12));
    }
}

TEST_CASE("rooms tubes are essential with c = 1") {
    const DomainSpec rh = RoomsAndHalls{6};
    for (const Tube& t : rooms_halls_tubes(6).tubes) {
        const VerifyResult v = verify_essential(rh, t);
        CHECK(v.ok);
        CHECK(v.wallClear);
        CHECK(v.cHat >= 0.95);
    }
}

TEST_CASE("cusp tube slice fraction") {
    const DomainSpec cusp = Cusp{2.0, 2, 0.0};
    for (const Tube& t : cusp_tubes(2.0, 2, 4).tubes) {
        const VerifyResult v = verify_essential(cusp, t);
        CHECK(v.ok);
        const double a = t.endA[0], b = a + t.l;
        CHECK(v.cHat >= std::pow(a / b, 2.0 * 2) * 0.95);
    }
}

TEST_CASE("tube outside the domain is an error") {
    Tube t = make_tube(2, 1.0, 0.1, 0.5);
    t.endA = Point{5.0, 5.0};
    CHECK_THROWS_AS(verify_essential(UnitCube{2}, t), InvalidArgument);
    Tube invalid = make_tube(2, 1.5, 0.1, 0.5);
    CHECK_THROWS_AS(invalid.validate(), InvalidArgument);
}

TEST_CASE("a tube cutting through the interior is not essential") {
    Tube t = make_tube(2, 1.0, 0.2, 0.5);
    t.endA = Point{0.25, 0.5};
    const VerifyResult v = verify_essential(UnitCube{2}, t);
    CHECK_FALSE(v.wallClear);
    CHECK_FALSE(v.ok);
}

TEST_CASE("certificates") {
    for (double s : {1.0, 2.0, 4.0}) {
        const Certificate c = certify_not_averaging(RoomsAndHalls{12}, rooms_halls_tubes(12), s);
        CHECK(c.issued);
        CHECK(c.series.classification == SeriesClass::Diverges);
    }
    const Certificate refused = certify_not_averaging(Cusp{3.0, 2, 0.0}, cusp_tubes(3.0, 2, 10), 1.0);
    CHECK_FALSE(refused.issued);
    CHECK_FALSE(refused.reason.empty());
    const Certificate disk = certify_not_averaging(DiskAndRooms{20}, disk_rooms_tubes(20), 1.0);
    CHECK(disk.issued);
    std::ostringstream os;
    write_certificate(os, disk);
    CHECK(os.str().find("diverges") != std::string::npos);
}

TEST_CASE("integral over tube components dominates the lower bound") {
    const double h = 1.0 / 256, s = 1.0;
    const DomainSpec rh = RoomsAndHalls{4};
    const RasterPtr r = rasterize(rh, h);
    const QhField f = solve(r, Point{0.0, 0.5});
    for (const Tube& t : rooms_halls_tubes(3).tubes) {
        const VerifyResult v = verify_essential(rh, t);
        REQUIRE(v.ok);
        std::vector<std::uint8_t> region(r->mask.size(), 0);
        for (std::size_t c = 0; c < region.size(); ++c)
            region[c] = r->inside(c) && v.component.in_component(r->frame.center(c));
        const double raw = ls_integral(f, s, std::nullopt, &region).raw;
        CHECK(raw >= 0.9 * tube_lower_bound(t, s, 2));
    }
}
