#include "doctest.h"

#include <cmath>
#include <sstream>

#include "lsavg/ls_integrals.hpp"

using namespace lsavg;

TEST_CASE("zero field integrates to zero") {
    const RasterPtr r = rasterize(UnitCube{2}, 0.25);
    QhField f = solve(r, Point{0.5, 0.5});
    for (std::size_t c = 0; c < f.k.size(); ++c)
        if (f.reachable(c)) f.k[c] = 0.0;
    const LsValue v = ls_integral(f, 2.0);
    CHECK(v.raw == 0.0);
    CHECK(v.normalized == 0.0);
    CHECK_THROWS_AS(ls_integral(f, 0.0), InvalidArgument);
}

TEST_CASE("raw integral equals a direct sum") {
    const RasterPtr r = rasterize(Cusp{2.0, 2, 0.0}, 1.0 / 64);
    const QhField f = solve(r, Point{0.8, 0.0});
    for (double s : {0.5, 1.0, 2.5}) {
        double raw = 0.0, mass = 0.0;
        for (std::size_t c = 0; c < r->mask.size(); ++c) {
            if (!r->inside(c)) continue;
            mass += r->h() * r->h();
            raw += std::pow(f.k[c], s) * r->h() * r->h();
        }
        const LsValue v = ls_integral(f, s);
        CHECK(v.raw == doctest::Approx(raw).epsilon(1e-12));
        CHECK(v.mass == doctest::Approx(r->volumeEstimate).epsilon(1e-12));
        CHECK(v.normalized == doctest::Approx(std::pow(raw / mass, 1.0 / s)).epsilon(1e-12));
    }
}

TEST_CASE("unreachable cells are excluded and counted") {
    BoxUnion two;
    two.boxes.push_back(Box{{0.0, 0.0}, {1.0, 1.0}});
    two.boxes.push_back(Box{{2.0, 0.0}, {3.0, 1.0}});
    const RasterPtr r = rasterize(two, 1.0 / 16);
    const LsValue v = ls_integral(solve(r, Point{0.5, 0.5}), 1.0);
    CHECK(v.unreachable * 2 == v.cells);
    CHECK(std::isfinite(v.normalized));
}

TEST_CASE("raw is log-convex in s") {
    const QhField f = solve(rasterize(RoomsAndHalls{3}, 1.0 / 64), Point{0.1, 0.5});
    for (double s : {1.0, 1.5, 2.0, 3.0}) {
        const double a = ls_integral(f, s - 0.5).raw, b = ls_integral(f, s).raw, c = ls_integral(f, s + 0.5).raw;
        CHECK(b * b <= a * c * (1 + 1e-12));
        CHECK(2 * b <= a + c);
    }
}

TEST_CASE("unit square normalized value is refinement stable") {
    const double a = ls_integral(solve(rasterize(UnitCube{2}, 1.0 / 128), Point{0.5, 0.5}), 1.0).normalized;
    const double b = ls_integral(solve(rasterize(UnitCube{2}, 1.0 / 256), Point{0.5, 0.5}), 1.0).normalized;
    CHECK(std::isfinite(b));
    CHECK(std::abs(a - b) / b < 0.02);
}

TEST_CASE("increment classification") {
    std::vector<double> geometric{1.0}, linear{1.0};
    for (int i = 1; i < 6; ++i) {
        geometric.push_back(geometric.back() + std::pow(0.5, i));
        linear.push_back(linear.back() + 1.0);
    }
    CHECK(classify_increments(geometric) == Trend::Saturating);
    CHECK(classify_increments(linear) == Trend::Growing);
    CHECK(classify_increments({1.0, 2.0}) == Trend::Inconclusive);
    std::vector<double> inc, ratios;
    double slope = 0.0;
    CHECK(classify_increments({1.0, 1.0, 1.0, 1.0}, &inc, &ratios, &slope) == Trend::Saturating);
    CHECK(ratios == std::vector<double>{0.0, 0.0});
    classify_increments({1.0, 1.0, 2.0}, nullptr, &ratios);
    CHECK(std::isinf(ratios[0]));
    std::vector<double> mixed{0.0, 1.0, 1.9, 2.8, 3.6};  // ratios 0.9, 1.0, 0.89
    CHECK(classify_increments(mixed) == Trend::Inconclusive);
    classify_increments(geometric, nullptr, nullptr, &slope);
    CHECK(slope == doctest::Approx(std::log(0.5)));
}

TEST_CASE("unit cube sweep saturates") {
    const IntegralReport rep = refinement_sweep(UnitCube{2}, Point{0.5, 0.5}, 2.0, {1.0 / 32, 1.0 / 64}, {1, 2, 3, 4});
    CHECK(rep.classification == Trend::Saturating);
    CHECK(rep.rule.find("0.8") != std::string::npos);
}

TEST_CASE("cusp sweep separates s = 1.5 and s = 2.5") {
    const std::vector<double> trunc{0.55, 0.4125, 0.309375, 0.23203125, 0.1740234375};
    const auto reps = refinement_sweep(Cusp{3.0, 2, 0.0}, Point{0.8, 0.0}, {1.5, 2.5, 3.0}, {1.0 / 64, 1.0 / 128},
                                       trunc);
    CHECK(reps[0].classification == Trend::Saturating);
    CHECK(reps[1].classification == Trend::Growing);
    // raw is nondecreasing along the truncation axis at fixed h
    for (const auto& rep : reps)
        for (std::size_t i = 1; i < rep.rows.size(); ++i)
            if (rep.rows[i].h == rep.rows[i - 1].h) CHECK(rep.rows[i].raw >= rep.rows[i - 1].raw);
}

TEST_CASE("block tower sweep at s = 3 grows") {
    const IntegralReport rep = refinement_sweep(BlockTower{2, 31}, Point{0.5, 0.5}, 3.0, {1.0 / 128, 1.0 / 256},
                                                {1, 3, 7, 15, 31});
    CHECK(rep.classification == Trend::Growing);
}

TEST_CASE("sweep preconditions") {
    CHECK_THROWS_AS(refinement_sweep(UnitCube{2}, Point{0.5, 0.5}, 1.0, {1.0 / 64, 1.0 / 32}, {1}), InvalidArgument);
    CHECK_THROWS_AS(refinement_sweep(Cusp{3.0, 2, 0.0}, Point{0.8, 0.0}, 1.0, {1.0 / 64}, {0.2, 0.3}),
                    InvalidArgument);
    const IntegralReport few = refinement_sweep(Cusp{3.0, 2, 0.0}, Point{0.8, 0.0}, 1.0, {1.0 / 64}, {0.5, 0.3});
    CHECK(few.classification == Trend::Inconclusive);
}

TEST_CASE("threshold scan on the cusp brackets 2") {
    const std::vector<double> trunc{0.55, 0.4125, 0.309375, 0.23203125, 0.1740234375};
    const ScanResult sr = threshold_scan(Cusp{3.0, 2, 0.0}, Point{0.8, 0.0}, {1.0, 1.5, 2.0, 2.5, 3.0},
                                         {1.0 / 64, 1.0 / 128, 1.0 / 256}, trunc);
    REQUIRE(sr.estimate.has_value());
    CHECK(*sr.largestSaturating <= 2.0);
    CHECK(*sr.smallestGrowing >= 2.0);
    // critical s = n/(alpha-1) + n - 1
    CHECK(2.0 / (1.5 - 1.0) + 2.0 - 1.0 == 5.0);
}

TEST_CASE("Poincare ratio bounds") {
    // ((j+1)! / (2^(j+2))^p)^(1/p) evaluated independently
    auto bound = [](int j, double p) {
        double f = 1.0;
        for (int i = 2; i <= j + 1; ++i) f *= i;
        return std::pow(f / std::pow(std::pow(2.0, j + 2), p), 1.0 / p);
    };
    CHECK(bound(3, 2.0) == doctest::Approx(std::sqrt(24.0 / 1024)));
    CHECK(bound(5, 2.0) == doctest::Approx(std::sqrt(720.0 / 16384)));
    for (int j = 2; j <= 5; ++j) {
        const PoincareResult r = poincare_ratio(j, 2.0, 1e-6);
        CHECK(r.lowerBound == doctest::Approx(bound(j, 2.0)).epsilon(1e-12));
        CHECK(r.ratio >= r.lowerBound * 0.99);
    }
    CHECK_THROWS_AS(poincare_ratio(6, 2.0, 1.0 / 64), InvalidArgument);
}

TEST_CASE("Poincare denominator lives on the hall only") {
    // |grad u_j| = 2^(j+2) on H_j and 0 elsewhere, on both halves.
    const PoincareResult r = poincare_ratio(3, 2.0, 1e-6);
    const double expected = std::sqrt(2.0 * std::pow(32.0, 2) * rooms::hall(3).volume());
    CHECK(r.denominator == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("report csv header") {
    const IntegralReport rep = refinement_sweep(UnitCube{2}, Point{0.5, 0.5}, 1.0, {1.0 / 16}, {1});
    std::ostringstream os;
    write_report_csv(os, {rep});
    CHECK(os.str().rfind("spec_id,s,h,truncation,raw,normalized,classification,slope,clamped\n", 0) == 0);
}
