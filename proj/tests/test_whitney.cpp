#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>

#include "lsavg/qh_solver.hpp"
#include "lsavg/whitney.hpp"

using namespace lsavg;

TEST_CASE("edge counts: closed form against recurrence") {
    for (int j = 0; j <= 30; ++j) CHECK(cube_edge_count(j) == cube_edge_count_recurrence(j));
    CHECK(cube_edge_count(2) == 17);
    CHECK(cube_edge_count(0) == 1);
}

TEST_CASE("cube layers") {
    const auto layers = cube_subdivision(2, 4);
    CHECK(layers[1].delta == doctest::Approx(1.0 / 12));
    CHECK(layers[1].ringCount == 16);
    CHECK(layers[1].nuBound == 24);
    for (const auto& L : layers) {
        if (L.ringCount > 0) CHECK(static_cast<double>(L.ringCount) <= L.nuBound);
        CHECK(L.measure <= L.measureBound + 1e-15);
        CHECK(L.side == doctest::Approx(0.5 * std::pow(3.0, -L.j)));
    }
    double total = 0.0;
    for (const auto& L : cube_subdivision(3, 6)) total += L.measure;
    CHECK(total == doctest::Approx(std::pow(1.0 - 0.5 * std::pow(3.0, -6), 3)));
}

TEST_CASE("cube cells: counts and d = 2 sqrt(n) delta") {
    for (int n : {2, 3}) {
        const int jMax = n == 2 ? 4 : 2;
        const auto cells = cube_cells(n, jMax);
        long long expected = 0;
        for (const auto& L : cube_subdivision(n, jMax)) expected += L.ringCount;
        CHECK(static_cast<long long>(cells.size()) == expected);
        for (const auto& s : cells) {
            CHECK(s.d == 2.0 * std::sqrt(static_cast<double>(n)) * s.delta);
            double diag2 = 0.0;
            for (int i = 0; i < n; ++i) diag2 += s.box.extent(i) * s.box.extent(i);
            CHECK(std::sqrt(diag2) == doctest::Approx(s.d).epsilon(1e-12));
            // delta is a true lower bound on the distance of the set to the boundary
            for (int i = 0; i < n; ++i) {
                CHECK(s.box.lo[i] >= s.delta - 1e-15);
                CHECK(1.0 - s.box.hi[i] >= s.delta - 1e-15);
            }
        }
    }
}

TEST_CASE("cube validation and coverage pattern") {
    const RasterPtr r = rasterize(UnitCube{2}, 1.0 / 243);
    double prev = 0.0;
    for (int jMax = 1; jMax <= 3; ++jMax) {
        const ValidationReport v = validate_subdivision(cube_cells(2, jMax), *r, 2.0 * std::sqrt(2.0));
        CHECK(v.ok());
        CHECK(v.overlapMeasure == 0.0);
        const double pattern = std::pow(1.0 - 0.5 * std::pow(3.0, -jMax), 2);
        CHECK(std::abs(v.coveredFraction - pattern) < 0.02);
        CHECK(v.coveredFraction > prev);
        prev = v.coveredFraction;
    }
}

TEST_CASE("overlapping hand-made sets are reported") {
    SubdivisionSet a, b;
    a.family = b.family = "custom";
    a.n = b.n = 2;
    a.id = 0;
    b.id = 1;
    a.box = Box{{0.1, 0.1}, {0.6, 0.6}};
    b.box = Box{{0.4, 0.4}, {0.9, 0.9}};
    for (SubdivisionSet* s : {&a, &b}) {
        s->starCenter = s->box.center();
        s->d = std::sqrt(0.5) * 0.5;
        s->delta = 0.1;
    }
    const ValidationReport v = validate_subdivision({a, b}, *rasterize(UnitCube{2}, 1.0 / 64), 10.0);
    CHECK(v.overlapViolations == 1);
    CHECK(v.overlapMeasure == doctest::Approx(0.04));
    CHECK_FALSE(v.ok());
}

TEST_CASE("chain bounds") {
    const auto single = cube_cells(2, 0);
    CHECK(chain_bound(single).value == doctest::Approx(2 * single[0].d / single[0].delta));

    const auto walk = cube_layer_walk(2, Point{0.02, 0.5}, 6);
    REQUIRE(walk.size() == 4);
    CHECK(walk.back().layer == 3);
    const double value = chain_bound(walk).value;
    CHECK(value <= 2 * 2 * std::sqrt(2.0) * 4 + 1e-12);
    CHECK(value == doctest::Approx(2 * 2 * std::sqrt(2.0) * 4));

    std::vector<SubdivisionSet> broken{walk[0], walk[3]};
    CHECK_THROWS_AS(chain_bound(broken), InvalidArgument);
}

TEST_CASE("layer walk chains are adjacent for random targets") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(0.001, 0.999);
    for (int i = 0; i < 200; ++i) {
        const Point z{U(rng), U(rng)};
        const auto walk = cube_layer_walk(2, z, 10);
        CHECK(walk.back().contains(z));
        CHECK_NOTHROW(chain_bound(walk));
        for (std::size_t k = 0; k < walk.size(); ++k) CHECK(walk[k].layer == static_cast<int>(k));
    }
}

TEST_CASE("solver distance to star centers stays below the chain bound") {
    const RasterPtr r = rasterize(UnitCube{2}, 1.0 / 256);
    const QhField f = solve(r, Point{0.5, 0.5});
    for (const auto& s : cube_cells(2, 3)) {
        const auto walk = cube_layer_walk(2, s.starCenter, 3);
        CHECK(f.value_at(s.starCenter) <= chain_bound(walk).value * 1.05);
    }
}

TEST_CASE("cube bound series") {
    const SeriesReport s2 = cube_bound_series(2, 2.0, 30);
    CHECK(s2.classification == SeriesClass::Converges);
    CHECK(s2.ratios.back() == doctest::Approx(1.0 / 3).epsilon(0.1));
    CHECK(cube_bound_series(3, 5.0, 30).classification == SeriesClass::Converges);
    const SeriesReport s0 = cube_bound_series(2, 0.0, 30);
    for (std::size_t j = 8; j < s0.ratios.size(); ++j) CHECK(s0.ratios[j] == doctest::Approx(1.0 / 3).epsilon(1e-3));
    // terms below (4 sqrt(n))^s n (j+1)^s 3^-j
    for (std::size_t j = 1; j < s2.terms.size(); ++j)
        CHECK(s2.terms[j] <= std::pow(4 * std::sqrt(2.0), 2) * 2 * std::pow(j + 1.0, 2) * std::pow(3.0, -double(j)) *
                                 (1 + 1e-12));
}

TEST_CASE("cusp sets") {
    const SubdivisionSet s1 = cusp_set(3.0, 2, 1);
    CHECK(s1.ell == 1);
    const double x = 0.5 * (s1.box.lo[0] + s1.box.hi[0]);
    CHECK(s1.contains(Point{x, 0.0}));
    CHECK(s1.contains(Point{x, 0.5 * std::pow(x, 3.0)}));
    CHECK_FALSE(s1.contains(Point{x, 0.51 * std::pow(x, 3.0)}));
    CHECK(cusp_layer(51) == 6);
    CHECK(cusp_set(2.0, 1, 51).ell == 6);
    CHECK_THROWS_AS(cusp_set(2.0, 1, 0), InvalidArgument);
    // S_{j,m} lies in the dyadic slab [2^-(j+1), 2^-j]
    for (long long m : {1LL, 2LL, 3LL, 7LL, 51LL}) {
        const SubdivisionSet s = cusp_set(2.5, 3, m);
        CHECK(s.box.lo[0] >= std::pow(2.0, -4) - 1e-15);
        CHECK(s.box.hi[0] <= std::pow(2.0, -3) + 1e-15);
        CHECK(s.dx == std::pow(2.0, -(3 + s.ell)));
    }
}

TEST_CASE("cusp diameters and distance factor") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const double alpha = 1.0 + 3.0 * U(rng);
        if (alpha <= 1.0) continue;
        const int j = 1 + static_cast<int>(rng() % 20);
        const long long m = 1 + static_cast<long long>(rng() % 65536);
        const SubdivisionSet s = cusp_set(alpha, j, m);
        CHECK(s.dr / s.dx < 2.0);
        CHECK(s.d <= cusp_distance_factor(alpha) * s.delta * (1 + 1e-12));
        CHECK(s.dr == doctest::Approx(std::pow((m + 1) * std::pow(2.0, -(j + s.ell)), alpha) * std::pow(2.0, -s.ell)));
    }
}

TEST_CASE("cusp delta is a lower bound for the sampled boundary distance") {
    const double alpha = 2.5;
    for (int j = 1; j <= 3; ++j) {
        for (long long m : {1LL, 2LL, 5LL, 12LL}) {
            const SubdivisionSet s = cusp_set(alpha, j, m, 2, m == 1 ? 0 : 1);
            for (int a = 0; a <= 8; ++a) {
                const double x = s.box.lo[0] + s.box.extent(0) * a / 8;
                const double y = (1.0 - std::pow(2.0, -s.ell)) * std::pow(x, alpha);
                // Brute-force distance to the curve r = t^alpha.
                double best = 1.0;
                for (int k = 0; k <= 20000; ++k) {
                    const double t = k / 20000.0;
                    best = std::min(best, std::hypot(t - x, std::pow(t, alpha) - y));
                }
                CHECK(best >= s.delta * (1 - 1e-9));
            }
        }
    }
}

TEST_CASE("lambda chain") {
    CHECK(lambda_chain(51) == std::vector<long long>{51, 25, 12, 6, 3, 1});
    CHECK(lambda_chain(1) == std::vector<long long>{1});
    CHECK(lambda_chain(6) == std::vector<long long>{6, 3, 1});
    for (long long m = 1; m <= (1 << 16); ++m) {
        std::vector<long long> oracle;
        for (long long v = m; v >= 1; v /= 2) oracle.push_back(v);
        const auto got = lambda_chain(m);
        CHECK(got == oracle);
        CHECK(static_cast<long long>(got.size()) == static_cast<long long>(std::floor(std::log2(double(m)))) + 1);
    }
}

TEST_CASE("cusp k bound") {
    for (double alpha : {1.5, 2.0, 3.0}) {
        for (long long m : {1LL, 6LL, 51LL}) {
            double prev = 0.0;
            for (int j = 1; j <= 12; ++j) {
                const double kb = cusp_k_bound(alpha, j, m);
                CHECK(kb >= prev);
                CHECK(cusp_chain_value(alpha, j, m) <= kb);
                prev = kb;
            }
        }
    }
}

TEST_CASE("cusp m-sum") {
    double direct = 0.0;
    for (long long m = 1; m <= 1000; ++m) direct += std::pow(2.0 + std::log2(double(m)), 2.0) / double(m * m);
    CHECK(cusp_m_sum(2.0, 1000) == doctest::Approx(direct).epsilon(1e-12));
    const double a = cusp_m_sum(2.0, 1LL << 13), b = cusp_m_sum(2.0, 1LL << 14);
    CHECK((b - a) / a < 0.01);
}

TEST_CASE("cusp upper series") {
    for (double s : {1.0, 1.5, 1.9, 2.1, 3.0}) {
        const CuspSeriesReport rep = cusp_upper_series(3.0, 2, s, 30, 1 << 12);
        CHECK(rep.jRatio == doctest::Approx(std::pow(2.0, 2 * s - 4)).epsilon(1e-12));
        CHECK(rep.series.ratios.back() == doctest::Approx(rep.jRatio).epsilon(1e-12));
        CHECK(rep.seriesCondition == (s < 2.0));
        CHECK(rep.theoremCondition == (s < 2.0));
        CHECK(rep.criticalS == 2.0);
        CHECK((rep.series.classification == SeriesClass::Converges) == (s < 2.0));
    }
    CHECK(cusp_upper_series(1.5, 2, 1.0, 5, 8).criticalS == 5.0);
}

TEST_CASE("upper series and tube series agree with the threshold") {
    for (double alpha : {1.5, 2.0, 3.0}) {
        for (int n : {2, 3}) {
            for (double s : {1.0, 2.0, 3.0, 4.0, 6.0, 8.0}) {
                const CuspSeriesReport up = cusp_upper_series(alpha, n, s, 40, 1 << 10);
                const SeriesReport tube = family_series(cusp_tubes(alpha, n, 40), s, 40);
                if (up.series.classification == SeriesClass::Converges)
                    CHECK(tube.classification == SeriesClass::Converges);
                if (tube.classification == SeriesClass::Diverges)
                    CHECK(up.series.classification == SeriesClass::Diverges);
            }
        }
    }
}

TEST_CASE("cusp family validation") {
    const double alpha = 3.0;
    const auto sets = cusp_family(alpha, 2, 4, 4);
    const ValidationReport v = validate_subdivision(sets, *rasterize(Cusp{alpha, 2, 0.0}, 1.0 / 512),
                                                    cusp_distance_factor(alpha));
    CHECK(v.overlapViolations == 0);
    CHECK(v.connected);
    CHECK(v.starViolations == 0);
    CHECK(v.whitneyViolations == 0);
    CHECK(v.ok());
    bool john = false;
    for (const auto& m : v.messages) john = john || m.find("John piece") != std::string::npos;
    CHECK(john);

    const auto sets3 = cusp_family(alpha, 3, 2, 3);
    const ValidationReport v3 = validate_subdivision(sets3, *rasterize(Cusp{alpha, 3, 0.0}, 1.0 / 64),
                                                     cusp_distance_factor(alpha));
    CHECK(v3.starSkipped > 0);
    CHECK(v3.overlapViolations == 0);
}

TEST_CASE("block counts and upper series") {
    for (long long m = 4; m <= 7; ++m) CHECK(block_counts(m).edge == doctest::Approx(1.0 / 9));
    CHECK(block_counts(1).sizeExponent == 0);
    const BlockSeriesReport s1 = block_upper_series(2, 1.0, (1 << 16) - 1, 40);
    CHECK(s1.converges);
    CHECK(s1.mExponent < -1);
    CHECK(s1.series.ratios.back() < 0.9);
    CHECK(s1.series.classification == SeriesClass::Converges);
    for (std::size_t g = 0; g < s1.series.terms.size(); ++g) CHECK(s1.series.terms[g] <= s1.majorant.terms[g]);
    const BlockSeriesReport s3 = block_upper_series(2, 3.0, (1 << 16) - 1, 40);
    CHECK_FALSE(s3.converges);
    CHECK(s3.mExponent == doctest::Approx(3 - 2 * std::log2(3.0)));
    CHECK(s3.mExponent > -1);
    CHECK(s3.series.classification == SeriesClass::Diverges);
    CHECK(s3.criticalS == doctest::Approx(2 * std::log2(3.0) - 1));
}

TEST_CASE("subdivision csv") {
    std::ostringstream os;
    write_subdivision_csv(os, cube_cells(2, 1));
    CHECK(os.str().rfind("id,family,layer,d,delta,neighbors\n", 0) == 0);
}
