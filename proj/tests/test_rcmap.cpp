#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rcbound/errors.hpp"
#include "rcbound/rcmap.hpp"

using namespace rcbound;

namespace {

// Antiderivative of ω²√(1−ω²) (the Rubin first moment at Γ = ω_c = 1).
double rubin_weight_antiderivative(double x) {
    return (x * std::sqrt(1.0 - x * x) * (2.0 * x * x - 1.0) + std::asin(x)) / 8.0;
}

} // namespace

TEST_CASE("single cell on the full rubin band") {
    const auto p = rc_parameters(SpectralFunction::rubin(1.0), Band{0.0, 1.0});
    CHECK(p.omega == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(p.lambda == doctest::Approx(0.25).epsilon(1e-10));
    const auto q = rc_parameters(SpectralFunction::rubin(3.0, 2.0), Band{0.0, 2.0});
    CHECK(q.omega == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(q.lambda == doctest::Approx(std::sqrt(6.0) / 4.0).epsilon(1e-10));
}

TEST_CASE("half-band cell reference values") {
    const auto p = rc_parameters(SpectralFunction::rubin(1.0), Band{0.0, 1.0 / std::sqrt(2.0)});
    CHECK(p.omega == doctest::Approx(0.3908373928).epsilon(1e-9));
    CHECK(p.lambda == doctest::Approx(0.1999456496).epsilon(1e-9));
    CHECK(p.lambda * p.lambda * p.omega == doctest::Approx(1.0 / 64.0).epsilon(1e-10));
}

TEST_CASE("equal-weight partition boundaries") {
    const auto sf = SpectralFunction::rubin(1.0);
    const auto one = partition_equal_weight(sf, 1);
    REQUIRE(one.size() == 1);
    CHECK(one[0] == Band{0.0, 1.0});
    const auto two = partition_equal_weight(sf, 2);
    REQUIRE(two.size() == 2);
    CHECK(two[0].hi == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-10));
    const auto four = partition_equal_weight(sf, 4);
    for (const Band& c : four) {
        const double w = rubin_weight_antiderivative(c.hi) - rubin_weight_antiderivative(c.lo);
        CHECK(w == doctest::Approx(std::numbers::pi / 64.0).epsilon(1e-10));
    }
}

TEST_CASE("decomposition invariants") {
    const auto sf = SpectralFunction::rubin(2.0);
    const double total = 2.0 * std::numbers::pi / 16.0;
    for (int n : {1, 2, 10, 100}) {
        CAPTURE(n);
        const auto dec = decompose(sf, n);
        REQUIRE(dec.size() == static_cast<std::size_t>(n));
        double sum = 0.0;
        const double ref = dec[0].lambda * dec[0].lambda * dec[0].omega;
        for (std::size_t i = 0; i < dec.size(); ++i) {
            const auto& m = dec[i];
            CHECK(m.index == static_cast<int>(i) + 1);
            CHECK(m.omega > m.interval.lo);
            CHECK(m.omega < m.interval.hi);
            CHECK(m.lambda * m.lambda * m.omega == doctest::Approx(ref).epsilon(1e-10));
            if (i > 0) CHECK(m.interval.lo == dec[i - 1].interval.hi);
            sum += 2.0 * std::numbers::pi * m.lambda * m.lambda * m.omega;
        }
        CHECK(dec[0].interval.lo == 0.0);
        CHECK(dec[dec.size() - 1].interval.hi == 1.0);
        CHECK(sum == doctest::Approx(total).epsilon(1e-8));
    }
}

TEST_CASE("amplitude rescaling keeps energies and scales couplings") {
    const auto dec = decompose(SpectralFunction::rubin(1.0), 5);
    const auto big = dec.with_amplitude(9.0);
    const auto direct = decompose(SpectralFunction::rubin(9.0), 5);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(big[i].omega == dec[i].omega);
        CHECK(big[i].lambda == doctest::Approx(3.0 * dec[i].lambda).epsilon(1e-14));
        CHECK(direct[i].omega == doctest::Approx(dec[i].omega).epsilon(1e-10));
        CHECK(direct[i].lambda == doctest::Approx(big[i].lambda).epsilon(1e-10));
    }
}

TEST_CASE("serial and parallel decompositions are identical") {
    const auto sf = SpectralFunction::shifted_sum(1.3, 1.0, {0.0, 1.5});
    const auto a = decompose(sf, 40, Exec::serial);
    const auto b = decompose(sf, 40, Exec::parallel);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].interval == b[i].interval);
        CHECK(a[i].omega == b[i].omega);
        CHECK(a[i].lambda == b[i].lambda);
    }
}

TEST_CASE("multi-band counts") {
    const auto sf = SpectralFunction::shifted_sum(1.0, 1.0, {0.0, 1.5});
    const int counts[] = {3, 5};
    const auto dec = decompose(sf, counts);
    REQUIRE(dec.size() == 8);
    CHECK(dec[2].interval.hi == 1.0);
    CHECK(dec[3].interval.lo == 1.5);
    CHECK(dec[7].interval.hi == 2.5);
    const int bad[] = {1, 2, 3};
    CHECK_THROWS_AS(decompose(sf, bad), ConfigError);
}

TEST_CASE("unbounded support and unresolvable tables are rejected") {
    CHECK_THROWS_AS(decompose(SpectralFunction::drude_gapless(1.0), 4), ConfigError);
    const auto tab = SpectralFunction::tabulated({{0.0, 0.0}, {0.5, 1.0}, {1.0, 0.0}});
    CHECK_NOTHROW(decompose(tab, 2));
    CHECK_THROWS_AS(decompose(tab, 3), ConfigError);
    CHECK_THROWS_AS(rc_parameters(SpectralFunction::rubin(1.0), Band{0.3, 0.3}), DomainError);
}

TEST_CASE("single-cell residual spectral function is amplitude free") {
    for (double gamma : {1.0, 7.0}) {
        const auto dec = decompose(SpectralFunction::rubin(gamma), 1);
        CHECK(residual_gamma(dec, 0, 0.5).value == doctest::Approx(0.4330127019).epsilon(1e-7));
        for (int k = 1; k <= 50; ++k) {
            const double w = k / 51.0;
            CHECK(std::abs(residual_gamma(dec, 0, w).value - w * std::sqrt(1.0 - w * w)) < 1e-6);
        }
    }
}

TEST_CASE("residual is zero outside its cell and flagged at edges") {
    const auto dec = decompose(SpectralFunction::rubin(1.0), 4);
    const Band c = dec[1].interval;
    CHECK(residual_gamma(dec, 1, c.lo - 0.01).value == 0.0);
    CHECK(residual_gamma(dec, 1, c.hi + 0.01).value == 0.0);
    const auto edge = residual_gamma(dec, 1, c.lo + 1e-9 * c.width());
    CHECK(edge.edge);
    CHECK(edge.value == 0.0);
    CHECK_FALSE(residual_gamma(dec, 1, 0.5 * (c.lo + c.hi)).edge);
}

TEST_CASE("fine cells obey the residual ceiling") {
    const auto dec = decompose(SpectralFunction::rubin(1.0), 100);
    double worst = 0.0;
    for (std::size_t i = 0; i < dec.size(); ++i) {
        const double dw = dec[i].interval.width();
        const double peak = residual_max(dec, i, 24);
        CHECK(peak > 0.0);
        CHECK(peak <= residual_bound(dw) * 1.15);
        worst = std::max(worst, peak / residual_bound(dw));
    }
    CHECK(worst > 0.0);
    CHECK(worst <= 1.2);
}

TEST_CASE("residual bound arithmetic") {
    CHECK(residual_bound(std::numbers::pi / 2) == doctest::Approx(1.0));
    CHECK(residual_bound(0.01) == doctest::Approx(0.0063662).epsilon(1e-5));
    CHECK_THROWS_AS(residual_bound(0.0), DomainError);
}
