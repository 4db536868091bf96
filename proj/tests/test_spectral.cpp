#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "rcbound/errors.hpp"
#include "rcbound/spectral.hpp"

using namespace rcbound;

TEST_CASE("rubin evaluation at a reference point") {
    const auto sf = SpectralFunction::rubin(1.0, 1.0);
    CHECK(sf(0.5) == doctest::Approx(0.4330127019).epsilon(1e-10));
    CHECK(sf(-0.5) == doctest::Approx(-0.4330127019).epsilon(1e-10));
}

TEST_CASE("rubin is exactly zero outside its band") {
    const auto sf = SpectralFunction::rubin(3.0, 1.0);
    CHECK(sf(0.0) == 0.0);
    CHECK(sf(1.0) == 0.0);
    CHECK(sf(1.5) == 0.0);
    CHECK(sf(-2.0) == 0.0);
}

TEST_CASE("odd continuation holds for every kind") {
    const std::vector<SpectralFunction> fns{
        SpectralFunction::rubin(2.0, 1.3),
        SpectralFunction::drude_gapless(1.5, 0.7),
        SpectralFunction::shifted_sum(1.0, 1.0, {0.0, 1.5}),
        SpectralFunction::tabulated({{0.0, 0.0}, {0.5, 1.0}, {1.0, 0.0}}),
    };
    for (const auto& sf : fns) {
        for (double w : {0.1, 0.37, 0.8, 1.2, 1.9, 2.3}) {
            if (sf.kind() == SpectralKind::tabulated && w > 1.0) continue;
            CHECK(sf(-w) == -sf(w));
        }
    }
}

TEST_CASE("amplitude scales the function linearly") {
    const auto a = SpectralFunction::rubin(1.0);
    const auto b = a.with_amplitude(7.5);
    for (double w : {0.1, 0.5, 0.9}) CHECK(b(w) == doctest::Approx(7.5 * a(w)).epsilon(1e-15));
    CHECK(b.bands() == a.bands());
}

TEST_CASE("drude gapless closed form") {
    const auto sf = SpectralFunction::drude_gapless(2.0, 1.0);
    CHECK(sf(1.0) == doctest::Approx(1.0));
    CHECK(sf(3.0) == doctest::Approx(2.0 * 3.0 / 10.0));
    CHECK_FALSE(sf.bands().front().finite());
}

TEST_CASE("shifted sum bands and gaps") {
    const auto sf = SpectralFunction::shifted_sum(1.0, 1.0, {0.0, 1.5});
    REQUIRE(sf.bands().size() == 2);
    CHECK(sf.bands()[1] == Band{1.5, 2.5});
    CHECK(sf(1.2) == 0.0);
    CHECK(sf(2.0) == doctest::Approx(SpectralFunction::rubin(1.0)(0.5)));
    const auto gaps = band_gaps(sf, 10.0);
    REQUIRE(gaps.size() == 2);
    CHECK(gaps[0] == Band{1.0, 1.5});
    CHECK(gaps[1] == Band{2.5, 10.0});
}

TEST_CASE("shifted sum rejects overlapping bands") {
    CHECK_THROWS_AS(SpectralFunction::shifted_sum(1.0, 1.0, {0.0, 0.5}), ConfigError);
    CHECK_THROWS_AS(SpectralFunction::shifted_sum(1.0, 1.0, {0.0, 1.0}), ConfigError);
}

TEST_CASE("gapless reference has no gaps below any cutoff") {
    const auto sf = SpectralFunction::drude_gapless(1.0);
    CHECK(band_gaps(sf, 100.0).empty());
}

TEST_CASE("tabulated interpolation, bands and hull") {
    const auto sf = SpectralFunction::tabulated(
        {{0.0, 0.0}, {0.5, 1.0}, {1.0, 0.0}, {2.0, 0.0}, {2.5, 2.0}, {3.0, 0.0}}, 2.0);
    REQUIRE(sf.bands().size() == 2);
    CHECK(sf.bands()[0] == Band{0.0, 1.0});
    CHECK(sf.bands()[1] == Band{2.0, 3.0});
    CHECK(sf(0.25) == doctest::Approx(1.0));
    CHECK(sf(1.5) == 0.0);
    CHECK(sf(2.75) == doctest::Approx(2.0));
    CHECK_THROWS_AS(sf(3.5), EvaluationError);
}

TEST_CASE("tabulated input validation") {
    CHECK_THROWS_AS(SpectralFunction::tabulated({{0.0, 0.0}, {0.5, 1.0}, {1.0, 0.5}}), ConfigError);
    CHECK_THROWS_AS(SpectralFunction::tabulated({{0.0, 0.0}, {0.5, -1.0}, {1.0, 0.0}}), ConfigError);
    CHECK_THROWS_AS(SpectralFunction::tabulated({{0.0, 0.0}, {0.5, 1.0}, {0.4, 0.0}}), ConfigError);
}

TEST_CASE("rescaling to a frequency unit") {
    const auto sf = SpectralFunction::rubin(6.0, 2.0).rescaled(2.0);
    CHECK(sf.cutoff() == 1.0);
    CHECK(sf.amplitude() == 3.0);
}

TEST_CASE("bose occupation") {
    CHECK(bose_occupation(2.0, 1.0) == doctest::Approx(1.0 / (std::exp(0.5) - 1.0)).epsilon(1e-14));
    CHECK(bose_occupation(1.0, 1.0) == doctest::Approx(0.5819767069).epsilon(1e-10));
    CHECK(bose_occupation(0.0, 1.0) == 0.0);
    CHECK_THROWS_AS(bose_occupation(1.0, 0.0), DomainError);
    CHECK_THROWS_AS(bose_occupation(1.0, -1.0), DomainError);
}

TEST_CASE("spectral csv reader") {
    const auto path = std::filesystem::temp_directory_path() / "rcbound_spectral_test.csv";
    {
        std::ofstream out(path);
        out << "omega,gamma\n0,0\n0.5,1\n1,0\n";
    }
    const auto samples = read_spectral_csv(path);
    REQUIRE(samples.size() == 3);
    CHECK(samples[1].omega == 0.5);
    CHECK(samples[1].value == 1.0);
    std::filesystem::remove(path);
}
