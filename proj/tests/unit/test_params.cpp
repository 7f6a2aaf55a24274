#include <doctest.h>

#include <cmath>
#include <random>

#include <hegsim/errors.hpp>
#include <hegsim/params.hpp>

using namespace hegsim;

TEST_CASE("frequency input converts MHz over 2pi to rad/s") {
    CHECK(mhz_over_2pi(1.0) == doctest::Approx(2.0 * M_PI * 1e6).epsilon(1e-15));
    CHECK(FrequencyInput{5.0}.rad_per_s() == mhz_over_2pi(5.0));
    CHECK(to_mhz_over_2pi(mhz_over_2pi(0.25)) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("cooperativity of the two reference cavities") {
    CHECK(cooperativity(CavityParams::from_mhz(5, 0.25, 0, 0.25)) == doctest::Approx(200.0).epsilon(1e-12));
    CHECK(cooperativity(CavityParams::from_mhz(5, 5, 0, 0.25)) == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(cooperativity(CavityParams::from_mhz(0, 0.25, 0, 0.25)) == 0.0);
}

TEST_CASE("cooperativity rejects zero gamma or kappa_in") {
    CHECK_THROWS_AS(cooperativity(CavityParams::from_mhz(5, 0, 1, 0.25)), DomainError);
    CHECK_THROWS_AS(cooperativity(CavityParams::from_mhz(5, 0.25, 1, 0)), DomainError);
}

TEST_CASE("cavity validation rejects negative and non-finite rates") {
    CHECK_THROWS_AS(CavityParams::from_mhz(-1, 0.25, 1, 0.25).validate(), DomainError);
    CHECK_THROWS_AS((CavityParams{1.0, NAN, 0.0, 1.0}.validate()), DomainError);
    CHECK_NOTHROW(CavityParams::from_mhz(0, 0, 0, 0).validate());
}

TEST_CASE("cooperativity is invariant under g -> s g, kappa_in -> s^2 kappa_in") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 200; ++i) {
        const CavityParams p{std::pow(10.0, 7 + u(rng)), std::pow(10.0, 6 + u(rng)), 1e6, std::pow(10.0, 6 + u(rng))};
        const double s = std::pow(10.0, u(rng));
        CavityParams q = p;
        q.g *= s;
        q.kappa_in *= s * s;
        CHECK(cooperativity(q) == doctest::Approx(cooperativity(p)).epsilon(1e-12));
    }
}

TEST_CASE("critical pulse width branches") {
    // kappa = g: both branches equal 1/kappa.
    CHECK(critical_pulse_width(CavityParams::from_mhz(5, 0, 5, 0.25)) == doctest::Approx(31.83e-9).epsilon(1e-3));
    CHECK(critical_pulse_width(CavityParams::from_mhz(5, 0, 1, 0.25)) == doctest::Approx(159.2e-9).epsilon(1e-3));
    CHECK(critical_pulse_width(CavityParams::from_mhz(5, 0, 25, 0.25)) == doctest::Approx(159.2e-9).epsilon(1e-3));
    CHECK_THROWS_AS(critical_pulse_width(CavityParams::from_mhz(0, 0, 5, 0.25)), DomainError);
    CHECK_THROWS_AS(critical_pulse_width(CavityParams::from_mhz(5, 0, 0, 0.25)), DomainError);
}

TEST_CASE("critical pulse width never drops below 1/g") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 500; ++i) {
        const double g = mhz_over_2pi(5.0);
        const CavityParams p{g, g * std::pow(10.0, u(rng)), g * std::pow(10.0, u(rng)), 1e6};
        CHECK(critical_pulse_width(p) >= 1.0 / g * (1.0 - 1e-15));
    }
    const double g = mhz_over_2pi(5.0);
    CHECK(critical_pulse_width(CavityParams{g, 0.0, g, 1e6}) == doctest::Approx(1.0 / g).epsilon(1e-15));
}

TEST_CASE("kappa from finesse") {
    const double k = kappa_from_finesse(4600, 1e-3, 1.07);
    CHECK(to_mhz_over_2pi(k) == doctest::Approx(30.46).epsilon(2e-4));
    CHECK(kappa_from_finesse(9200, 1e-3, 1.07) == doctest::Approx(k / 2).epsilon(1e-14));
    CHECK(kappa_from_finesse(4600, 2e-3, 1.07) == doctest::Approx(k / 2).epsilon(1e-14));
    CHECK_THROWS_AS(kappa_from_finesse(0, 1e-3, 1.07), DomainError);
    CHECK_THROWS_AS(kappa_from_finesse(4600, -1e-3, 1.07), DomainError);
    CHECK_THROWS_AS(kappa_from_finesse(4600, 1e-3, 0.9), DomainError);
}

TEST_CASE("kappa from finesse is strictly decreasing in finesse and length") {
    double last_f = INFINITY, last_l = INFINITY;
    for (int i = 1; i <= 50; ++i) {
        const double f = kappa_from_finesse(100.0 * i, 1e-3, 1.07);
        const double l = kappa_from_finesse(4600, 1e-4 * i, 1.07);
        CHECK(f < last_f);
        CHECK(l < last_l);
        last_f = f;
        last_l = l;
    }
}

TEST_CASE("dB per metre conversion") {
    CHECK(db_per_m_to_linear(0) == 0.0);
    CHECK(db_per_m_to_linear(20) == doctest::Approx(4.605).epsilon(1e-4));
    CHECK(db_per_m_to_linear(10) == doctest::Approx(2.3026).epsilon(1e-4));
    CHECK_THROWS_AS(db_per_m_to_linear(-1), DomainError);
}

TEST_CASE("transition presets") {
    CHECK(transition_presets().size() == 3);
    const auto p = find_preset("yb_1389");
    REQUIRE(p);
    CHECK(p->wavelength_m == doctest::Approx(1.389e-6));
    CHECK(to_mhz_over_2pi(p->g) == doctest::Approx(5.0));
    CHECK(to_mhz_over_2pi(p->gamma) == doctest::Approx(0.25));
    CHECK(find_preset("yb_1480"));
    CHECK(find_preset("yb_1539"));
    CHECK_FALSE(find_preset("rb_780"));
}
