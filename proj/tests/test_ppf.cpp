#include <doctest.h>

#include <cmath>
#include <random>

#include "bioref/errors.hpp"
#include "bioref/ppf.hpp"

using namespace bioref;

TEST_SUITE("ppf") {

TEST_CASE("performance function values and limits") {
    const PpfSpec s{0.001, 0.0001, 17.0};
    CHECK(rho(s, 0.0) == doctest::Approx(0.001).epsilon(1e-15));
    CHECK(std::abs(rho(s, 31.0 / 17.0 * 1.0) - 0.0001) < 1e-12 * 1e3);
    CHECK(std::abs(rho(s, 40.0) - 0.0001) < 1e-12);
    CHECK(rho_dot(s, 0.0) == doctest::Approx(-17.0 * 0.0009));
    // strictly decreasing
    double prev = rho(s, 0.0);
    for (int i = 1; i < 200; ++i) {
        const double r = rho(s, i * 0.01);
        CHECK(r < prev);
        prev = r;
    }
    // derivative by central difference
    const double h = 1e-6;
    CHECK(rho_dot(s, 0.1) == doctest::Approx((rho(s, 0.1 + h) - rho(s, 0.1 - h)) / (2 * h)).epsilon(1e-6));
}

TEST_CASE("normalized error") {
    CHECK(normalized_error(0.0, 0.3) == 0.0);
    CHECK(normalized_error(0.05, 0.1) == doctest::Approx(0.5));
    CHECK(normalized_error(0.05, 0.1, 0.1) == doctest::Approx(0.5));
    CHECK_THROWS_AS(normalized_error(0.1, 0.0), ConfigError);
    CHECK_THROWS_AS(normalized_error(0.1, 0.1, -1.0), ConfigError);
    const PpfBand band{{0.1, 0.0001, 8.0}, 0.0001};
    CHECK(normalized_error(0.06, band, 0.0) ==
          doctest::Approx((0.06 - 0.5 * (0.1 - 0.0001)) / (0.5 * (0.1 + 0.0001))));
}

TEST_CASE("log-ratio transform and its inverse") {
    const TransformBounds unit{1.0, 1.0};
    CHECK(transform(0.0, unit).eps == 0.0);
    CHECK(transform(0.5, unit).eps == doctest::Approx(1.098612).epsilon(1e-6));
    CHECK(inverse_transform(0.0, unit) == 0.0);
    CHECK(inverse_transform(std::log(3.0), unit) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(inverse_transform(800.0, unit) == doctest::Approx(1.0));
    CHECK(inverse_transform(-800.0, unit) == doctest::Approx(-1.0));
    const TransformBounds ab{0.3, 1.7};
    CHECK(std::abs(transform((1.7 - 0.3) / 2, ab).eps) < 1e-15);
}

TEST_CASE("transform clamps at the interval ends") {
    const TransformBounds unit{1.0, 1.0};
    const TransformResult r = transform(1.5, unit);
    CHECK(r.clamped);
    CHECK(r.xi_used == doctest::Approx(1.0 - kClampMargin));
    CHECK(std::isfinite(r.eps));
    CHECK(transform(-2.0, unit).clamped);
    CHECK_FALSE(transform(0.999, unit).clamped);
}

TEST_CASE("round trip on random samples") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> D(0.05, 5.0), U(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const TransformBounds b{D(rng), D(rng)};
        const double lo = -b.delta_L + 1e-6, hi = b.delta_U - 1e-6;
        const double xi = lo + (hi - lo) * U(rng);
        worst = std::max(worst, std::abs(inverse_transform(transform(xi, b).eps, b) - xi));
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("log-ratio lower bound inequality on random samples") {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> D(0.05, 5.0), U(0.0, 1.0);
    int violations = 0;
    for (int i = 0; i < 10000; ++i) {
        const double a = D(rng), b = D(rng);
        const double xi = -a + (a + b) * (1e-9 + (1 - 2e-9) * U(rng));
        const double lhs = std::abs(std::log((a + xi) / (b - xi)));
        const double rhs = 4.0 / (a + b) * std::abs(xi - (b - a) / 2);
        if (lhs < rhs * (1 - 1e-12) - 1e-15) ++violations;
    }
    CHECK(violations == 0);
}

TEST_CASE("transform is strictly increasing") {
    const TransformBounds b{0.7, 1.3};
    double prev = -INFINITY;
    for (int i = 1; i < 1000; ++i) {
        const double xi = -0.7 + 2.0 * i / 1000.0;
        const double e = transform(xi, b).eps;
        CHECK(e > prev);
        prev = e;
    }
}

TEST_CASE("closed-form interval agrees with the inverse transform") {
    std::mt19937_64 rng(44);
    std::uniform_real_distribution<double> D(0.1, 3.0), E(0.0, 10.0);
    for (int i = 0; i < 1000; ++i) {
        const TransformBounds b{D(rng), D(rng)};
        const double e = E(rng);
        const XiInterval iv = xi_interval(e, b);
        CHECK(iv.lower == doctest::Approx(inverse_transform(-e, b)).epsilon(1e-12));
        CHECK(iv.upper == doctest::Approx(inverse_transform(e, b)).epsilon(1e-12));
        CHECK(iv.lower > -b.delta_L);
        CHECK(iv.upper < b.delta_U);
    }
}

TEST_CASE("error limits of symmetric and asymmetric bands") {
    const TransformBounds unit{1.0, 1.0};
    const ErrorLimits s = error_limits(PpfBand{{0.5, 0.1, 1.0}, {}}, unit, 0.0);
    CHECK(s.lower == doctest::Approx(-0.5));
    CHECK(s.upper == doctest::Approx(0.5));
    const PpfBand asym{{0.1, 0.0001, 8.0}, 0.0001};
    const ErrorLimits a = error_limits(asym, unit, 0.0);
    CHECK(a.lower == doctest::Approx(-0.0001));
    CHECK(a.upper == doctest::Approx(0.1));
}

TEST_CASE("initial-value check") {
    const TransformBounds unit{1.0, 1.0};
    CHECK(validate_initial(0.0, PpfBand{{0.001, 0.0001, 17.0}, {}}, unit).ok);
    const PpfBand bump{{0.1, 0.0001, 8.0}, 0.0001};
    CHECK(validate_initial(0.06, bump, unit).ok);
    const InitialCheck bad = validate_initial(0.002, PpfBand{{0.001, 0.0001, 17.0}, {}}, unit);
    CHECK_FALSE(bad.ok);
    CHECK(bad.margin == doctest::Approx(-0.001));
}

TEST_CASE("gain conditions") {
    SUBCASE("equal bounds, matched gains and a vanishing envelope satisfy every condition") {
        ConvergenceInputs in;
        in.gamma1 = in.lambda1 = 2.0;
        in.gamma2 = in.lambda2 = 2.0;
        in.a = in.b = 1.0;
        in.fac_ppf = {1e-4, 1e-5, 1.0};
        in.k1 = 1.0;
        in.k2 = 1.0;
        in.rho1 = {1e-4, 1e-5, 1.0};
        in.rho2 = {1e-4, 1e-5, 1.0};
        const FeasibilityReport r = convergence_conditions(in);
        for (const auto& c : r.conditions) CHECK_MESSAGE(c.ok, c.name);
        CHECK(r.all_ok());
    }
    SUBCASE("unequal bounds fail the equality condition") {
        ConvergenceInputs in;
        in.a = 1.0;
        in.b = 2.0;
        const FeasibilityReport r = convergence_conditions(in);
        CHECK_FALSE(r.conditions[3].ok);
        CHECK_FALSE(r.all_ok());
    }
    SUBCASE("plug-in values for the random-road gains") {
        ConvergenceInputs in;
        in.gamma1 = in.gamma2 = 100.0;
        in.lambda1 = in.lambda2 = 100.0;
        in.a = in.b = 1.0;
        in.fac_ppf = {0.1, 0.001, 5.0};
        in.k1 = 0.01;
        in.k2 = 0.083;
        in.rho1 = {0.001, 0.0001, 17.0};
        in.rho2 = {0.55, 0.1, 15.0};
        const FeasibilityReport r = convergence_conditions(in);
        CHECK(r.conditions[0].value == doctest::Approx(16.0 * 100 / 4 - 100 * 0.01));
        CHECK(r.conditions[1].value == doctest::Approx(16.0 * 100 / 4 - 100 * 0.01));
        // xi = 0: r10 = 2/rho10
        const double r10 = 2.0 / 0.001;
        CHECK(r.conditions[4].value ==
              doctest::Approx(4 * r10 * 0.01 - 100 * 100 * 100 * 1e-6 - 100 * 1e-6));
    }
}

TEST_CASE("invalid performance specs") {
    CHECK_THROWS_AS((PpfSpec{0.1, 0.2, 1.0}.validate("p")), ConfigError);
    CHECK_THROWS_AS((PpfSpec{0.1, 0.0, 1.0}.validate("p")), ConfigError);
    CHECK_THROWS_AS((PpfSpec{0.1, 0.01, 0.0}.validate("p")), ConfigError);
    CHECK_THROWS_AS((TransformBounds{0.0, 1.0}.validate("b")), ConfigError);
}

}
