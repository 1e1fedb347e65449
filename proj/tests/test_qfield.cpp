#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "heightlab/qfield.hpp"

#include "test_support.hpp"

using namespace heightlab;

using testkit::random_rational;

TEST_CASE("p-adic valuations of rationals") {
    CHECK(padic_val(parse_rational("6"), Int(2)) == 1);
    CHECK(padic_val(parse_rational("-3/4"), Int(2)) == -2);
    CHECK(padic_val(parse_rational("1"), Int(7)) == 0);
    CHECK_THROWS_AS(padic_val(Rational(0), Int(3)), DomainError);
}

TEST_CASE("rational parsing and printing") {
    CHECK(to_string(parse_rational("-6/4")) == "-3/2");
    CHECK(to_string(parse_rational("7")) == "7");
    CHECK(parse_rational("0/5") == 0);
    CHECK_THROWS_AS(parse_rational("1/0"), ParseError);
    CHECK_THROWS_AS(parse_rational("a/b"), ParseError);
    CHECK_THROWS_AS(parse_rational("1.5"), ParseError);
    CHECK_THROWS_AS(parse_rational(""), ParseError);
}

TEST_CASE("log-absolute values") {
    CHECK(log_abs(parse_rational("6"), Place::archimedean()).value ==
          Catch::Approx(std::log(6.0)).epsilon(1e-15));
    const LogAbs l2 = log_abs(parse_rational("6"), Place::finite(Int(2)));
    CHECK(l2.logp_multiple == -1);
    CHECK(l2.value == Catch::Approx(-std::log(2.0)).epsilon(1e-15));
    const LogAbs l3 = log_abs(parse_rational("-3/4"), Place::finite(Int(3)));
    CHECK(l3.logp_multiple == -1);  // |-3/4|_3 = 1/3
    CHECK_THROWS_AS(log_abs(Rational(0), Place::archimedean()), DomainError);
    CHECK_THROWS_AS(Place::finite(Int(6)), DomainError);
}

TEST_CASE("support places") {
    const auto s6 = support_places(parse_rational("6"));
    REQUIRE(s6.size() == 3);  // inf, 2, 3
    CHECK(s6[0].is_archimedean());
    CHECK(s6[1].prime() == 2);
    CHECK(s6[2].prime() == 3);
    CHECK(support_places(Rational(1)).size() == 1);
    CHECK(support_places(parse_rational("-3/4")).size() == 3);
    CHECK_THROWS_AS(support_places(Rational(0)), DomainError);
}

TEST_CASE("product formula residual is exactly zero") {
    for (const char* s : {"6", "-3/4", "1", "1024/243", "-1000003"}) {
        const auto r = product_formula_residual(parse_rational(s));
        INFO("x = " << s);
        CHECK(r.is_zero());
    }
}

TEST_CASE("product formula on 1000 seeded random rationals (exact bookkeeping)") {
    testkit::Rng rng(20260810);
    for (int i = 0; i < 1000; ++i) {
        const Rational x = random_rational(rng);
        const auto r = product_formula_residual(x);
        REQUIRE(r.is_zero());
    }
}

TEST_CASE("log_abs is additive: exact at finite places, 1 ulp scale at infinity") {
    testkit::Rng rng(77);
    for (int i = 0; i < 200; ++i) {
        const Rational x = random_rational(rng);
        const Rational y = random_rational(rng);
        for (const auto& p : {Int(2), Int(3), Int(5), Int(997)}) {
            const Place v = Place::finite(p);
            CHECK(log_abs(x * y, v).logp_multiple ==
                  log_abs(x, v).logp_multiple + log_abs(y, v).logp_multiple);
        }
        const double lhs = log_abs(x * y, Place::archimedean()).value;
        const double rhs = log_abs(x, Place::archimedean()).value + log_abs(y, Place::archimedean()).value;
        CHECK(lhs == Catch::Approx(rhs).margin(1e-12 * (1.0 + std::fabs(rhs))));
    }
}

TEST_CASE("Weil height") {
    CHECK(weil_height(parse_rational("3/2")) == Catch::Approx(std::log(3.0)).epsilon(1e-15));
    CHECK(weil_height(Rational(0)) == 0.0);
    CHECK(weil_height(parse_rational("-4/3")) == Catch::Approx(std::log(4.0)).epsilon(1e-15));
}

TEST_CASE("Weil height equals the sum of positive local contributions") {
    testkit::Rng rng(4242);
    for (int i = 0; i < 200; ++i) {
        const Rational x = random_rational(rng);
        double sum = 0.0;
        for (const Place& v : support_places(x)) sum += std::max(0.0, log_abs(x, v).value);
        CHECK(weil_height(x) == Catch::Approx(sum).margin(1e-12 * (1.0 + sum)));
    }
}

TEST_CASE("primality and factorization") {
    CHECK(is_prime_u64(2));
    CHECK(is_prime_u64(97));
    CHECK_FALSE(is_prime_u64(1));
    CHECK_FALSE(is_prime_u64(561));               // Carmichael
    CHECK(is_prime_u64(18446744073709551557ULL));  // largest 64-bit prime
    const auto f = factorize(Int("-293318625600"));  // 2^6 3^5 5^2 7^3 13^2 13
    Int prod = 1;
    for (const auto& [p, e] : f) {
        CHECK(is_prime(p));
        prod *= pow(p, static_cast<unsigned>(e));
    }
    CHECK(prod == Int("293318625600"));
    // two 40-bit primes force the rho path
    const Int big = Int("1099511627791") * Int("1099511627803");
    const auto f2 = factorize(big);
    REQUIRE(f2.size() == 2);
    CHECK(f2.begin()->second == 1);
}
