#include <catch2/catch_amalgamated.hpp>

#include "heightlab/per1.hpp"

#include "test_support.hpp"

using namespace heightlab;

TEST_CASE("lambda validation") {
    CHECK_THROWS_AS(Lambda(Rational(0)), DomainError);
    CHECK_THROWS_AS(Lambda(Rational(1)), DomainError);
    CHECK_THROWS_AS(Lambda(Rational(-1)), DomainError);
    CHECK_NOTHROW(Lambda(parse_rational("5/3")));
}

TEST_CASE("f_apply") {
    const Lambda two(Rational(2));
    CHECK(f_apply(two, Rational(0), Rational(1)).value == 1);
    CHECK(f_apply(two, Rational(0), Rational(-1)).value == -1);
    CHECK(f_apply(two, parse_rational("-4/3"), Rational(1)).value == 3);
    // pole: z^2 + t z + 1 = 0 at t = -2, z = 1
    CHECK(f_apply(two, Rational(-2), Rational(1)).pole);
}

TEST_CASE("critical orbits") {
    const Lambda two(Rational(2));
    const auto fixed = critical_orbit(two, Rational(0), CriticalSign::plus, 10);
    CHECK(fixed.status == OrbitReport::Status::preperiodic);
    CHECK(fixed.tail == 0);
    CHECK(fixed.period == 1);
    REQUIRE(fixed.points.size() >= 2);
    CHECK(fixed.points[1].z == fixed.points[0].z);

    const auto cyc = critical_orbit(two, parse_rational("-4/3"), CriticalSign::plus, 10);
    CHECK(cyc.status == OrbitReport::Status::preperiodic);
    CHECK(cyc.tail == 0);
    CHECK(cyc.period == 2);
    CHECK(cyc.points[1].z == 3);  // 1 -> 3 -> 1

    const auto open_orbit = critical_orbit(two, Rational(1), CriticalSign::plus, 50);
    CHECK(open_orbit.status == OrbitReport::Status::budget_exhausted);
    CHECK(open_orbit.points[1].z == parse_rational("2/3"));
    CHECK(open_orbit.points[2].z == parse_rational("12/19"));

    const auto pole = critical_orbit(two, Rational(-2), CriticalSign::plus, 10);
    CHECK(pole.status == OrbitReport::Status::hit_pole);
    CHECK(pole.points.back().at_infinity);
    CHECK_THROWS_AS(critical_orbit(two, Rational(0), CriticalSign::plus, 0), DomainError);
}

TEST_CASE("height blowup filter stops runaway orbits early") {
    const Lambda two(Rational(2));
    const auto rep = critical_orbit(two, Rational(1), CriticalSign::plus, 1000, 4.0);
    CHECK(rep.status == OrbitReport::Status::budget_exhausted);
    CHECK(rep.height_blowup);
    CHECK(rep.points.size() < 100);  // far less than the budget
}

TEST_CASE("build_Fn reproduces the hand expansions for lambda = 2") {
    const Lambda two(Rational(2));
    const FnSequence seq = build_Fn(two, CriticalSign::plus, 6);
    const auto& f1 = seq.entry(1);
    CHECK(f1.degree == 1);
    CHECK(f1.pair.a == BinaryForm({Int(2), Int(0)}));  // 2 t2
    CHECK(f1.pair.b == BinaryForm({Int(2), Int(1)}));  // t1 + 2 t2
    const auto& f2 = seq.entry(2);
    CHECK(f2.degree == 2);
    CHECK(f2.pair.a == BinaryForm({Int(8), Int(4), Int(0)}));  // 4 t1 t2 + 8 t2^2
    CHECK(f2.pair.b == BinaryForm({Int(8), Int(8), Int(3)}));  // 3 t1^2 + 8 t1 t2 + 8 t2^2
    CHECK(f2.removed_gcd == BinaryForm({Int(1), Int(0)}));     // g_2 = t2
}

TEST_CASE("degree law holds at every step") {
    for (const char* ls : {"2", "3", "-2", "5/3"}) {
        const Lambda lambda(parse_rational(ls));
        const FnSequence seq = build_Fn(lambda, CriticalSign::plus, 5);
        int prev = 0;
        for (int n = 1; n <= 5; ++n) {
            const auto& e = seq.entry(n);
            CHECK(e.degree == 2 * prev + 1 - e.removed_gcd.degree());
            prev = e.degree;
        }
    }
}

TEST_CASE("build invariant: primitive(F o entry(n-1)) = entry(n) * g_n exactly") {
    const Lambda lambda(parse_rational("5/3"));
    const FnSequence seq = build_Fn(lambda, CriticalSign::minus, 4);
    for (int n = 2; n <= 4; ++n) {
        const auto& prev = seq.entry(n - 1);
        const auto& e = seq.entry(n);
        const auto raw = detail::apply_lift(lambda, seq.lift(), prev.pair.a, prev.pair.b);
        const BinaryForm pa = form_divide_exact(raw.a, BinaryForm::constant(e.removed_content));
        const BinaryForm pb = form_divide_exact(raw.b, BinaryForm::constant(e.removed_content));
        CHECK(pa == e.pair.a * e.removed_gcd);
        CHECK(pb == e.pair.b * e.removed_gcd);
    }
}

TEST_CASE("F_n evaluated at (t, 1) matches the exact orbit by cross-multiplication") {
    const Lambda two(Rational(2));
    const FnSequence seq = build_Fn(two, CriticalSign::plus, 6);
    const FnSequence seqm = build_Fn(two, CriticalSign::minus, 6);
    testkit::Rng rng(8080);
    int tested = 0;
    while (tested < 20) {
        const Rational t = testkit::random_rational(rng, 40);
        for (const auto* s : {&seq, &seqm}) {
            Rational z = Rational(sign_value(s->sign()));
            bool pole = false;
            for (int n = 1; n <= 6; ++n) {
                const FtValue fv = f_apply(two, t, z);
                if (fv.pole) {
                    pole = true;
                    break;
                }
                z = fv.value;
                const Rational an = eval_exact(s->entry(n).pair.a, t, Rational(1));
                const Rational bn = eval_exact(s->entry(n).pair.b, t, Rational(1));
                REQUIRE(an == z * bn);
            }
            if (pole) break;
        }
        ++tested;
    }
}

TEST_CASE("periodic parameter polynomials for lambda = 2") {
    const Lambda two(Rational(2));
    const auto p1 = periodic_parameter_poly(two, CriticalSign::plus, 1);
    REQUIRE(upoly::deg(p1) == 1);
    CHECK(p1[0] == 0);
    CHECK(p1[1] == 1);  // P_1 = t
    const auto p2 = periodic_parameter_poly(two, CriticalSign::plus, 2);
    REQUIRE(upoly::deg(p2) == 2);
    CHECK(p2[0] == 0);
    CHECK(p2[1] == 4);
    CHECK(p2[2] == 3);  // P_2 = 3t^2 + 4t
}

TEST_CASE("rational roots of P_n are preperiodic with period dividing n") {
    const Lambda two(Rational(2));
    const FnSequence seq = build_Fn(two, CriticalSign::plus, 4);
    for (int n : {1, 2, 3, 4}) {
        const auto pn = periodic_parameter_poly(seq, n);
        // rational-root scan over small numerators/denominators of the
        // constant and leading coefficients
        for (long num = -8; num <= 8; ++num) {
            for (long den = 1; den <= 8; ++den) {
                if (std::gcd(std::labs(num), den) != 1) continue;
                const Rational t = make_rational(Int(num), Int(den));
                if (upoly::eval(pn, t) != 0) continue;
                const auto rep = critical_orbit(two, t, CriticalSign::plus, 2 * n + 2);
                REQUIRE(rep.status == OrbitReport::Status::preperiodic);
                CHECK(n % rep.period == 0);
            }
        }
    }
}

TEST_CASE("degree bound deg P_n <= d_n") {
    const Lambda two(Rational(2));
    const FnSequence seq = build_Fn(two, CriticalSign::plus, 6);
    for (int n = 1; n <= 6; ++n)
        CHECK(upoly::deg(periodic_parameter_poly(seq, n)) <= seq.entry(n).degree);
}

TEST_CASE("paper-literal lift differs from the standard one") {
    const Lambda two(Rational(2));
    const FnSequence std_seq = build_Fn(two, CriticalSign::minus, 3, LiftKind::standard);
    const FnSequence lit_seq = build_Fn(two, CriticalSign::minus, 3, LiftKind::paper_literal);
    // the minus-orbit sign bookkeeping is where the two lifts disagree
    bool differs = false;
    for (int n = 1; n <= 3; ++n)
        if (!(std_seq.entry(n).pair.a == lit_seq.entry(n).pair.a) ||
            !(std_seq.entry(n).pair.b == lit_seq.entry(n).pair.b))
            differs = true;
    CHECK(differs);
}

TEST_CASE("memory guard trips on absurd limits") {
    const Lambda two(Rational(2));
    BuildLimits limits;
    limits.max_total_coefficient_bits = 16;
    CHECK_THROWS_AS(build_Fn(two, CriticalSign::plus, 4, LiftKind::standard, limits), Error);
}
