#include <doctest.h>

#include <cmath>
#include <random>

#include "trimap/map_core.hpp"

using namespace trimap;

namespace {

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace

TEST_CASE("domain constructors reject boundary and exterior points") {
    CHECK_THROWS_AS(TrianglePoint(0.5, 0.5), DomainError);   // y == x
    CHECK_THROWS_AS(TrianglePoint(1.0, 0.5), DomainError);   // x == 1
    CHECK_THROWS_AS(TrianglePoint(0.5, 0.0), DomainError);   // y == 0
    CHECK_THROWS_AS(TrianglePoint(0.9, 0.95), DomainError);  // y > x
    CHECK_THROWS_AS(RationalTrianglePoint(Rational(1, 2), Rational(1, 2)), DomainError);
    CHECK_NOTHROW(TrianglePoint(0.8, 0.5));
}

TEST_CASE("classify_digit on the worked examples") {
    CHECK(classify_digit(TrianglePoint(0.8, 0.5)) == 0);
    // (2/5, 1/5): (1-x)/y = 3 exactly, the closed upper boundary keeps k = 3.
    CHECK(classify_digit(RationalTrianglePoint(Rational(2, 5), Rational(1, 5))) == 3);
    // The doubles nearest 2/5 and 1/5 sit just past the boundary (the exact
    // residual 1-x-3y of the rounded pair is ~-5.6e-17), so the float flavor
    // answers for the rounded point: digit 2, flagged near-boundary.
    DigitInfo d = classify_digit_ex(TrianglePoint(0.4, 0.2));
    CHECK(d.near_boundary);
    CHECK(d.k == 2);
    // On exactly representable inputs the float flavor matches the exact rule.
    CHECK(classify_digit(TrianglePoint(0.375, 0.125)) ==
          classify_digit(RationalTrianglePoint(Rational(3, 8), Rational(1, 8))));
}

TEST_CASE("x + y > 1 forces digit 0") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        double x = 0.5 + 0.5 * uniform01(rng);
        double y = (1.0 - x) + (x - (1.0 - x)) * uniform01(rng);
        if (!(y > 1.0 - x && y < x && y > 0.0)) continue;
        CHECK(classify_digit(TrianglePoint(x, y)) == 0);
    }
}

TEST_CASE("classify agrees with floor((1-x)/y) and the cell inequalities (rational oracle)") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 500; ++trial) {
        std::int64_t q = 2 + static_cast<std::int64_t>(rng() % 999998);
        std::int64_t xa = 1 + static_cast<std::int64_t>(rng() % (q - 1));
        std::int64_t ya = 1 + static_cast<std::int64_t>(rng() % q);
        if (!(ya < xa && xa < q)) continue;
        RationalTrianglePoint rp{Rational(xa, q), Rational(ya, q)};
        std::int64_t k = classify_digit(rp);
        // 1 - x - k y >= 0 > 1 - x - (k+1) y, checked exactly.
        Rational r1 = Rational(1) - rp.x - Rational(k) * rp.y;
        Rational r2 = r1 - rp.y;
        CHECK(r1 >= Rational(0));
        CHECK(r2 < Rational(0));
    }
}

TEST_CASE("step matches the worked orbit of (0.8, 0.5)") {
    StepResult s1 = step(TrianglePoint(0.8, 0.5));
    CHECK(s1.digit == 0);
    REQUIRE(s1.image.has_value());
    CHECK(s1.image->x == doctest::Approx(0.625).epsilon(1e-15));
    CHECK(s1.image->y == doctest::Approx(0.25).epsilon(1e-15));

    StepResult s2 = step(*s1.image);
    CHECK(s2.digit == 1);
    REQUIRE(s2.image.has_value());
    CHECK(s2.image->x == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(s2.image->y == doctest::Approx(0.2).epsilon(1e-15));

    // The third iterate is (0.4, 0.2) up to one rounding in each coordinate;
    // the exact point terminates with digit 3, the rounded one is flagged.
    DigitInfo d3 = classify_digit_ex(*s2.image);
    CHECK(d3.near_boundary);
}

TEST_CASE("rational step terminates exactly at (2/5, 1/5)") {
    RationalStepResult s = step(RationalTrianglePoint(Rational(2, 5), Rational(1, 5)));
    CHECK(s.digit == 3);
    CHECK_FALSE(s.image.has_value());
}

TEST_CASE("expand_sequence worked examples") {
    TriangleSequence a = expand_sequence(TrianglePoint(0.8, 0.5), 2);
    CHECK(a.digits == std::vector<std::int64_t>{0, 1});
    CHECK_FALSE(a.terminated);

    TriangleSequence b = expand_sequence(RationalTrianglePoint(Rational(2, 5), Rational(1, 5)), 10);
    CHECK(b.digits == std::vector<std::int64_t>{3});
    CHECK(b.terminated);

    TriangleSequence c = expand_sequence(TrianglePoint(0.8, 0.5), 0);
    CHECK(c.digits.empty());
    CHECK_FALSE(c.terminated);

    // Full exact expansion of (4/5, 1/2): digits 0, 1, 3 then boundary.
    TriangleSequence d = expand_sequence(RationalTrianglePoint(Rational(4, 5), Rational(1, 2)), 10);
    CHECK(d.digits == std::vector<std::int64_t>{0, 1, 3});
    CHECK(d.terminated);
}

TEST_CASE("inverse_branch at k=0 of (1/2, 1/4) is (4/5, 2/5) exactly") {
    RationalTrianglePoint p{Rational(1, 2), Rational(1, 4)};
    RationalTrianglePoint t0 = inverse_branch(0, p);
    CHECK(t0.x == Rational(4, 5));
    CHECK(t0.y == Rational(2, 5));
}

TEST_CASE("exact round trip step(inverse_branch(k, p)) == (k, p) for 1000 random pairs") {
    std::mt19937_64 rng(23);
    int done = 0;
    while (done < 1000) {
        std::int64_t q = 2 + static_cast<std::int64_t>(rng() % 9998);
        std::int64_t xa = 1 + static_cast<std::int64_t>(rng() % (q - 1));
        std::int64_t ya = 1 + static_cast<std::int64_t>(rng() % q);
        if (!(ya < xa && xa < q)) continue;
        std::int64_t k = static_cast<std::int64_t>(rng() % 1000);
        RationalTrianglePoint p{Rational(xa, q), Rational(ya, q)};
        RationalTrianglePoint pre = inverse_branch(k, p);
        RationalStepResult s = step(pre);
        CHECK(s.digit == k);
        REQUIRE(s.image.has_value());
        CHECK(s.image->x == p.x);
        CHECK(s.image->y == p.y);
        ++done;
    }
}

TEST_CASE("inverse_branch lands in the k-th cell for k <= 50") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        double x = 0.02 + 0.96 * uniform01(rng);
        double y = x * (0.02 + 0.96 * uniform01(rng));
        TrianglePoint p(x, y);
        for (std::int64_t k = 0; k <= 50; ++k)
            CHECK(classify_digit(inverse_branch(k, p)) == k);
    }
}

TEST_CASE("jacobian_det values and finite-difference cross-check") {
    CHECK(jacobian_det(TrianglePoint(0.5, 0.25)) == doctest::Approx(8.0).epsilon(1e-15));
    CHECK(jacobian_det(TrianglePoint(0.8, 0.5)) == doctest::Approx(1.953125).epsilon(1e-15));
    TrianglePoint p(0.6, 0.3);
    double fd = jacobian_det_fd(p, 1e-5);
    CHECK(std::abs(std::abs(fd) - 1.0 / 0.216) < 1e-6);
}

TEST_CASE("exact and floating expansions agree on the first 20 digits") {
    // Exclusion rule: any seed whose exact orbit lands within 1e-9 of a cell
    // boundary in the first 20 steps is excluded and reported.  Termination is
    // distance zero, so terminating seeds (the overwhelming majority at these
    // denominators: the common denominator shrinks every step) fall under it.
    std::mt19937_64 rng(47);
    int tested = 0, excluded = 0;
    for (int trial = 0; trial < 60000 && tested < 8; ++trial) {
        std::int64_t q = 1000 + static_cast<std::int64_t>(rng() % 999000);
        std::int64_t xa = 1 + static_cast<std::int64_t>(rng() % (q - 1));
        std::int64_t ya = 1 + static_cast<std::int64_t>(rng() % q);
        if (!(ya < xa && xa < q)) continue;
        RationalTrianglePoint rp{Rational(xa, q), Rational(ya, q)};

        bool excl = false;
        {
            RationalTrianglePoint cur = rp;
            for (int i = 0; i < 20; ++i) {
                std::int64_t k = classify_digit(cur);
                Rational r = Rational(1) - cur.x - Rational(k) * cur.y;
                if (r.to_double() < 1e-9 || (cur.y - r).to_double() < 1e-9) {
                    excl = true;
                    break;
                }
                RationalStepResult s = step(cur);
                if (!s.image) {
                    excl = true;
                    break;
                }
                cur = *s.image;
            }
        }
        if (excl) {
            ++excluded;
            continue;
        }

        TriangleSequence exact = expand_sequence(rp, 20);
        TriangleSequence approx = expand_sequence(rp.to_double(), 20);
        REQUIRE(exact.digits.size() == 20);
        REQUIRE(approx.digits.size() == 20);
        for (std::size_t i = 0; i < 20; ++i) CHECK(exact.digits[i] == approx.digits[i]);
        ++tested;
    }
    CHECK(tested >= 3);
    MESSAGE("seeds surviving the boundary filter: ", tested, "; excluded: ", excluded);
}

TEST_CASE("preconditions") {
    CHECK_THROWS_AS(expand_sequence(TrianglePoint(0.5, 0.25), -1), DomainError);
    CHECK_THROWS_AS(inverse_branch(-1, TrianglePoint(0.5, 0.25)), DomainError);
}

TEST_CASE("rational arithmetic normalizes, parses, and detects overflow") {
    CHECK(Rational(2, -4) == Rational(-1, 2));
    CHECK(Rational(0, -7) == Rational(0));
    CHECK(Rational::parse("4/6") == Rational(2, 3));
    CHECK(Rational::parse("-3") == Rational(-3));
    CHECK_THROWS_AS(Rational::parse("x/y"), DomainError);
    CHECK_THROWS_AS(Rational(1, 0), DomainError);
    CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
    CHECK(Rational(1, 3) * Rational(3, 5) == Rational(1, 5));
    CHECK(Rational(1, 3) / Rational(2, 3) == Rational(1, 2));
    CHECK(Rational(1, 3) < Rational(2, 5));
    const std::int64_t big = INT64_MAX;
    CHECK_THROWS_AS(Rational(big, 1) + Rational(big, 1), std::overflow_error);
}
