#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "speedroute/rational.hpp"

using speedroute::Rational;
using speedroute::rational_from_double;

TEST_CASE("arithmetic is exact and normalized") {
    CHECK(Rational(1, 2) + Rational(1, 3) == Rational(5, 6));
    CHECK(Rational(7, 2) - Rational(1, 2) == Rational(3));
    CHECK(Rational(2, 3) * Rational(3, 4) == Rational(1, 2));
    CHECK(Rational(1, 2) / Rational(1, 4) == Rational(2));
    CHECK(Rational(4, 8) == Rational(1, 2));
    CHECK(Rational(3, -6) == Rational(-1, 2));
    CHECK_THROWS_AS(Rational(1, 0), std::domain_error);
    CHECK_THROWS_AS(Rational(1) / Rational(0), std::domain_error);
}

TEST_CASE("comparisons") {
    CHECK(Rational(1, 3) < Rational(1, 2));
    CHECK(Rational(-1, 2) < Rational(0));
    CHECK(Rational(7, 2) > Rational(3));
    CHECK(Rational(2, 4) <= Rational(1, 2));
    CHECK(Rational(2, 4) >= Rational(1, 2));
}

TEST_CASE("parse accepts integers, fractions, decimals and scientific form") {
    CHECK(Rational::parse("7") == Rational(7));
    CHECK(Rational::parse("-3/4") == Rational(-3, 4));
    CHECK(Rational::parse("2.5") == Rational(5, 2));
    CHECK(Rational::parse("1e-3") == Rational(1, 1000));
    CHECK(Rational::parse("1.5e2") == Rational(150));
    CHECK(Rational::parse("0.5") == Rational(1, 2));
    CHECK_THROWS_AS(Rational::parse(""), std::invalid_argument);
    CHECK_THROWS_AS(Rational::parse("abc"), std::invalid_argument);
    CHECK_THROWS_AS(Rational::parse("1/0"), std::domain_error);
}

TEST_CASE("doubles convert through their shortest decimal form") {
    CHECK(rational_from_double(0.5) == Rational(1, 2));
    CHECK(rational_from_double(0.1) == Rational(1, 10));
    CHECK(rational_from_double(3.0) == Rational(3));
    CHECK(rational_from_double(-2.25) == Rational(-9, 4));
}

TEST_CASE("mod and floor") {
    CHECK(Rational(13, 2).mod(Rational(10)) == Rational(13, 2));
    CHECK(Rational(27, 2).mod(Rational(10)) == Rational(7, 2));
    CHECK(Rational(10).mod(Rational(10)) == Rational(0));
    CHECK(Rational(7, 2).floor() == 3);
    CHECK(Rational(-7, 2).floor() == -4);
    CHECK(Rational(4).floor() == 4);
}

TEST_CASE("string form") {
    CHECK(Rational(7, 2).str() == "7/2");
    CHECK(Rational(5).str() == "5");
    CHECK(Rational(-1, 3).str() == "-1/3");
}
