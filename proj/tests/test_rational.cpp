// Copyright (c) 2026 The seqpipe Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <stdexcept>

#include "seqpipe/rational.hpp"

using seqpipe::Rational;

TEST_CASE("rationals normalize on construction") {
  CHECK(Rational(6, 4) == Rational(3, 2));
  CHECK(Rational(-6, 4) == Rational(-3, 2));
  CHECK(Rational(6, -4) == Rational(-3, 2));
  CHECK(Rational(0, 7) == Rational(0));
  CHECK(Rational(5, 5).is_integer());
  CHECK_THROWS_AS(Rational(1, 0), std::domain_error);
}

TEST_CASE("arithmetic is exact") {
  Rational third(1, 3);
  CHECK(third + third + third == Rational(1));
  CHECK(Rational(1, 6) + Rational(1, 10) == Rational(4, 15));
  CHECK(Rational(7, 2) - Rational(1, 2) == Rational(3));
  CHECK(Rational(2, 3) * Rational(9, 4) == Rational(3, 2));
  CHECK(Rational(5, 7) / Rational(10, 21) == Rational(3, 2));
  CHECK(-Rational(3, 4) == Rational(-3, 4));
  CHECK_THROWS_AS(Rational(1) / Rational(0), std::domain_error);
}

TEST_CASE("comparison uses cross multiplication") {
  CHECK(Rational(1, 3) < Rational(1, 2));
  CHECK(Rational(-1, 2) < Rational(-1, 3));
  CHECK(Rational(2, 4) == Rational(1, 2));
  // Magnitudes where naive double comparison would lose precision.
  Rational a(1'000'000'000'000'000'001, 3);
  Rational b(1'000'000'000'000'000'002, 3);
  CHECK(a < b);
}

TEST_CASE("overflow throws instead of wrapping") {
  Rational big(INT64_MAX / 2);
  CHECK_THROWS_AS(big * Rational(8), std::overflow_error);
  CHECK_NOTHROW(big + big);  // exactly INT64_MAX - 1
}

TEST_CASE("parsing accepts integers, fractions and decimals") {
  CHECK(Rational::parse("42") == Rational(42));
  CHECK(Rational::parse("-42") == Rational(-42));
  CHECK(Rational::parse("3/4") == Rational(3, 4));
  CHECK(Rational::parse("-6/8") == Rational(-3, 4));
  CHECK(Rational::parse("1.5") == Rational(3, 2));
  CHECK(Rational::parse("-0.25") == Rational(-1, 4));
  CHECK_THROWS_AS(Rational::parse(""), std::invalid_argument);
  CHECK_THROWS_AS(Rational::parse("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(Rational::parse("abc"), std::invalid_argument);
  CHECK_THROWS_AS(Rational::parse("1.2.3"), std::invalid_argument);
}

TEST_CASE("string round trip") {
  CHECK(Rational(3, 2).str() == "3/2");
  CHECK(Rational(-7).str() == "-7");
  CHECK(Rational::parse(Rational(22, 7).str()) == Rational(22, 7));
}

TEST_CASE("decimal formatting rounds half away from zero") {
  CHECK(seqpipe::format_decimal(Rational(2, 3), 6) == "0.666667");
  CHECK(seqpipe::format_decimal(Rational(1, 2), 0) == "1");
  CHECK(seqpipe::format_decimal(Rational(-1, 3), 3) == "-0.333");
  CHECK(seqpipe::format_decimal(Rational(5), 2) == "5.00");
  CHECK(seqpipe::format_decimal(Rational(1, 8), 3) == "0.125");
}
