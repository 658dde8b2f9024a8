#include <doctest.h>

#include "quantsafe/gen.hpp"
#include "quantsafe/rational.hpp"

using namespace quantsafe;

TEST_CASE("rational normal form") {
  CHECK(Rational(2, 4) == Rational(1, 2));
  CHECK(Rational(-2, 4).num() == -1);
  CHECK(Rational(2, -4) == Rational(-1, 2));
  CHECK(Rational(2, -4).den() == 2);
  CHECK(Rational(0, 7).str() == "0");
  CHECK(Rational(7).str() == "7");
  CHECK(Rational(1, 3).str() == "1/3");
  CHECK_THROWS(Rational(1, 0));
}

TEST_CASE("rational parse") {
  CHECK(Rational::parse("3/6") == Rational(1, 2));
  CHECK(Rational::parse("-5") == Rational(-5));
  CHECK(Rational::parse("-1/2") == Rational(-1, 2));
  CHECK_THROWS(Rational::parse("x"));
  CHECK_THROWS(Rational::parse("1/0"));
}

TEST_CASE("rational arithmetic is exact on random values") {
  SplitMix64 rng(17);
  for (int i = 0; i < 1000; i++) {
    long an = (long)(rng.below(2001)) - 1000;
    long ad = (long)(rng.below(999)) + 1;
    long bn = (long)(rng.below(2001)) - 1000;
    long bd = (long)(rng.below(999)) + 1;
    Rational a(an, ad), b(bn, bd);
    CHECK((a + b) - b == a);
    if (a != Rational(0)) CHECK(a * (Rational(1) / a) == Rational(1));
  }
}

TEST_CASE("rational pow and decimal rendering") {
  CHECK(Rational(1, 2).pow(60) == Rational(mpz_class(1), mpz_class(1) << 60));
  CHECK(Rational(3, 2).decimal(2) == "1.50");
  CHECK(Rational(1, 3).decimal(3) == "0.333");
}
