#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <thread>

#include "qstream/names.hpp"
#include "qstream/synthetic.hpp"

using namespace qstream;

TEST_CASE("tag text forms") {
  CHECK(to_string(fast_tag(0)) == "FAST:0");
  CHECK(to_string(lower_tag(1)) == "LOWER:1");
  CHECK(to_string(hotz_tag()) == "HOTZ");
  CHECK(parse_tag("FAST", 2) == fast_tag(2));
  CHECK(parse_tag("LIMINF_STRICT", 0) == liminf_strict_tag());
  CHECK_THROWS_AS(parse_tag("NOPE", 0), ParseError);
}

TEST_CASE("prefixes are monotone and memoized") {
  int calls = 0;
  Name n(fast_tag(0), [&calls](std::size_t i) {
    ++calls;
    return pow2(-static_cast<long long>(i));
  });
  auto p3 = prefix(n, 3);
  CHECK(p3 == std::vector<Rational>{1, Rational(1, 2), Rational(1, 4)});
  auto p5 = prefix(n, 5);
  CHECK(std::equal(p3.begin(), p3.end(), p5.begin()));
  CHECK(calls == 5);  // each index produced once
  CHECK(prefix(constant_name(fast_tag(0), Rational(1, 3)), 3) ==
        std::vector<Rational>{Rational(1, 3), Rational(1, 3), Rational(1, 3)});
}

TEST_CASE("interleaved readers observe identical prefixes") {
  Name n(lower_tag(0), [](std::size_t i) { return Rational(static_cast<long long>(i), 7); });
  std::vector<Rational> a, b;
  std::thread ta([&] { a = n.prefix(200); });
  std::thread tb([&] { b = n.prefix(200); });
  ta.join();
  tb.join();
  CHECK(a == b);
}

TEST_CASE("value streams with finite files") {
  Name n = name_from_values(fast_tag(0), {Rational(1), Rational(1, 2)});
  CHECK(n.at(1) == Rational(1, 2));
  CHECK_THROWS_AS(n.at(2), StreamExhausted);
  Name padded = name_from_values(fast_tag(0), {Rational(1), Rational(1, 2)}, true);
  CHECK(padded.at(10) == Rational(1, 2));
}

TEST_CASE("fast-name cross condition") {
  // |q0-q1| = 1 <= 2^0 + 2^-1: consistent
  std::vector<Rational> ok{Rational(0), Rational(1)};
  CHECK(check_consistency(fast_tag(0), ok) == ConsistencyResult::consistent());
  // |q0-q1| = 2 > 3/2: violated at (0,1)
  std::vector<Rational> bad{Rational(0), Rational(2)};
  CHECK(check_consistency(fast_tag(0), bad) == ConsistencyResult::violated(0, 1));
}

TEST_CASE("hotz consistency under a hypothesized settling index") {
  // junk at 0 is ignored for N=1 but trips N=0
  std::vector<Rational> vals{Rational(5), Rational(1, 2), Rational(1, 4), Rational(1, 4)};
  auto r0 = check_consistency(hotz_tag(), vals, 0);
  CHECK(r0.kind == ConsistencyResult::Kind::Violated);
  CHECK(r0.first == 0);
  CHECK(check_consistency(hotz_tag(), vals, 1) == ConsistencyResult::consistent());
}

TEST_CASE("sup-names admit any finite prefix") {
  std::vector<Rational> any{Rational(9), Rational(-9), Rational(100)};
  CHECK(check_consistency(lower_tag(0), any) == ConsistencyResult::not_checkable());
  CHECK(check_consistency(fast_tag(1), any) == ConsistencyResult::not_checkable());
}

TEST_CASE("synthetic fast names stay within the error bound") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    SyntheticSpec spec{Rational(static_cast<long long>(seed % 9) - 4, 3), fast_tag(0)};
    spec.seed = seed;
    Name n = make_synthetic(spec);
    for (std::size_t k = 0; k < 24; ++k)
      CHECK(rational_abs(n.at(k) - spec.target) <= pow2(-static_cast<long long>(k)));
    CHECK(check_consistency(fast_tag(0), n.prefix(24)) == ConsistencyResult::consistent());
  }
}

TEST_CASE("synthetic fast name of zero via halving") {
  // the constant-sign pattern: q_n = 2^-n names 0
  Name n(fast_tag(0), [](std::size_t k) { return pow2(-static_cast<long long>(k)); });
  CHECK(n.at(0) == 1);
  CHECK(n.at(3) == Rational(1, 8));
}

TEST_CASE("synthetic lower names settle exactly") {
  SyntheticSpec spec{Rational(1, 3), lower_tag(0)};
  spec.settle = 6;
  Name n = make_synthetic(spec);
  Rational best(-1000000);
  for (std::size_t k = 0; k < 6; ++k) {
    CHECK(n.at(k) < spec.target);
    best = std::max(best, n.at(k));
  }
  for (std::size_t k = 6; k < 12; ++k) CHECK(n.at(k) == spec.target);
}

TEST_CASE("synthetic double lower names attain the sup at the recorded window") {
  SyntheticSpec spec{Rational(2, 7), lower_tag(1)};
  spec.sup_row = 3;
  spec.settle = 4;
  Name n = make_synthetic(spec);
  const Index I = 3, J = 4;
  Rational supinf(-1000000);
  for (Index i = 0; i <= I; ++i) {
    Rational rowmin;
    bool first = true;
    for (Index j = 0; j <= J; ++j) {
      Rational v = n.at(cantor_pair(i, j));
      rowmin = first ? v : std::min(rowmin, v);
      first = false;
    }
    supinf = std::max(supinf, rowmin);
  }
  CHECK(supinf == spec.target);
}

TEST_CASE("synthetic constant double name of one") {
  SyntheticSpec spec{Rational(1), lower_tag(1)};
  spec.sup_row = 0;  // constant from row 0
  Name n = make_synthetic(spec);
  for (std::size_t m = 0; m < 32; ++m) CHECK(n.at(m) == 1);
}

TEST_CASE("synthetic hotz names have junk then fast tail") {
  SyntheticSpec spec{Rational(1, 3), hotz_tag()};
  spec.junk_len = 4;
  spec.seed = 11;
  Name n = make_synthetic(spec);
  for (std::size_t k = 4; k < 20; ++k)
    CHECK(rational_abs(n.at(k) - spec.target) <= pow2(-static_cast<long long>(k)));
  auto pref = n.prefix(20);
  CHECK(check_consistency(hotz_tag(), pref, 4) == ConsistencyResult::consistent());
}

TEST_CASE("synthetic binary digits of one third") {
  SyntheticSpec spec{Rational(1, 3), binary_tag()};
  Name n = make_synthetic(spec);
  // 1/3 in (0,2): leading 0 then 010101...
  std::vector<Rational> expect{0, 0, 1, 0, 1, 0, 1, 0, 1};
  CHECK(n.prefix(9) == expect);
}

TEST_CASE("synthetic binary digits of dyadic targets") {
  SyntheticSpec lo{Rational(1), binary_tag()};
  CHECK(make_synthetic(lo).prefix(4) == std::vector<Rational>{0, 1, 1, 1});
  SyntheticSpec hi{Rational(1), binary_tag()};
  hi.dyadic_high = true;
  CHECK(make_synthetic(hi).prefix(4) == std::vector<Rational>{1, 0, 0, 0});
}

TEST_CASE("unsupported synthetic combinations error") {
  SyntheticSpec bad{Rational(1, 3), fast_tag(0)};
  bad.junk_len = 2;
  CHECK_THROWS_AS(make_synthetic(bad), std::invalid_argument);
  SyntheticSpec deep{Rational(1, 3), fast_tag(3)};
  CHECK_THROWS_AS(make_synthetic(deep), std::invalid_argument);
  SyntheticSpec binbad{Rational(3), binary_tag()};
  CHECK_THROWS_AS(make_synthetic(binbad), std::invalid_argument);
}
