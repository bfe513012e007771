#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace qstream {

using Int = boost::multiprecision::cpp_int;

/// Exact arbitrary-precision fraction. Canonical form (denominator > 0,
/// gcd(|num|, den) = 1) is maintained by every operation; the core never
/// rounds.
using Rational = boost::multiprecision::cpp_rational;

/// 2^k for any integer k, exact.
inline Rational pow2(long long k) {
  if (k >= 0) return Rational(Int(1) << static_cast<unsigned>(k));
  return Rational(1, Int(1) << static_cast<unsigned>(-k));
}

inline Rational rational_abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

/// Canonical text form "p/q" with optional sign on p. Used verbatim in all
/// files and wire messages.
inline std::string to_string(const Rational& q) {
  return numerator(q).str() + "/" + denominator(q).str();
}

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parses "p/q" (canonicalizing) or a bare integer "p".
inline Rational parse_rational(std::string_view text) {
  auto bad = [&] { return ParseError("invalid rational: '" + std::string(text) + "'"); };
  if (text.empty()) throw bad();
  const auto slash = text.find('/');
  try {
    if (slash == std::string_view::npos) return Rational(Int(std::string(text)));
    const std::string num(text.substr(0, slash));
    const std::string den(text.substr(slash + 1));
    if (num.empty() || den.empty()) throw bad();
    Int d(den);
    if (d <= 0) throw bad();
    return Rational(Int(num), d);
  } catch (const std::exception&) {
    throw bad();
  }
}

// ---------------------------------------------------------------------------
// Cantor pairing. d-tuples are left-associated iterated pairs <<i,j>,k>.

using Index = std::uint64_t;

inline Index cantor_pair(Index i, Index j) {
  const Index s = i + j;
  return s * (s + 1) / 2 + j;
}

inline std::pair<Index, Index> cantor_unpair(Index n) {
  // w = floor((sqrt(8n+1)-1)/2), integer-exact via fix-up.
  Index w = static_cast<Index>((std::sqrt(8.0L * static_cast<long double>(n) + 1.0L) - 1.0L) / 2.0L);
  while (w * (w + 1) / 2 > n) --w;
  while ((w + 1) * (w + 2) / 2 <= n) ++w;
  const Index j = n - w * (w + 1) / 2;
  return {w - j, j};
}

inline Index cantor_pair3(Index i, Index j, Index k) { return cantor_pair(cantor_pair(i, j), k); }

inline std::array<Index, 3> cantor_unpair3(Index n) {
  const auto [ij, k] = cantor_unpair(n);
  const auto [i, j] = cantor_unpair(ij);
  return {i, j, k};
}

// ---------------------------------------------------------------------------

/// Rational extended with +inf/-inf sentinels. The evaluation formulas in the
/// lifting module emit these; the paper's own patch removes them again before
/// any downstream consumption.
struct ExtendedRational {
  enum class Kind { Finite, PlusInf, MinusInf };

  Kind kind = Kind::Finite;
  Rational value;  // meaningful only when finite

  ExtendedRational() = default;
  ExtendedRational(Rational v) : kind(Kind::Finite), value(std::move(v)) {}  // NOLINT

  static ExtendedRational plus_inf() { return ExtendedRational(Kind::PlusInf); }
  static ExtendedRational minus_inf() { return ExtendedRational(Kind::MinusInf); }

  bool finite() const { return kind == Kind::Finite; }

  friend bool operator==(const ExtendedRational& a, const ExtendedRational& b) {
    if (a.kind != b.kind) return false;
    return a.kind != Kind::Finite || a.value == b.value;
  }

 private:
  explicit ExtendedRational(Kind k) : kind(k) {}
};

inline std::string to_string(const ExtendedRational& e) {
  switch (e.kind) {
    case ExtendedRational::Kind::PlusInf: return "+inf";
    case ExtendedRational::Kind::MinusInf: return "-inf";
    default: return to_string(e.value);
  }
}

}  // namespace qstream
