#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "names.hpp"
#include "rational.hpp"

namespace qstream {

namespace detail {

// splitmix64; one-shot per index so producers stay random-access.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Plan for a synthetic name whose semantic value is exactly `target` under
/// `tag`. All schedule parameters are finite and recorded so property tests
/// can be exact rather than statistical.
struct SyntheticSpec {
  Rational target;
  ReprTag tag;

  std::size_t junk_len = 0;     // junk prefix length (HOTZ, FAST d=1, FAST d=2 rows)
  std::size_t settle = 0;       // index/column at which values settle exactly
  std::size_t sup_row = 0;      // first row attaining the sup/inf (level-1 double names)
  Rational oscillate_amp;       // LIMINF: 0 = settle to constant, else oscillate forever
  bool dyadic_high = false;     // BINARY of dyadic targets: pick the 1000... expansion
  std::uint64_t seed = 1;
};

namespace detail {

inline Rational junk_value(const SyntheticSpec& spec, std::size_t n) {
  const auto r = mix64(spec.seed * 0x51ed2701ULL + n);
  const long long mag = static_cast<long long>(r % 199) - 99;
  return spec.target + Rational(mag == 0 ? 17 : mag);
}

inline int sign_pattern(const SyntheticSpec& spec, std::size_t n) {
  switch (mix64(spec.seed * 0x9137ULL + n) % 3) {
    case 0: return -1;
    case 1: return 0;
    default: return 1;
  }
}

// Positive pre-settle offset, bounded by `cap` when cap > 0.
inline Rational noise_offset(const SyntheticSpec& spec, std::size_t n, const Rational& cap) {
  const auto r = mix64(spec.seed * 0xab12f3ULL + n) % 7 + 1;  // 1..7
  Rational v(static_cast<long long>(r), 8);
  return cap > 0 ? Rational(v * cap) : v;
}

inline std::vector<int> binary_digits(const Rational& x, bool dyadic_high, std::size_t count) {
  std::vector<int> digits;
  Rational cur = x;
  for (std::size_t k = 0; k < count; ++k) {
    int b;
    if (cur > 1)
      b = 1;
    else if (cur < 1)
      b = 0;
    else
      b = dyadic_high ? 1 : 0;  // exact tie: both expansions are valid
    digits.push_back(b);
    cur = 2 * (cur - b);
  }
  return digits;
}

}  // namespace detail

/// Builds the Name described by `spec`; deterministic given the spec.
inline Name make_synthetic(const SyntheticSpec& spec) {
  const Rational x = spec.target;
  switch (spec.tag.kind) {
    case ReprKind::Fast: {
      if (spec.tag.level == 0) {
        if (spec.junk_len != 0)
          throw std::invalid_argument("FAST d=0 admits no junk prefix (use HOTZ)");
        return Name(spec.tag, [spec, x](std::size_t n) {
          return Rational(x + detail::sign_pattern(spec, n) * pow2(-static_cast<long long>(n)));
        });
      }
      if (spec.tag.level == 1) {
        return Name(spec.tag, [spec, x](std::size_t n) -> Rational {
          if (n < spec.junk_len) return detail::junk_value(spec, n);
          return x + detail::sign_pattern(spec, n) * pow2(-static_cast<long long>(n));
        });
      }
      if (spec.tag.level == 2) {
        // Row i converges to x_i = x + s_i 2^-(i+1); rows settle at column
        // `settle`; iterated limit is x.
        return Name(spec.tag, [spec, x](std::size_t n) -> Rational {
          const auto [i, j] = cantor_unpair(n);
          const Rational xi =
              x + detail::sign_pattern(spec, i) * pow2(-static_cast<long long>(i) - 1);
          if (j < spec.settle) return xi + detail::noise_offset(spec, n, Rational(0));
          return xi;
        });
      }
      throw std::invalid_argument("synthetic FAST names support levels 0..2");
    }
    case ReprKind::Lower: {
      if (spec.tag.level == 0) {
        // Values < x before the settling index, exactly x at and after it.
        return Name(spec.tag, [spec, x](std::size_t n) -> Rational {
          if (n >= spec.settle) return x;
          return x - detail::noise_offset(spec, n, Rational(0)) - pow2(-static_cast<long long>(n));
        });
      }
      if (spec.tag.level == 1) {
        // Rows below sup_row have inf = x - 2^-(i+1) (attained from column
        // `settle` on); rows at/above sup_row are constant x. sup_i inf_j = x.
        return Name(spec.tag, [spec, x](std::size_t n) -> Rational {
          const auto [i, j] = cantor_unpair(n);
          if (i >= spec.sup_row) return x;
          const Rational base = x - pow2(-static_cast<long long>(i) - 1);
          if (j < spec.settle) return base + detail::noise_offset(spec, n, pow2(-static_cast<long long>(i) - 3));
          return base;
        });
      }
      throw std::invalid_argument("synthetic LOWER names support levels 0..1");
    }
    case ReprKind::Upper: {
      if (spec.tag.level == 0) {
        return Name(spec.tag, [spec, x](std::size_t n) -> Rational {
          if (n >= spec.settle) return x;
          return x + detail::noise_offset(spec, n, Rational(0)) + pow2(-static_cast<long long>(n));
        });
      }
      if (spec.tag.level == 1) {
        return Name(spec.tag, [spec, x](std::size_t n) -> Rational {
          const auto [i, j] = cantor_unpair(n);
          if (i >= spec.sup_row) return x;
          const Rational base = x + pow2(-static_cast<long long>(i) - 1);
          if (j < spec.settle) return base - detail::noise_offset(spec, n, pow2(-static_cast<long long>(i) - 3));
          return base;
        });
      }
      throw std::invalid_argument("synthetic UPPER names support levels 0..1");
    }
    case ReprKind::Hotz: {
      return Name(spec.tag, [spec, x](std::size_t n) -> Rational {
        if (n < spec.junk_len) return detail::junk_value(spec, n);
        return x + detail::sign_pattern(spec, n) * pow2(-static_cast<long long>(n));
      });
    }
    case ReprKind::Binary: {
      if (!(x > 0 && x < 2)) throw std::invalid_argument("BINARY synthetic needs x in (0,2)");
      return Name(spec.tag, [spec, x](std::size_t n) {
        return Rational(detail::binary_digits(x, spec.dyadic_high, n + 1)[n]);
      });
    }
    case ReprKind::LimInf: {
      if (spec.oscillate_amp > 0) {
        return Name(spec.tag, [spec, x](std::size_t n) -> Rational {
          return n % 2 == 0 ? x : Rational(x + spec.oscillate_amp);
        });
      }
      return Name(spec.tag, [spec, x](std::size_t n) -> Rational {
        if (n >= spec.settle) return x;
        return detail::junk_value(spec, n);
      });
    }
    case ReprKind::LimInfStrict: {
      // Dips x - 2^-n at odd indices witness "q_n < x infinitely often".
      return Name(spec.tag, [x](std::size_t n) -> Rational {
        return n % 2 == 1 ? Rational(x - pow2(-static_cast<long long>(n))) : x;
      });
    }
  }
  throw std::invalid_argument("unsupported synthetic tag");
}

/// First stream index from which a level-1 synthetic double name is exactly
/// settled on the window [0,I] x [0,J]: every pair (i,j) with i <= I, j <= J
/// appears by this index.
inline Index settled_window_bound(Index max_i, Index max_j) {
  Index bound = 0;
  for (Index i = 0; i <= max_i; ++i) bound = std::max(bound, cantor_pair(i, max_j));
  for (Index j = 0; j <= max_j; ++j) bound = std::max(bound, cantor_pair(max_i, j));
  return bound + 1;
}

}  // namespace qstream
