#pragma once

#include <algorithm>
#include <deque>
#include <memory>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "machine.hpp"
#include "names.hpp"
#include "rational.hpp"

namespace qstream {

// ---------------------------------------------------------------------------
// Single-input weakening edges

enum class WeakenEdge {
  RhoToLt,    // FAST:0  -> LOWER:0   p_n = q_n - 2^-n
  RhoToGt,    // FAST:0  -> UPPER:0   p_n = q_n + 2^-n
  LtToRho1,   // LOWER:0 -> FAST:1    p_n = max(q_0..q_n)
  Rho1ToLt1,  // FAST:1  -> LOWER:1   r_<i,j> = q_max(i,j), then row-max normalized
};

inline std::pair<ReprTag, ReprTag> weaken_tags(WeakenEdge edge) {
  switch (edge) {
    case WeakenEdge::RhoToLt: return {fast_tag(0), lower_tag(0)};
    case WeakenEdge::RhoToGt: return {fast_tag(0), upper_tag(0)};
    case WeakenEdge::LtToRho1: return {lower_tag(0), fast_tag(1)};
    case WeakenEdge::Rho1ToLt1: return {fast_tag(1), lower_tag(1)};
  }
  throw std::logic_error("unreachable");
}

namespace detail {

// r~_<i,j> over a convergent sequence q: q_j for j >= i, else max(q_j..q_i).
// This is q_max(i,j) after the row-max step that makes finite-window row
// infima nondecreasing in i.
inline Rational tail_max_entry(const std::function<Rational(std::size_t)>& q, Index i, Index j) {
  if (j >= i) return q(j);
  Rational best = q(j);
  for (Index k = j + 1; k <= i; ++k) best = std::max(best, q(k));
  return best;
}

}  // namespace detail

inline Transformer weaken_transformer(WeakenEdge edge) {
  const auto [in, out] = weaken_tags(edge);
  switch (edge) {
    case WeakenEdge::RhoToLt:
      return pointwise_transformer("rho-to-lt", in, out, [](const Rational& q, std::size_t n) {
        return Rational(q - pow2(-static_cast<long long>(n)));
      });
    case WeakenEdge::RhoToGt:
      return pointwise_transformer("rho-to-gt", in, out, [](const Rational& q, std::size_t n) {
        return Rational(q + pow2(-static_cast<long long>(n)));
      });
    case WeakenEdge::LtToRho1: {
      struct State {
        std::optional<Rational> best;
        std::optional<Rational> pending;
        Action step() {
          if (!pending) return ReadInput{};
          best = best ? std::max(*best, *pending) : *pending;
          pending.reset();
          return Emit{*best};
        }
        void feed(const Rational& v) { pending = v; }
      };
      return Transformer("lt-to-rho1", in, out, [] { return make_machine(State{}); });
    }
    case WeakenEdge::Rho1ToLt1: {
      // Emitting index m = <i,j> needs inputs up to max(i,j) <= m.
      struct State {
        std::vector<Rational> seen;
        std::size_t next_emit = 0;
        Action step() {
          const auto [i, j] = cantor_unpair(next_emit);
          const Index need = std::max(i, j);
          if (seen.size() <= need) return ReadInput{};
          ++next_emit;
          return Emit{detail::tail_max_entry([this](std::size_t k) { return seen[k]; }, i, j)};
        }
        void feed(const Rational& v) { seen.push_back(v); }
      };
      return Transformer("rho1-to-lt1", in, out, [] { return make_machine(State{}); });
    }
  }
  throw std::logic_error("unreachable");
}

/// Tag-checked name-level form of the weakening edges.
inline Name weaken(const Name& name, WeakenEdge edge) {
  const auto [in, out] = weaken_tags(edge);
  if (!(name.tag() == in))
    throw TagMismatch("weaken: expected " + to_string(in) + ", got " + to_string(name.tag()));
  return transduce(weaken_transformer(edge), name);
}

// ---------------------------------------------------------------------------
// Joins

/// rho == lt |x| gt: tracks the running max of the lower name and running min
/// of the upper name, emitting the midpoint once the gap is <= 2^(1-n).
/// May read unboundedly (but finitely, for valid inputs) per emit; diverges
/// on inputs violating the shared-value precondition.
inline Name join_lt_gt_to_rho(const Name& lower, const Name& upper) {
  if (!(lower.tag() == lower_tag(0)) || !(upper.tag() == upper_tag(0)))
    throw TagMismatch("join_lt_gt_to_rho: expected LOWER:0 and UPPER:0");
  struct State {
    Name lower, upper;
    std::size_t read_l = 0, read_u = 0;
    std::optional<Rational> lo, hi;
    void pull() {
      Rational l = lower.at(read_l++);
      lo = lo ? std::max(*lo, l) : l;
      Rational u = upper.at(read_u++);
      hi = hi ? std::min(*hi, u) : u;
    }
  };
  auto st = std::make_shared<State>(State{lower, upper});
  return Name(fast_tag(0), [st](std::size_t n) {
    const Rational want = pow2(1 - static_cast<long long>(n));
    if (!st->lo) st->pull();
    while (*st->hi - *st->lo > want) st->pull();
    return Rational((*st->lo + *st->hi) / 2);
  });
}

// ---------------------------------------------------------------------------
// liminf forms (Scholium directions)

enum class LimInfDirection {
  ToLower1,    // LIMINF (or strict) -> LOWER:1, via q_max(i,j) + row-max
  FromLower1,  // LOWER:1 -> LIMINF, stage-wise gap pointer (see README note)
};

namespace detail {

// Incremental running row minima of the row-max-normalized square window of
// a double-indexed stream. After stage s, row_min[i] = min_{j<=s} max_{i'<=i}
// q_{i',j} for all i <= s. The row-max step makes row_min nondecreasing in i.
class NormalizedWindow {
 public:
  explicit NormalizedWindow(Name source) : source_(std::move(source)) {}

  // Processes row/column s; requires stages in order 0,1,2,...
  void advance(std::size_t s) {
    // extend existing rows with column s, tracking the column running max
    std::optional<Rational> colmax;
    for (std::size_t i = 0; i < s; ++i) {
      Rational v = source_.at(cantor_pair(i, s));
      colmax = colmax ? std::max(*colmax, v) : v;
      row_min_[i] = std::min(row_min_[i], *colmax);
      norm_col_[i] = *colmax;  // reuse as scratch for the new row below
    }
    // build normalized row s over columns 0..s
    std::vector<Rational> row;
    row.reserve(s + 1);
    for (std::size_t j = 0; j < s; ++j)
      row.push_back(std::max(prev_row_[j], source_.at(cantor_pair(s, j))));
    {
      Rational corner = source_.at(cantor_pair(s, s));
      row.push_back(colmax ? std::max(*colmax, corner) : corner);
    }
    row_min_.push_back(*std::min_element(row.begin(), row.end()));
    prev_row_ = std::move(row);
    norm_col_.push_back(Rational());
  }

  const Rational& row_min(std::size_t i) const { return row_min_[i]; }
  std::size_t rows() const { return row_min_.size(); }

 private:
  Name source_;
  std::vector<Rational> row_min_;
  std::vector<Rational> prev_row_;  // normalized entries of the last row
  std::vector<Rational> norm_col_;  // scratch, sized with rows
};

}  // namespace detail

/// Converts between liminf names and sup-inf names.
///
/// The easy direction realizes r_<i,j> := q_max(i,j) followed by the row-max
/// step (finite-window row infima become nondecreasing in i). The hard
/// direction is a stage-wise search over running row bounds: row-max
/// normalize, emit the current pointer row's running min, and advance the
/// pointer exactly when that value sits strictly below the current staircase
/// top. Exact on eventually-settling inputs (every synthetic name here);
/// see the README derivation note for the general-input discussion.
inline Name liminf_normalize(const Name& name, LimInfDirection direction) {
  if (direction == LimInfDirection::ToLower1) {
    if (name.tag().kind != ReprKind::LimInf && name.tag().kind != ReprKind::LimInfStrict)
      throw TagMismatch("liminf_normalize: expected LIMINF input, got " + to_string(name.tag()));
    Name src = name;
    return Name(lower_tag(1), [src](std::size_t m) {
      const auto [i, j] = cantor_unpair(m);
      return detail::tail_max_entry([&src](std::size_t k) { return src.at(k); }, i, j);
    });
  }
  if (!(name.tag() == lower_tag(1)))
    throw TagMismatch("liminf_normalize: expected LOWER:1 input, got " + to_string(name.tag()));
  struct State {
    detail::NormalizedWindow window;
    std::size_t stage = 0;
    std::size_t pointer = 0;
  };
  auto st = std::make_shared<State>(State{detail::NormalizedWindow(name)});
  return Name(liminf_tag(), [st](std::size_t) {
    st->window.advance(st->stage);
    const Rational value = st->window.row_min(st->pointer);
    if (value < st->window.row_min(st->stage) && st->pointer < st->stage) ++st->pointer;
    ++st->stage;
    return value;
  });
}

// ---------------------------------------------------------------------------
// Level-1 join (rho' == lt' |x| gt')

namespace detail {

// Mirror image of NormalizedWindow for inf-sup names: running row maxima of
// the row-min-normalized window; row_max is nonincreasing in i.
class CoNormalizedWindow {
 public:
  explicit CoNormalizedWindow(Name source) : source_(std::move(source)) {}

  void advance(std::size_t s) {
    std::optional<Rational> colmin;
    for (std::size_t i = 0; i < s; ++i) {
      Rational v = source_.at(cantor_pair(i, s));
      colmin = colmin ? std::min(*colmin, v) : v;
      row_max_[i] = std::max(row_max_[i], *colmin);
    }
    std::vector<Rational> row;
    row.reserve(s + 1);
    for (std::size_t j = 0; j < s; ++j)
      row.push_back(std::min(prev_row_[j], source_.at(cantor_pair(s, j))));
    {
      Rational corner = source_.at(cantor_pair(s, s));
      row.push_back(colmin ? std::min(*colmin, corner) : corner);
    }
    row_max_.push_back(*std::max_element(row.begin(), row.end()));
    prev_row_ = std::move(row);
  }

  const Rational& row_max(std::size_t i) const { return row_max_[i]; }

 private:
  Name source_;
  std::vector<Rational> row_max_;
  std::vector<Rational> prev_row_;
};

}  // namespace detail

/// rho' == lt' |x| gt'. Stage-wise search over running row bounds: at stage
/// s, with m_h the lower window's normalized row minima and M_h the upper
/// window's normalized row maxima, emit m_h* for the largest h <= s with
/// m_h <= M_h + 2^-h. Every fixed h qualifies eventually, so h* grows
/// without bound and the emitted values converge to the joint value (they
/// lie in [t_h*, u_h* + 2^-h*], both endpoints tending there); see README.
inline Name join_level1(const Name& lower1, const Name& upper1) {
  if (!(lower1.tag() == lower_tag(1)) || !(upper1.tag() == upper_tag(1)))
    throw TagMismatch("join_level1: expected LOWER:1 and UPPER:1");
  struct State {
    detail::NormalizedWindow low;
    detail::CoNormalizedWindow high;
    std::size_t stage = 0;
  };
  auto st = std::make_shared<State>(State{detail::NormalizedWindow(lower1),
                                          detail::CoNormalizedWindow(upper1)});
  return Name(fast_tag(1), [st](std::size_t) {
    const std::size_t s = st->stage++;
    st->low.advance(s);
    st->high.advance(s);
    for (std::size_t h = s + 1; h-- > 0;) {
      if (st->low.row_min(h) <= st->high.row_max(h) + pow2(-static_cast<long long>(h)))
        return st->low.row_min(h);
    }
    return st->low.row_min(0);  // inconsistent pair: unconstrained, no crash
  });
}

}  // namespace qstream
