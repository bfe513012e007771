#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rational.hpp"

namespace qstream {

// ---------------------------------------------------------------------------
// Representation tags

enum class ReprKind {
  Fast,          // |x - q_n| <= 2^-n at level 0; d nested limits at level d
  Lower,         // x = sup q_n at level 0; sup inf ... at level d
  Upper,         // x = inf q_n at level 0; inf sup ... at level d
  Hotz,          // exists N, forall n >= N: |q_n - x| <= 2^-n
  Binary,        // digit stream of an expansion b.* over {0,1}, x in (0,2)
  LimInf,        // x = liminf q_n
  LimInfStrict,  // liminf with q_n < x for infinitely many n
};

/// Tag of a name stream. Fast/Lower/Upper carry a level d >= 0; the other
/// kinds carry none.
struct ReprTag {
  ReprKind kind = ReprKind::Fast;
  unsigned level = 0;

  friend bool operator==(const ReprTag&, const ReprTag&) = default;

  bool leveled() const {
    return kind == ReprKind::Fast || kind == ReprKind::Lower || kind == ReprKind::Upper;
  }
};

inline ReprTag fast_tag(unsigned d = 0) { return {ReprKind::Fast, d}; }
inline ReprTag lower_tag(unsigned d = 0) { return {ReprKind::Lower, d}; }
inline ReprTag upper_tag(unsigned d = 0) { return {ReprKind::Upper, d}; }
inline ReprTag hotz_tag() { return {ReprKind::Hotz, 0}; }
inline ReprTag binary_tag() { return {ReprKind::Binary, 0}; }
inline ReprTag liminf_tag() { return {ReprKind::LimInf, 0}; }
inline ReprTag liminf_strict_tag() { return {ReprKind::LimInfStrict, 0}; }

inline std::string to_string(const ReprTag& tag) {
  std::string base;
  switch (tag.kind) {
    case ReprKind::Fast: base = "FAST"; break;
    case ReprKind::Lower: base = "LOWER"; break;
    case ReprKind::Upper: base = "UPPER"; break;
    case ReprKind::Hotz: return "HOTZ";
    case ReprKind::Binary: return "BINARY";
    case ReprKind::LimInf: return "LIMINF";
    case ReprKind::LimInfStrict: return "LIMINF_STRICT";
  }
  return base + ":" + std::to_string(tag.level);
}

inline ReprTag parse_tag(std::string_view kind, unsigned level) {
  if (kind == "FAST") return fast_tag(level);
  if (kind == "LOWER") return lower_tag(level);
  if (kind == "UPPER") return upper_tag(level);
  if (kind == "HOTZ") return hotz_tag();
  if (kind == "BINARY") return binary_tag();
  if (kind == "LIMINF") return liminf_tag();
  if (kind == "LIMINF_STRICT") return liminf_strict_tag();
  throw ParseError("unknown tag kind: '" + std::string(kind) + "'");
}

struct TagMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Memoized lazy streams

/// Total lazy stream with thread-safe memoization. The producer is always
/// invoked with strictly increasing indices (0, 1, 2, ...), exactly once per
/// index, so stateful producers are safe.
template <class T>
class Stream {
 public:
  Stream() = default;
  explicit Stream(std::function<T(std::size_t)> producer)
      : state_(std::make_shared<State>(std::move(producer))) {}

  T at(std::size_t n) const {
    State& s = *state_;
    std::lock_guard<std::mutex> lock(s.mutex);
    while (s.cache.size() <= n) s.cache.push_back(s.producer(s.cache.size()));
    return s.cache[n];
  }

  std::vector<T> prefix(std::size_t n) const {
    std::vector<T> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(at(i));
    return out;
  }

  bool valid() const { return static_cast<bool>(state_); }

 private:
  struct State {
    explicit State(std::function<T(std::size_t)> p) : producer(std::move(p)) {}
    std::mutex mutex;
    std::vector<T> cache;
    std::function<T(std::size_t)> producer;
  };
  std::shared_ptr<State> state_;
};

/// A name: a lazy infinite rational stream tagged with a representation.
/// Shareable read-only handle; reads are internally synchronized.
class Name {
 public:
  Name() = default;
  Name(ReprTag tag, std::function<Rational(std::size_t)> producer)
      : tag_(tag), stream_(std::move(producer)) {}
  Name(ReprTag tag, Stream<Rational> stream) : tag_(tag), stream_(std::move(stream)) {}

  const ReprTag& tag() const { return tag_; }
  const Stream<Rational>& stream() const { return stream_; }
  Rational at(std::size_t n) const { return stream_.at(n); }
  std::vector<Rational> prefix(std::size_t n) const { return stream_.prefix(n); }

  Name retagged(ReprTag t) const { return Name(t, stream_); }

 private:
  ReprTag tag_;
  Stream<Rational> stream_;
};

inline std::vector<Rational> prefix(const Name& name, std::size_t n) { return name.prefix(n); }

inline Name constant_name(ReprTag tag, Rational value) {
  return Name(tag, [v = std::move(value)](std::size_t) { return v; });
}

/// Finite values followed by a tail rule. With no tail the producer throws
/// on exhaustion (the CLI maps this to its per-command policy).
struct StreamExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline Name name_from_values(ReprTag tag, std::vector<Rational> values, bool pad_last = false) {
  return Name(tag, [vals = std::move(values), pad_last](std::size_t n) -> Rational {
    if (n < vals.size()) return vals[n];
    if (pad_last && !vals.empty()) return vals.back();
    throw StreamExhausted("name stream exhausted at index " + std::to_string(n));
  });
}

// ---------------------------------------------------------------------------
// Finite-prefix consistency checks

/// Outcome of a necessary finite condition on a prefix. Consistent never
/// certifies validity, only non-refutation.
struct ConsistencyResult {
  enum class Kind { Consistent, Violated, NotCheckable };
  Kind kind = Kind::Consistent;
  std::size_t first = 0;   // violating index pair, valid when Violated
  std::size_t second = 0;

  static ConsistencyResult consistent() { return {Kind::Consistent, 0, 0}; }
  static ConsistencyResult violated(std::size_t a, std::size_t b) { return {Kind::Violated, a, b}; }
  static ConsistencyResult not_checkable() { return {Kind::NotCheckable, 0, 0}; }

  friend bool operator==(const ConsistencyResult&, const ConsistencyResult&) = default;
};

/// FAST d=0 uses the cross-condition |q_k - q_l| <= 2^-k + 2^-l; HOTZ checks
/// |q_n - q_k| <= 2^-n+1 for k >= n >= N under the hypothesized N. Tags with
/// no finite necessary condition report NotCheckable.
inline ConsistencyResult check_consistency(const ReprTag& tag, std::span<const Rational> prefix,
                                           std::optional<std::uint64_t> hotz_hypothesis = {}) {
  if (tag == fast_tag(0)) {
    for (std::size_t k = 0; k < prefix.size(); ++k)
      for (std::size_t l = k + 1; l < prefix.size(); ++l)
        if (rational_abs(prefix[k] - prefix[l]) > pow2(-static_cast<long long>(k)) + pow2(-static_cast<long long>(l)))
          return ConsistencyResult::violated(k, l);
    return ConsistencyResult::consistent();
  }
  if (tag.kind == ReprKind::Hotz) {
    const std::size_t start = hotz_hypothesis ? static_cast<std::size_t>(*hotz_hypothesis) : 0;
    for (std::size_t n = start; n < prefix.size(); ++n)
      for (std::size_t k = n + 1; k < prefix.size(); ++k)
        if (rational_abs(prefix[n] - prefix[k]) > pow2(-static_cast<long long>(n) + 1))
          return ConsistencyResult::violated(n, k);
    return ConsistencyResult::consistent();
  }
  if (tag.kind == ReprKind::Binary) {
    for (std::size_t n = 0; n < prefix.size(); ++n)
      if (prefix[n] != 0 && prefix[n] != 1) return ConsistencyResult::violated(n, n);
    return ConsistencyResult::consistent();
  }
  return ConsistencyResult::not_checkable();
}

}  // namespace qstream
