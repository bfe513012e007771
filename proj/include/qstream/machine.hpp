#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "names.hpp"
#include "rational.hpp"

namespace qstream {

// ---------------------------------------------------------------------------
// Actions and step machines

struct ReadInput {};
struct Emit {
  Rational value;
};
struct Internal {};

using Action = std::variant<ReadInput, Emit, Internal>;

/// One running execution of a deterministic one-way transformer. step() is
/// called repeatedly; after it returns ReadInput, the runner calls feed()
/// with the next input token before the next step(). Inputs are consumed in
/// index order, outputs appended in index order, neither is revisited.
class StepMachine {
 public:
  virtual ~StepMachine() = default;
  virtual Action step() = 0;
  virtual void feed(const Rational& value) = 0;
};

/// Immutable, sendable description of a deterministic stream transformer.
/// Each run gets a fresh StepMachine from the factory; read counts and emits
/// are first-class observables of the run.
class Transformer {
 public:
  Transformer() = default;
  Transformer(std::string id, ReprTag in, ReprTag out,
              std::function<std::unique_ptr<StepMachine>()> make)
      : id_(std::move(id)), in_(in), out_(out), make_(std::move(make)) {}

  const std::string& id() const { return id_; }
  const ReprTag& in_tag() const { return in_; }
  const ReprTag& out_tag() const { return out_; }
  std::unique_ptr<StepMachine> instantiate() const { return make_(); }
  bool valid() const { return static_cast<bool>(make_); }

 private:
  std::string id_;
  ReprTag in_, out_;
  std::function<std::unique_ptr<StepMachine>()> make_;
};

/// Convenience: a machine defined by a plain step function over a state
/// struct S. S must define `Action step(Feeder&)`-style members; see uses.
template <class S>
class LambdaMachine final : public StepMachine {
 public:
  explicit LambdaMachine(S state) : state_(std::move(state)) {}
  Action step() override { return state_.step(); }
  void feed(const Rational& v) override { state_.feed(v); }

 private:
  S state_;
};

template <class S>
std::unique_ptr<StepMachine> make_machine(S state) {
  return std::make_unique<LambdaMachine<S>>(std::move(state));
}

// ---------------------------------------------------------------------------
// Execution

/// Type-2 runs are infinite; all finite behavior is budget-truncated.
struct Budget {
  std::optional<std::uint64_t> max_steps;
  std::optional<std::uint64_t> max_emits;

  static Budget steps(std::uint64_t n) { return {n, std::nullopt}; }
  static Budget emits(std::uint64_t n) { return {std::nullopt, n}; }
  static Budget both(std::uint64_t s, std::uint64_t e) { return {s, e}; }
};

struct Trace {
  std::vector<Rational> emitted;
  std::uint64_t reads = 0;
  std::vector<std::uint64_t> read_at_emit;  // reads consumed before each emit
  std::uint64_t steps = 0;

  friend bool operator==(const Trace&, const Trace&) = default;
};

/// Input producer failure surfaces as this error, never as an emit.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline Trace run(const Transformer& t, const Name& input, const Budget& budget) {
  if (!budget.max_steps && !budget.max_emits)
    throw std::invalid_argument("run: budget must be finite");
  Trace trace;
  auto machine = t.instantiate();
  const auto exhausted = [&] {
    if (budget.max_steps && trace.steps >= *budget.max_steps) return true;
    if (budget.max_emits && trace.emitted.size() >= *budget.max_emits) return true;
    return false;
  };
  while (!exhausted()) {
    Action a = machine->step();
    ++trace.steps;
    if (std::holds_alternative<ReadInput>(a)) {
      Rational v;
      try {
        v = input.at(trace.reads);
      } catch (const StreamExhausted&) {
        throw;
      } catch (const std::exception& e) {
        throw InputError(std::string("input producer failed: ") + e.what());
      }
      ++trace.reads;
      machine->feed(v);
    } else if (auto* e = std::get_if<Emit>(&a)) {
      trace.emitted.push_back(e->value);
      trace.read_at_emit.push_back(trace.reads);
    }
  }
  return trace;
}

// ---------------------------------------------------------------------------
// Composition

namespace detail {

// Demand-driven pipeline: t2's ReadInput is served by running t1 until its
// next Emit. Composite observables: t1's reads, t2's emits.
struct ComposeState {
  std::unique_ptr<StepMachine> first, second;
  bool serving_first = false;  // true while t1 runs to produce t2's next input
  bool feed_to_first = false;  // route for the next external feed

  Action step() {
    if (!serving_first) {
      Action a = second->step();
      if (std::holds_alternative<ReadInput>(a)) {
        serving_first = true;
        return Internal{};
      }
      return a;
    }
    Action a = first->step();
    if (std::holds_alternative<ReadInput>(a)) {
      feed_to_first = true;
      return ReadInput{};
    }
    if (auto* e = std::get_if<Emit>(&a)) {
      second->feed(e->value);
      serving_first = false;
      return Internal{};
    }
    return Internal{};
  }

  void feed(const Rational& v) {
    if (feed_to_first) {
      first->feed(v);
      feed_to_first = false;
    }
  }
};

}  // namespace detail

/// Tag-checked composition. The negative example of the artifact: pipelines
/// whose intermediate tags disagree are rejected here, not at run time.
inline Transformer compose(const Transformer& t1, const Transformer& t2) {
  if (!(t1.out_tag() == t2.in_tag()))
    throw TagMismatch("compose: " + t1.id() + " emits " + to_string(t1.out_tag()) + " but " +
                      t2.id() + " consumes " + to_string(t2.in_tag()));
  auto make = [t1, t2] {
    return make_machine(detail::ComposeState{t1.instantiate(), t2.instantiate(), false, false});
  };
  return Transformer(t1.id() + ">>" + t2.id(), t1.in_tag(), t2.out_tag(), std::move(make));
}

/// Lazily applies a transformer to a name, yielding the output name. The
/// producer advances a single owned execution on demand (the stream memo
/// serializes access).
inline Name transduce(const Transformer& t, const Name& input) {
  struct Runner {
    std::unique_ptr<StepMachine> machine;
    Name input;
    std::uint64_t reads = 0;
  };
  auto runner = std::make_shared<Runner>(Runner{t.instantiate(), input, 0});
  return Name(t.out_tag(), [runner](std::size_t) -> Rational {
    for (;;) {
      Action a = runner->machine->step();
      if (std::holds_alternative<ReadInput>(a)) {
        Rational v = runner->input.at(runner->reads);
        ++runner->reads;
        runner->machine->feed(v);
      } else if (auto* e = std::get_if<Emit>(&a)) {
        return e->value;
      }
    }
  });
}

/// Pointwise transformer: reads one token, emits f(token, index), repeats.
inline Transformer pointwise_transformer(std::string id, ReprTag in, ReprTag out,
                                         std::function<Rational(const Rational&, std::size_t)> f) {
  struct State {
    std::function<Rational(const Rational&, std::size_t)> f;
    std::size_t index = 0;
    std::optional<Rational> pending;

    Action step() {
      if (!pending) return ReadInput{};
      Rational out = f(*pending, index++);
      pending.reset();
      return Emit{std::move(out)};
    }
    void feed(const Rational& v) { pending = v; }
  };
  auto make = [f = std::move(f)] { return make_machine(State{f}); };
  return Transformer(std::move(id), in, out, std::move(make));
}

inline Transformer identity_transformer(std::string id, ReprTag tag) {
  return pointwise_transformer(std::move(id), tag, tag,
                               [](const Rational& q, std::size_t) { return q; });
}

}  // namespace qstream
