#pragma once

// Minimal property-testing harness: a seeded generator, a case loop that stops at the
// first counterexample, and a report that says which case failed and how.

#include <cstdint>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace prop {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t below(std::uint64_t n) { return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(eng_); }
  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(eng_);
  }
  bool coin() { return below(2) == 1; }

  template <class T>
  const T& pick(const std::vector<T>& xs) {
    return xs[below(xs.size())];
  }

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

struct Result {
  std::string name;
  std::size_t cases = 0;
  bool passed = true;
  std::string counterexample;

  std::string summary() const {
    std::ostringstream os;
    os << name << ": " << cases << " cases, " << (passed ? "ok" : "FAILED: " + counterexample);
    return os.str();
  }
};

/// Runs `body(rng, why)` for `cases` cases; body returns false (and may fill `why`) on a
/// counterexample. Exceptions count as counterexamples.
inline Result check(std::string name, std::size_t cases, std::uint64_t seed,
                    const std::function<bool(Rng&, std::string&)>& body) {
  Result r{std::move(name), 0, true, {}};
  Rng rng(seed);
  for (std::size_t i = 0; i < cases; ++i) {
    std::string why;
    bool ok = false;
    try {
      ok = body(rng, why);
    } catch (const std::exception& e) {
      why = std::string("exception: ") + e.what();
    }
    ++r.cases;
    if (!ok) {
      r.passed = false;
      r.counterexample = "case " + std::to_string(i) + " (seed " + std::to_string(seed) + "): " + why;
      return r;
    }
  }
  return r;
}

}  // namespace prop
