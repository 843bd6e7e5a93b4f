#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "recon/scenario.hpp"

#ifndef RECON_SOURCE_DIR
#error "RECON_SOURCE_DIR must be defined"
#endif

namespace recon::test {

inline std::filesystem::path source_dir() { return RECON_SOURCE_DIR; }
inline std::filesystem::path scenario_path(const std::string& name) {
  return source_dir() / "scenarios" / (name + ".json");
}
inline Scenario golden(const std::string& name) { return load_scenario_file(scenario_path(name)); }

// Fixed-seed generator shared by the property suites.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}
  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }
  template <class C>
  const auto& pick(const C& c) {
    return c[static_cast<std::size_t>(uniform(0, static_cast<int>(c.size()) - 1))];
  }
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace recon::test
