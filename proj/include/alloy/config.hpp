#pragma once

#include "alloy/estimators.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace alloy {

/// Malformed or inconsistent configuration, with a field or line/column diagnostic.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MinamiSection {
  std::vector<double> energies;
  double eta = 0;
};

struct SweepSection {
  double center = 0;
  std::vector<double> widths;
};

struct FvcSection {
  double energy = 0;
  double theta = 0;
  std::vector<int> radii;
};

struct FmbSection {
  double energy = 0;
  double epsilon = 0;
  double s = 0;
};

struct PosSection {
  double kappa = 0;
  double a = -1;
  double b = 1;
  std::vector<double> epsilons;
};

struct IdsSection {
  int L_ids = 0;
  std::size_t realizations = 0;
  double step = 1e-3;
  std::optional<PosSection> pos;
};

struct SpacingSection {
  std::string mode = "pipeline";  // pipeline, poisson or picket_fence
  IdsSection ids;
  Interval window{-5.0, 5.0};
};

struct LabConfig {
  ExperimentConfig model;  // n_samples, seed and workers are filled in by the caller
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  std::optional<MinamiSection> minami;
  std::optional<SweepSection> wegner;
  std::optional<SweepSection> two_ev;
  std::optional<FvcSection> fvc;
  std::optional<FmbSection> fmb;
  std::optional<IdsSection> ids;
  std::optional<SpacingSection> spacing;
  std::string canonical;  // sorted-key serialization
  std::string digest;     // FNV-1a 64 of `canonical`, hex
};

/// 64-bit FNV-1a as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

/// Digest of a config text: key order and whitespace do not matter.
std::string config_digest(std::string_view text);

LabConfig parse_config(std::string_view text, std::string_view source = "<config>");
LabConfig load_config(const std::filesystem::path& path);

/// Seed of the independent IDS run derived from the statistics seed.
std::uint64_t ids_seed(std::uint64_t seed);

}  // namespace alloy
