#pragma once

#include <array>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "projbandit/decision_sets.hpp"
#include "projbandit/environment.hpp"
#include "projbandit/linalg.hpp"

namespace projbandit {

inline constexpr int kWineFeatureCount = 11;
inline constexpr int kWineArmDim = 13;
inline constexpr int kWineArmsPerTrial = 200;
inline constexpr int kWineMinQuality = 4;
inline constexpr int kWineMaxQuality = 8;
inline constexpr double kWineCorruptionScale = 4.0;

struct WineRecord {
  std::array<double, kWineFeatureCount> features{};
  int quality = 0;
};

/// Malformed input; `line()` is 1-based (the header is line 1), 0 when the
/// error is not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads the semicolon-separated wine-quality file: one header row, then 11
/// physicochemical columns and an integer "quality" column.
std::vector<WineRecord> load_wine_csv(const std::filesystem::path& path);
std::vector<WineRecord> parse_wine_csv(std::istream& in, const std::string& source = "<stream>");

struct WineInstance {
  FiniteSet set;
  std::vector<TabularArm> arms;
  Projector projector;
};

struct WineOptions {
  /// Standardize each physicochemical column over `records` before use.
  bool standardize = false;
};

/// Samples 200 wines rated 4..8 without replacement and builds 13-d arms
/// [features(11), 1, protected], where protected ~ U(0,1). The observed value
/// is quality - 4 * protected and the projection value is quality. The
/// projector keeps the first 12 coordinates.
WineInstance build_wine_decision_set(const std::vector<WineRecord>& records, Rng& rng,
                                     const WineOptions& options = {});

}  // namespace projbandit
