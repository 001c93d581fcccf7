#include "projbandit/wine.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <string_view>

namespace projbandit {

namespace {

constexpr std::size_t kColumns = kWineFeatureCount + 1;
// Protected values live on a 2^-40 grid so that quality - 4 p is exact.
constexpr int kProtectedBits = 40;

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '"' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::string where(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line) + ": ";
}

double parse_number(std::string_view field, const std::string& source, std::size_t line,
                    std::size_t column) {
  const auto f = trim(field);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
  if (ec != std::errc() || ptr != f.data() + f.size() || f.empty() || !std::isfinite(value)) {
    throw ParseError(where(source, line) + "column " + std::to_string(column + 1) +
                         ": not a finite number: '" + std::string(f) + "'",
                     line);
  }
  return value;
}

}  // namespace

std::vector<WineRecord> parse_wine_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError(source + ": empty file, expected a header row", 0);
  ++line_no;
  const auto header = split(line, ';');
  if (header.size() != kColumns) {
    throw ParseError(where(source, line_no) + "header has " + std::to_string(header.size()) +
                         " columns, expected " + std::to_string(kColumns),
                     line_no);
  }
  if (trim(header.back()) != "quality") {
    throw ParseError(where(source, line_no) + "last header column must be \"quality\"", line_no);
  }

  std::vector<WineRecord> records;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line, ';');
    if (fields.size() != kColumns) {
      throw ParseError(where(source, line_no) + "expected " + std::to_string(kColumns) +
                           " fields, found " + std::to_string(fields.size()),
                       line_no);
    }
    WineRecord rec;
    for (std::size_t j = 0; j < kWineFeatureCount; ++j) {
      rec.features[j] = parse_number(fields[j], source, line_no, j);
    }
    const double q = parse_number(fields.back(), source, line_no, kColumns - 1);
    if (q != std::floor(q) || q < 0.0 || q > 10.0) {
      throw ParseError(where(source, line_no) + "quality must be an integer in [0, 10]", line_no);
    }
    rec.quality = static_cast<int>(q);
    records.push_back(rec);
  }
  return records;
}

std::vector<WineRecord> load_wine_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open wine data file '" + path.string() + "'", 0);
  return parse_wine_csv(in, path.string());
}

WineInstance build_wine_decision_set(const std::vector<WineRecord>& records, Rng& rng,
                                     const WineOptions& options) {
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const int q = records[i].quality;
    if (q >= kWineMinQuality && q <= kWineMaxQuality) eligible.push_back(i);
  }
  if (eligible.size() < static_cast<std::size_t>(kWineArmsPerTrial)) {
    throw InsufficientDataError("wine data has " + std::to_string(eligible.size()) +
                                " records rated " + std::to_string(kWineMinQuality) + ".." +
                                std::to_string(kWineMaxQuality) + ", need " +
                                std::to_string(kWineArmsPerTrial));
  }

  std::array<double, kWineFeatureCount> mean{};
  std::array<double, kWineFeatureCount> scale{};
  scale.fill(1.0);
  if (options.standardize) {
    const double n = static_cast<double>(records.size());
    for (const auto& r : records) {
      for (int j = 0; j < kWineFeatureCount; ++j) mean[j] += r.features[j] / n;
    }
    std::array<double, kWineFeatureCount> var{};
    for (const auto& r : records) {
      for (int j = 0; j < kWineFeatureCount; ++j) {
        const double dlt = r.features[j] - mean[j];
        var[j] += dlt * dlt / n;
      }
    }
    for (int j = 0; j < kWineFeatureCount; ++j) scale[j] = var[j] > 0.0 ? std::sqrt(var[j]) : 1.0;
  }

  // Partial Fisher-Yates: the first 200 slots become a uniform sample.
  for (std::size_t i = 0; i < static_cast<std::size_t>(kWineArmsPerTrial); ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, eligible.size() - 1);
    std::swap(eligible[i], eligible[pick(rng)]);
  }

  std::uniform_int_distribution<std::uint64_t> grid(0, (std::uint64_t{1} << kProtectedBits) - 1);
  const double grid_step = std::ldexp(1.0, -kProtectedBits);

  std::vector<Vector> vectors;
  std::vector<TabularArm> arms;
  vectors.reserve(kWineArmsPerTrial);
  arms.reserve(kWineArmsPerTrial);
  for (int a = 0; a < kWineArmsPerTrial; ++a) {
    const auto& rec = records[eligible[static_cast<std::size_t>(a)]];
    Vector x(kWineArmDim);
    for (int j = 0; j < kWineFeatureCount; ++j) x(j) = (rec.features[j] - mean[j]) / scale[j];
    const double protected_value = static_cast<double>(grid(rng)) * grid_step;
    x(kWineFeatureCount) = 1.0;
    x(kWineArmDim - 1) = protected_value;
    const double quality = rec.quality;
    arms.push_back(TabularArm{x, quality - kWineCorruptionScale * protected_value, quality});
    vectors.push_back(std::move(x));
  }
  return WineInstance{FiniteSet(std::move(vectors)), std::move(arms),
                      diagonal_projector(kWineArmDim, kWineArmDim - 1)};
}

}  // namespace projbandit
