#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace tailcouple {

/// Sorted, validated non-negative loss observations. Immutable once built.
class Sample {
 public:
  static constexpr std::size_t kMinSize = 4;

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  const std::string& source() const noexcept { return source_; }

  /// j-th smallest observation, 1 <= j <= n.
  double order_statistic(std::size_t j) const;

  /// Left-continuous empirical quantile X_{ceil(n u):n}, 0 < u < 1.
  double empirical_quantile(double u) const;

  friend bool operator==(const Sample&, const Sample&) = default;

 private:
  friend Sample build_sample(std::span<const double> raw, std::string source);
  Sample(std::vector<double> sorted, std::string source)
      : values_(std::move(sorted)), source_(std::move(source)) {}

  std::vector<double> values_;
  std::string source_;
};

// Throws EmptyInput, NonFiniteValue(i), NegativeValue(i), TooFewObservations.
Sample build_sample(std::span<const double> raw, std::string source = {});

/// Reads one value per line. A non-numeric first line is treated as a header;
/// blank lines are skipped. Any later non-numeric line raises ParseError with
/// the 1-based line number as the error index.
std::vector<double> parse_csv_column(std::istream& in);
Sample read_sample_csv(const std::filesystem::path& path);

/// Writes values one per line with round-trip precision.
void write_sample_csv(std::ostream& out, std::span<const double> values);

}  // namespace tailcouple
