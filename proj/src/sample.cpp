#include "tailcouple/sample.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string_view>

#include "tailcouple/error.hpp"
#include "tailcouple/format.hpp"

namespace tailcouple {

double Sample::order_statistic(std::size_t j) const {
  if (j < 1 || j > values_.size()) {
    throw Error(ErrorCode::RankOutOfRange,
                "rank " + std::to_string(j) + " outside [1, " +
                    std::to_string(values_.size()) + "]");
  }
  return values_[j - 1];
}

double Sample::empirical_quantile(double u) const {
  if (!(u > 0.0 && u < 1.0)) {
    throw Error(ErrorCode::ProbabilityOutOfRange,
                "quantile level must lie in (0, 1)");
  }
  const auto n = static_cast<double>(values_.size());
  auto j = static_cast<std::size_t>(std::ceil(n * u));
  j = std::clamp<std::size_t>(j, 1, values_.size());
  return values_[j - 1];
}

Sample build_sample(std::span<const double> raw, std::string source) {
  if (raw.empty()) throw Error(ErrorCode::EmptyInput, "no observations");
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!std::isfinite(raw[i])) {
      throw Error(ErrorCode::NonFiniteValue,
                  "observation " + std::to_string(i) + " is not finite", i);
    }
    if (raw[i] < 0.0) {
      throw Error(ErrorCode::NegativeValue,
                  "observation " + std::to_string(i) + " is negative", i);
    }
  }
  if (raw.size() < Sample::kMinSize) {
    throw Error(ErrorCode::TooFewObservations,
                "need at least " + std::to_string(Sample::kMinSize) +
                    " observations, got " + std::to_string(raw.size()));
  }
  std::vector<double> sorted(raw.begin(), raw.end());
  std::stable_sort(sorted.begin(), sorted.end());
  return Sample(std::move(sorted), std::move(source));
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_number(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return value;
}

}  // namespace

std::vector<double> parse_csv_column(std::istream& in) {
  std::vector<double> out;
  std::string line;
  std::size_t line_no = 0;
  bool seen_content = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto field = trim(line);
    if (field.empty()) continue;
    const auto value = parse_number(field);
    if (!value) {
      if (!seen_content) {
        seen_content = true;  // header
        continue;
      }
      throw Error(ErrorCode::ParseError,
                  "line " + std::to_string(line_no) + ": cannot parse '" +
                      std::string(field) + "' as a number",
                  line_no);
    }
    seen_content = true;
    out.push_back(*value);
  }
  return out;
}

Sample read_sample_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  const auto raw = parse_csv_column(in);
  return build_sample(raw, path.string());
}

void write_sample_csv(std::ostream& out, std::span<const double> values) {
  for (double v : values) out << format_double(v) << '\n';
}

}  // namespace tailcouple
