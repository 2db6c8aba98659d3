#include "tailcouple/parse.hpp"

#include <charconv>
#include <map>
#include <string>

#include "tailcouple/error.hpp"

namespace tailcouple {

namespace {

struct SpecParts {
  std::string name;
  std::map<std::string, double, std::less<>> params;
};

[[noreturn]] void fail(std::string_view what, std::string_view text) {
  throw Error(ErrorCode::ParseError,
              std::string(what) + " '" + std::string(text) + "'");
}

SpecParts split_spec(std::string_view text) {
  SpecParts parts;
  const auto colon = text.find(':');
  parts.name = std::string(text.substr(0, colon));
  if (parts.name.empty()) fail("missing name in spec", text);
  if (colon == std::string_view::npos) return parts;

  std::string_view rest = text.substr(colon + 1);
  if (rest.empty()) fail("empty parameter list in spec", text);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = rest.substr(0, comma);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0) fail("expected key=value in spec", text);
    const std::string key(item.substr(0, eq));
    if (parts.params.count(key)) fail("duplicate parameter in spec", text);
    parts.params.emplace(key, parse_number(item.substr(eq + 1)));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
    if (rest.empty()) fail("trailing comma in spec", text);
  }
  return parts;
}

double require(const SpecParts& p, std::string_view key, std::string_view text) {
  const auto it = p.params.find(key);
  if (it == p.params.end()) fail("missing parameter '" + std::string(key) + "' in", text);
  return it->second;
}

void expect_keys(const SpecParts& p, std::size_t count, std::string_view text) {
  if (p.params.size() != count) fail("unexpected parameters in spec", text);
}

// Domain errors from the factories are reported as parse errors naming the text.
template <class F>
auto build(std::string_view text, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) throw;
    throw Error(ErrorCode::ParseError,
                std::string("invalid spec '") + std::string(text) + "': " + e.what());
  }
}

}  // namespace

double parse_number(std::string_view text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || text.empty()) fail("not a number:", text);
  return v;
}

Distortion parse_distortion(std::string_view text) {
  const auto p = split_spec(text);
  return build(text, [&] {
    if (p.name == "mean") {
      expect_keys(p, 0, text);
      return Distortion::identity();
    }
    if (p.name == "pht") {
      expect_keys(p, 1, text);
      return Distortion::pht(require(p, "rho", text));
    }
    if (p.name == "cte") {
      expect_keys(p, 1, text);
      return Distortion::cte(require(p, "t", text));
    }
    fail("unknown measure", text);
  });
}

Transform parse_transform(std::string_view text) {
  const auto p = split_spec(text);
  return build(text, [&] {
    if (p.name == "identity") {
      expect_keys(p, 0, text);
      return Transform::identity();
    }
    if (p.name == "power") {
      expect_keys(p, 1, text);
      return Transform::power(require(p, "beta", text));
    }
    fail("unknown transform", text);
  });
}

MeasureSpec parse_measure(std::string_view measure, std::string_view transform) {
  MeasureSpec spec{parse_distortion(measure), parse_transform(transform), std::string(measure)};
  if (transform != "identity") spec.label += "|" + std::string(transform);
  return spec;
}

Coupling parse_coupling(std::string_view text) {
  const auto p = split_spec(text);
  return build(text, [&] {
    if (p.name == "first") {
      expect_keys(p, 0, text);
      return Coupling::first();
    }
    if (p.name == "ratio") {
      expect_keys(p, 0, text);
      return Coupling::ratio();
    }
    if (p.name == "zenga") {
      expect_keys(p, 1, text);
      return Coupling::zenga(require(p, "p", text));
    }
    fail("unknown coupling", text);
  });
}

DistributionModel parse_model(std::string_view text) {
  const auto p = split_spec(text);
  return build(text, [&] {
    if (p.name == "pareto") {
      expect_keys(p, 1, text);
      return DistributionModel::pareto(require(p, "gamma", text));
    }
    if (p.name == "burr") {
      expect_keys(p, 2, text);
      return DistributionModel::burr(require(p, "lambda", text), require(p, "tau", text));
    }
    if (p.name == "frechet") {
      expect_keys(p, 1, text);
      return DistributionModel::frechet(require(p, "gamma", text));
    }
    fail("unknown model", text);
  });
}

KChoice parse_k(std::string_view text) {
  KChoice choice;
  if (text == "auto") return choice;
  if (text == "scan") {
    choice.policy = KPolicy::stability_scan();
    return choice;
  }
  if (!text.empty() && text.find_first_not_of("0123456789") == std::string_view::npos) {
    std::size_t k = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), k);
    if (ec != std::errc{} || ptr != text.data() + text.size() || k == 0) {
      fail("invalid k", text);
    }
    choice.fixed = k;
    return choice;
  }
  const auto p = split_spec(text);
  if (p.name == "fraction") {
    expect_keys(p, 1, text);
    const double c = require(p, "c", text);
    if (!(c > 0.0 && c < 1.0)) fail("k fraction must lie in (0, 1):", text);
    choice.policy = KPolicy::fixed_fraction(c);
    return choice;
  }
  if (p.name == "power") {
    expect_keys(p, 1, text);
    const double a = require(p, "a", text);
    if (!(a > 0.0 && a < 1.0)) fail("k exponent must lie in (0, 1):", text);
    choice.policy = KPolicy::power_law(a);
    return choice;
  }
  fail("unknown k policy", text);
}

std::size_t KChoice::resolve(const Sample& s, const Transform& h) const {
  if (fixed) return *fixed;
  return select_k(s, policy, h);
}

}  // namespace tailcouple
