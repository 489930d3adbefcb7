#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "doctest.h"
#include "rocket/data.hpp"
#include "rocket/errors.hpp"

using namespace rocket;
namespace fs = std::filesystem;

namespace {

fs::path write_temp(const std::string& name, const std::string& content) {
  const fs::path dir = fs::temp_directory_path() / "rocket_data_tests";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  std::ofstream(p) << content;
  return p;
}

bool same_values(const Series& a, const Series& b, double tol) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > tol) return false;
  return true;
}

}  // namespace

TEST_CASE("reading UCR rows") {
  const auto p = write_temp("basic.tsv", "1\t0.5\t0.25\n2\t1\t2\n1\t3\t4\n");
  const Dataset d = read_ucr(p);
  CHECK(d.label_vocabulary == std::vector<std::string>{"1", "2"});
  CHECK(d.labels == std::vector<int>{0, 1, 0});
  CHECK(d.series[0] == Series{0.5, 0.25});
  CHECK(d.length_policy == LengthPolicy::fixed(2));
  CHECK(d.equal_length());
}

TEST_CASE("delimiters") {
  const Series want{1.5, -2, 3e-2};
  CHECK(read_ucr(write_temp("c.csv", "a,1.5,-2,3e-2\nb,0,0,0\n")).series[0] == want);
  CHECK(read_ucr(write_temp("w.txt", "  a  1.5 -2   3e-2\nb 0 0 0\n")).series[0] == want);
  CHECK(read_ucr(write_temp("crlf.tsv", "a\t1.5\t-2\t3e-2\r\nb\t0\t0\t0\r\n")).series[0] == want);
}

TEST_CASE("label vocabulary ordering") {
  CHECK(read_ucr(write_temp("num.tsv", "10\t1\n2\t1\n-1\t1\n2.0\t3\n")).label_vocabulary ==
        std::vector<std::string>{"-1", "2", "2.0", "10"});
  CHECK(read_ucr(write_temp("str.tsv", "b\t1\na\t1\nc\t1\n")).label_vocabulary ==
        std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("missing values and variable lengths") {
  const Dataset d = read_ucr(write_temp("miss.tsv", "1\t1\tNaN\t3\n2\t1\t\t3\n1\t1\t2\tNaN\tNaN\n2\t?\t2\t3\n"));
  CHECK(std::isnan(d.series[0][1]));
  CHECK(std::isnan(d.series[1][1]));
  CHECK(d.series[2].size() == 2);  // trailing NaNs end a shorter series
  CHECK(std::isnan(d.series[3][0]));
  CHECK(d.has_missing());
  CHECK(d.length_policy.kind == LengthPolicy::Kind::pending);
  CHECK(d.min_length() == 2);
  CHECK(d.max_length() == 3);
}

TEST_CASE("malformed input") {
  auto message = [](const fs::path& p) {
    try {
      read_ucr(p);
    } catch (const DataError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message(write_temp("bad1.tsv", "1\t2\t3\n2\tx\t4\n")).find(":2") != std::string::npos);
  CHECK(message(write_temp("bad2.tsv", "1\t2\t3\n2\n")).find(":2") != std::string::npos);
  CHECK(message(write_temp("bad3.tsv", "1\tNaN\tNaN\n")).find(":1") != std::string::npos);
  CHECK(!message(write_temp("bad4.tsv", "")).empty());
  CHECK(message(write_temp("bad5.tsv", "1\t2\t3\n2\t-inf\t4\n")).find(":2") != std::string::npos);
  CHECK_THROWS_AS(read_ucr("/nonexistent/file.tsv"), DataError);
}

TEST_CASE("train and test share a vocabulary") {
  const auto tr = write_temp("tr.tsv", "a\t1\t2\nb\t2\t3\n");
  const auto te = write_temp("te.tsv", "b\t1\t2\na\t2\t3\n");
  const auto [train, test] = load_ucr(tr, te);
  CHECK(test.label_vocabulary == train.label_vocabulary);
  CHECK(test.labels == std::vector<int>{1, 0});
  const auto bad = write_temp("te_bad.tsv", "c\t1\t2\n");
  CHECK_THROWS_AS(load_ucr(tr, bad), DataError);
}

TEST_CASE("write and read round-trip exactly") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  Dataset d;
  d.label_vocabulary = {"x", "y"};
  for (int i = 0; i < 20; ++i) {
    Series s(static_cast<std::size_t>(5 + i % 3));
    for (double& v : s) v = g(rng) * std::pow(10.0, i % 7 - 3);
    if (i == 4) s[1] = std::nan("");
    d.series.push_back(s);
    d.labels.push_back(i % 2);
  }
  const fs::path p = fs::temp_directory_path() / "rocket_data_tests" / "roundtrip.tsv";
  write_ucr(d, p);
  const Dataset back = read_ucr(p);
  REQUIRE(back.size() == d.size());
  CHECK(back.labels == d.labels);
  for (std::size_t i = 0; i < d.size(); ++i) {
    REQUIRE(back.series[i].size() == d.series[i].size());
    for (std::size_t j = 0; j < d.series[i].size(); ++j) {
      if (std::isnan(d.series[i][j]))
        CHECK(std::isnan(back.series[i][j]));
      else
        CHECK(back.series[i][j] == d.series[i][j]);
    }
  }
}

TEST_CASE("z-normalization") {
  const Series z = znormalize(Series{1, 2, 3});
  CHECK(z[0] == doctest::Approx(-1.224744871391589));
  CHECK(z[1] == doctest::Approx(0.0));
  CHECK(z[2] == doctest::Approx(1.224744871391589));
  CHECK(znormalize(Series{5, 5, 5}) == Series{0, 0, 0});
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(3.0, 7.0);
  for (int t = 0; t < 50; ++t) {
    Series s(30);
    for (double& v : s) v = g(rng);
    const Series once = znormalize(s);
    double mean = 0, var = 0;
    for (double v : once) mean += v / 30.0;
    for (double v : once) var += (v - mean) * (v - mean) / 30.0;
    CHECK(std::abs(mean) <= 1e-9);
    CHECK(std::abs(std::sqrt(var) - 1.0) <= 1e-9);
    CHECK(same_values(znormalize(once), once, 1e-9));
  }
}

TEST_CASE("missing value interpolation") {
  const double nan = std::nan("");
  CHECK(interpolate_missing(Series{1, nan, 3}) == Series{1, 2, 3});
  CHECK(interpolate_missing(Series{nan, 2, nan}) == Series{2, 2, 2});
  CHECK(same_values(interpolate_missing(Series{1, nan, nan, 4}), Series{1, 2, 3, 4}, 1e-12));
  CHECK(same_values(interpolate_missing(Series{nan, nan, 0, nan, 10, nan}), Series{0, 0, 0, 5, 10, 10}, 1e-12));
  CHECK_THROWS_AS(interpolate_missing(Series{nan, nan}), DataError);
  const Series observed{4, 8, 15, 16, 23, 42};
  CHECK(interpolate_missing(observed) == observed);
}

TEST_CASE("rescaling") {
  CHECK(same_values(rescale(Series{0, 10}, 5), Series{0, 2.5, 5, 7.5, 10}, 1e-12));
  CHECK(same_values(rescale(Series{0, 1, 2, 3, 4}, 3), Series{0, 2, 4}, 1e-12));
  const Series s{3, 1, 4, 1, 5};
  CHECK(rescale(s, 5) == s);
  CHECK(rescale(Series{7}, 3) == Series{7, 7, 7});
}

TEST_CASE("prepare fills gaps and normalizes") {
  Dataset d;
  d.series = {{1, std::nan(""), 3}, {2, 2, 2}};
  d.labels = {0, 1};
  d.label_vocabulary = {"a", "b"};
  prepare(d, false);
  CHECK(d.series[0] == Series{1, 2, 3});
  prepare(d, true);
  CHECK(d.series[1] == Series{0, 0, 0});
  CHECK(d.series[0][2] == doctest::Approx(1.224744871391589));
}

TEST_CASE("length policy resolution") {
  SUBCASE("equal length is fixed") {
    Dataset d;
    d.series = {{1, 2, 3}, {3, 2, 1}};
    d.labels = {0, 1};
    d.label_vocabulary = {"a", "b"};
    CHECK(resolve_length_policy(d) == LengthPolicy::fixed(3));
  }
  SUBCASE("too few examples fall back to rescaling") {
    Dataset d;
    for (int i = 0; i < 5; ++i) {
      d.series.push_back(Series(static_cast<std::size_t>(20 + i), 1.0));
      d.labels.push_back(i % 2);
    }
    d.label_vocabulary = {"a", "b"};
    CHECK(resolve_length_policy(d) == LengthPolicy::rescaled(24));
  }
  SUBCASE("length as the only signal favours as-is") {
    // Random smooth content sampled at 60 or 120 points: after rescaling the
    // two classes share one distribution, as-is they differ in time scale.
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> phase(0.0, 2 * std::numbers::pi), amp(0.5, 1.5);
    std::normal_distribution<double> g(0.0, 0.01);
    Dataset d;
    d.label_vocabulary = {"short", "long"};
    for (int i = 0; i < 40; ++i) {
      const int c = i % 2;
      const std::size_t len = c ? 120 : 60;
      double ph[3], a[3];
      for (int h = 0; h < 3; ++h) {
        ph[h] = phase(rng);
        a[h] = amp(rng);
      }
      Series s(len);
      for (std::size_t j = 0; j < len; ++j) {
        const double t = static_cast<double>(j) / static_cast<double>(len - 1);
        s[j] = g(rng);
        for (int h = 0; h < 3; ++h) s[j] += a[h] * std::sin(2 * std::numbers::pi * (h + 1) * t + ph[h]);
      }
      d.series.push_back(znormalize(s));
      d.labels.push_back(c);
    }
    const LengthPolicy p = resolve_length_policy(d);
    CHECK(p == LengthPolicy::as_is(120));
  }
}

TEST_CASE("applying a length policy") {
  Dataset d;
  d.series = {{1, 2, 3}, {1, 2}};
  d.labels = {0, 1};
  d.label_vocabulary = {"a", "b"};
  const Dataset r = apply_length_policy(d, LengthPolicy::rescaled(3));
  CHECK(r.series[1] == Series{1, 1.5, 2});
  CHECK(r.length_policy == LengthPolicy::rescaled(3));
  CHECK(apply_length_policy(d, LengthPolicy::as_is(3)).series == d.series);
  CHECK_THROWS_AS(apply_length_policy(d, LengthPolicy::fixed(3)), DataError);
  CHECK(to_string(LengthPolicy::Kind::as_is) == "as_is");
  CHECK(parse_length_policy_kind("rescaled") == LengthPolicy::Kind::rescaled);
}
