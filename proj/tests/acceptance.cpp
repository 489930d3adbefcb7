// Acceptance checks, one PASS/FAIL line per criterion.
//   acceptance [--only N]... [--data DIR]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "CLI11.hpp"
#include "oracles.hpp"
#include "rocket/bench.hpp"
#include "rocket/data.hpp"
#include "rocket/logistic.hpp"
#include "rocket/parallel.hpp"
#include "rocket/model_io.hpp"
#include "rocket/ridge.hpp"
#include "rocket/sensitivity.hpp"
#include "rocket/transform.hpp"

using namespace rocket;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

fs::path g_data = fs::path(ROCKET_DATA_DIR) / "ucr";
std::size_t g_seeds = 10;

DatasetEntry entry(const std::string& name) {
  return {name, g_data / name / (name + "_TRAIN.tsv"), g_data / name / (name + "_TEST.tsv"), {}};
}

bool available(const std::string& name) {
  const DatasetEntry e = entry(name);
  return fs::exists(e.train) && fs::exists(e.test);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// Default pipeline over datasets x seeds; returns the summary rows.
std::vector<SummaryRow> run_variants(const std::vector<Variant>& variants, const std::vector<std::string>& names) {
  ExperimentPlan plan;
  plan.variants = variants;
  for (const auto& n : names) plan.datasets.push_back(entry(n));
  plan.seeds = default_seeds(g_seeds);
  RunOptions opts;
  opts.on_cell = [](const CellResult& c) {
    if (!c.ok()) std::fprintf(stderr, "  %s/%s seed %llu failed: %s\n", c.variant.c_str(), c.dataset.c_str(),
                              static_cast<unsigned long long>(c.seed), c.error.c_str());
  };
  return summarize(run_plan(plan, opts));
}

const SummaryRow* find_row(const std::vector<SummaryRow>& rows, const std::string& v, const std::string& d) {
  for (const auto& r : rows)
    if (r.variant == v && r.dataset == d) return &r;
  return nullptr;
}

Outcome golden_accuracies() {
  struct Target {
    std::string name;
    double expected;
    double lo, hi;
  };
  const std::vector<Target> targets{{"Coffee", 1.0, 0.98, 1.0},
                                    {"GunPoint", 1.0, 0.98, 1.0},
                                    {"ECG200", 0.9060, 0.9060 - 0.04, 0.9060 + 0.04},
                                    {"ItalyPowerDemand", 0.9691, 0.9691 - 0.02, 0.9691 + 0.02},
                                    {"Wafer", 0.9983, 0.9983 - 0.01, 0.9983 + 0.01}};
  std::vector<std::string> present;
  std::string detail, missing;
  for (const auto& t : targets) {
    if (available(t.name))
      present.push_back(t.name);
    else
      missing += (missing.empty() ? "" : ",") + t.name;
  }
  const auto rows = run_variants({{"default", GeneratorConfig{}}}, present);
  bool pass = missing.empty();
  for (const auto& t : targets) {
    const SummaryRow* r = find_row(rows, "default", t.name);
    if (!r) continue;
    const bool ok = r->failures == 0 && r->mean >= t.lo - 1e-12 && r->mean <= t.hi + 1e-12;
    pass &= ok;
    detail += t.name + fmt("=%.4f (expected %.4f) ", r->mean, t.expected) + (ok ? "" : "[out of range] ");
  }
  if (!missing.empty()) detail += "dataset unavailable: " + missing;
  return {pass, detail};
}

Outcome convolution_oracle() {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> pick_len(0, 2), series_len(12, 200), pad_mode(0, 3);
  double worst = 0.0;
  std::map<std::string, int> combos;
  for (int t = 0; t < 1000; ++t) {
    const int l = 7 + 2 * pick_len(rng);
    const auto n = static_cast<std::size_t>(series_len(rng));
    const int max_d = static_cast<int>((n - 1) / static_cast<std::size_t>(l - 1));
    Kernel k;
    k.weights.resize(static_cast<std::size_t>(l));
    for (double& w : k.weights) w = g(rng);
    k.bias = g(rng);
    // alternate small, exponential-scale and maximal dilations
    const int which = t % 3;
    k.dilation = which == 0 ? 1
                 : which == 1 ? static_cast<int>(std::exp2(std::uniform_real_distribution<double>(0, std::log2(max_d))(rng)))
                              : max_d;
    k.dilation = std::clamp(k.dilation, 1, max_d);
    switch (pad_mode(rng)) {
      case 0: k.padding = 0; break;
      case 1: k.padding = k.centred_padding(); break;
      default: k.padding = std::uniform_int_distribution<int>(0, k.centred_padding())(rng); break;
    }
    ++combos[std::string(k.dilation == 1 ? "d=1" : "d>1") + (k.padding == 0 ? ",p=0" : ",p>0")];
    Series x(n);
    for (double& v : x) v = g(rng);

    const auto want = oracle::naive_convolve(x, k);
    const auto got = convolve(x, k);
    if (got.size() != want.size()) return {false, "feature map length mismatch at case " + std::to_string(t)};
    for (std::size_t i = 0; i < got.size(); ++i) worst = std::max(worst, std::abs(got[i] - want[i]));
    const FeatureMatrix f = apply_kernels(std::vector<Series>{x}, std::span<const Kernel>(&k, 1));
    worst = std::max(worst, std::abs(f.values(0, 0) - oracle::naive_ppv(want)));
    worst = std::max(worst, std::abs(f.values(0, 1) - oracle::naive_max(want)));
  }
  return {worst <= 1e-9 && combos.size() == 4,
          fmt("1000 cases, %g dilation/padding combinations, max abs error %.3g", static_cast<double>(combos.size()), worst)};
}

Outcome ridge_oracle() {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> g;
  double worst = 0.0;
  int gram = 0, svd = 0;
  for (int t = 0; t < 20; ++t) {
    const Eigen::Index n = 8 + 3 * (t % 7);
    const Eigen::Index f = t % 2 ? n * (2 + t % 3) : std::max<Eigen::Index>(2, n / (2 + t % 3));
    RowMatrix x(n, f);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = g(rng);
    x.rowwise() -= x.colwise().mean();
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>(i % 3);
    std::shuffle(labels.begin(), labels.end(), rng);
    const Eigen::MatrixXd y = one_vs_rest_targets(labels, 3);
    const RidgeSolver solver(x);
    (solver.path() == RidgeSolver::Path::gram_eigen ? gram : svd)++;
    for (double alpha : default_alpha_grid()) {
      // n explicit refits via the normal equations
      double brute = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::MatrixXd xi(n - 1, f), yi(n - 1, 3);
        for (Eigen::Index r = 0, k = 0; r < n; ++r)
          if (r != i) {
            xi.row(k) = x.row(r);
            yi.row(k++) = y.row(r);
          }
        const Eigen::RowVectorXd xm = xi.colwise().mean(), ym = yi.colwise().mean();
        const Eigen::MatrixXd xc = xi.rowwise() - xm, yc = yi.rowwise() - ym;
        Eigen::MatrixXd beta;
        if (f <= n - 1) {
          Eigen::MatrixXd a = xc.transpose() * xc;
          a.diagonal().array() += alpha;
          beta = a.ldlt().solve(xc.transpose() * yc);
        } else {
          Eigen::MatrixXd k = xc * xc.transpose();
          k.diagonal().array() += alpha;
          beta = xc.transpose() * k.ldlt().solve(yc);
        }
        const Eigen::RowVectorXd pred = (x.row(i) - xm) * beta + ym;
        brute += (y.row(i) - pred).squaredNorm();
      }
      const double closed = solver.loo_error(y, alpha);
      worst = std::max(worst, std::abs(closed - brute) / brute);
    }
  }
  return {worst <= 1e-6 && gram > 0 && svd > 0,
          fmt("20 problems (%g Gram-eigen, %g SVD) x 10 alphas, max relative error %.3g", gram, svd, worst)};
}

Outcome gradient_check() {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const Eigen::Index n = 4 + t % 9, f = 3 + t % 5, c = 2 + t % 4;
    RowMatrix x(n, f);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = g(rng);
    std::vector<int> y(static_cast<std::size_t>(n));
    for (auto& v : y) v = static_cast<int>(rng() % static_cast<std::uint64_t>(c));
    Eigen::MatrixXd w(c, f);
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = 0.5 * g(rng);
    Eigen::VectorXd b(c);
    for (Eigen::Index i = 0; i < c; ++i) b(i) = 0.5 * g(rng);
    const LossGradient lg = softmax_cross_entropy(x, y, w, b);
    const double h = 1e-6;
    auto rel = [](double a, double e) { return std::abs(a - e) / std::max({std::abs(a), std::abs(e), 1e-8}); };
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      Eigen::MatrixXd wp = w, wm = w;
      wp.data()[i] += h;
      wm.data()[i] -= h;
      const double fd =
          (softmax_cross_entropy(x, y, wp, b).loss - softmax_cross_entropy(x, y, wm, b).loss) / (2 * h);
      worst = std::max(worst, rel(lg.grad_weights.data()[i], fd));
    }
    for (Eigen::Index i = 0; i < c; ++i) {
      Eigen::VectorXd bp = b, bm = b;
      bp(i) += h;
      bm(i) -= h;
      const double fd =
          (softmax_cross_entropy(x, y, w, bp).loss - softmax_cross_entropy(x, y, w, bm).loss) / (2 * h);
      worst = std::max(worst, rel(lg.grad_biases(i), fd));
    }
  }
  return {worst <= 1e-5, fmt("20 random batches, max relative error %.3g", worst)};
}

struct Workload {
  Dataset data;
  std::vector<Kernel> kernels;
};

Workload workload(std::size_t n, std::size_t l, std::size_t k) {
  GeneratorConfig c;
  c.num_kernels = k;
  c.seed = 1;
  return {gen_synthetic(n, l, 3, 1), generate_kernels(c, l)};
}

double transform_time(const Workload& w) { return time_transform(w.data.series, w.kernels, 1, 1); }

// Median-of-3 time ratio scaled/base, with the two runs interleaved so that
// machine load affects both alike.
double time_ratio(const Workload& base, const Workload& scaled, double* base_seconds = nullptr) {
  std::vector<double> tb, ts;
  for (int r = 0; r < 3; ++r) {
    tb.push_back(transform_time(base));
    ts.push_back(transform_time(scaled));
  }
  if (base_seconds) *base_seconds = median(tb);
  return median(ts) / median(tb);
}

Outcome scaling_shape() {
  // Grow the base size until one transform takes at least a second.
  std::size_t n = 100;
  const std::size_t l = 100, k = 10'000;
  while (transform_time(workload(n, l, k)) < 1.0) n *= 2;
  double base = 0.0;
  const double rn = time_ratio(workload(n, l, k), workload(2 * n, l, k), &base);
  const double rl = time_ratio(workload(n, l, k), workload(n, 2 * l, k));
  std::size_t nk = n;
  while (transform_time(workload(nk, l, k / 10)) < 1.0) nk *= 2;
  const double rk = time_ratio(workload(nk, l, k / 10), workload(nk, l, k));
  const bool pass = rn >= 1.5 && rn <= 2.5 && rl >= 1.5 && rl <= 2.5 && rk >= 7.0 && rk <= 13.0;
  return {pass, fmt("n x2: %.2f, l x2: %.2f", rn, rl) + fmt(", k x10: %.2f (base n=%g, base time %.2f s)", rk,
                                                           static_cast<double>(n), base)};
}

Outcome sensitivity_orderings() {
  const std::vector<std::string> candidates{"Coffee",      "GunPoint",  "ECG200",   "ItalyPowerDemand",
                                            "Chinatown",   "BeetleFly", "BirdChicken", "ArrowHead",
                                            "Beef",        "FaceFour",  "BME",      "ECGFiveDays",
                                            "CBF",         "DiatomSizeReduction"};
  std::vector<std::string> names;
  for (const auto& n : candidates)
    if (available(n)) names.push_back(n);
  if (names.size() < 10) return {false, "only " + std::to_string(names.size()) + " datasets available"};

  GeneratorConfig def, ppv, mx, nodil, k100;
  ppv.feature_mode = FeatureMode::ppv_only;
  mx.feature_mode = FeatureMode::max_only;
  nodil.dilation_mode = DilationMode::none;
  k100.num_kernels = 100;
  const auto rows =
      run_variants({{"default", def}, {"ppv", ppv}, {"max", mx}, {"no_dilation", nodil}, {"k=100", k100}}, names);
  for (const auto& r : rows)
    if (r.failures) return {false, "cell failures in " + r.variant + "/" + r.dataset};

  std::size_t ppv_ge = 0, dil_ge = 0;
  for (const auto& d : names) {
    ppv_ge += find_row(rows, "ppv", d)->mean >= find_row(rows, "max", d)->mean;
    dil_ge += find_row(rows, "default", d)->mean >= find_row(rows, "no_dilation", d)->mean;
  }
  std::vector<SummaryRow> pair;
  for (const auto& r : rows)
    if (r.variant == "default" || r.variant == "k=100") pair.push_back(r);
  const auto ranks = mean_ranks(pair);
  const double r_default = ranks[0].variant == "default" ? ranks[0].mean_rank : ranks[1].mean_rank;
  const double r_k100 = ranks[0].variant == "default" ? ranks[1].mean_rank : ranks[0].mean_rank;

  const double nd = static_cast<double>(names.size());
  const bool a = ppv_ge >= 0.7 * nd, b = dil_ge >= 0.7 * nd, c = r_default < r_k100;
  return {a && b && c, fmt("%g datasets; (a) ppv>=max on %g", nd, static_cast<double>(ppv_ge)) +
                           fmt(", (b) dilation>=none on %g, (c) mean rank k=10000 %.2f", static_cast<double>(dil_ge),
                               r_default) +
                           fmt(" vs k=100 %.2f", r_k100)};
}

Outcome determinism() {
  Dataset train, test;
  if (available("GunPoint")) {
    std::tie(train, test) = load_ucr(entry("GunPoint").train, entry("GunPoint").test);
  } else {
    train = gen_synthetic(100, 150, 2, 0);
    test = gen_synthetic_test(100, 150, 2, 0);
  }
  PipelineOptions o;
  o.generator.seed = 12345;
  const RocketClassifier a = RocketClassifier::fit(train, o);
  const RocketClassifier b = RocketClassifier::fit(train, o);
  const bool bytes = to_json(a).dump() == to_json(b).dump();
  const bool preds = a.predict(test) == b.predict(test);

  TransformOptions one, four;
  one.threads = 1;
  four.threads = 4;
  Dataset prepared = test;
  prepare(prepared, true);
  const bool threads =
      apply_kernels(prepared.series, a.kernels(), one).values == apply_kernels(prepared.series, a.kernels(), four).values;
  PipelineOptions o4 = o;
  o4.threads = 4;
  const bool model_threads = to_json(RocketClassifier::fit(train, o4)).dump() == to_json(a).dump();
  return {bytes && preds && threads && model_threads,
          std::string("model bytes ") + (bytes ? "identical" : "DIFFER") + ", predictions " +
              (preds ? "identical" : "DIFFER") + ", transform threads 1 vs 4 " + (threads ? "identical" : "DIFFER") +
              ", model threads 1 vs 4 " + (model_threads ? "identical" : "DIFFER")};
}

Outcome variability() {
  const std::vector<std::string> candidates{"Coffee", "GunPoint", "ECG200", "ItalyPowerDemand", "BeetleFly",
                                            "Chinatown", "BME"};
  std::vector<std::string> names;
  for (const auto& n : candidates)
    if (available(n) && names.size() < 5) names.push_back(n);
  if (names.size() < 5) return {false, "fewer than 5 datasets available"};
  const auto rows = run_variants({{"default", GeneratorConfig{}}}, names);
  bool pass = true;
  std::string detail;
  for (const auto& r : rows) {
    pass &= r.failures == 0 && r.std <= 0.02;
    detail += r.dataset + fmt(" std=%.4f ", r.std);
  }
  return {pass, detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::vector<int> only;
  std::string data;
  std::size_t threads = 0;
  app.add_option("--only", only, "Run only these criteria")->check(CLI::Range(1, 8));
  app.add_option("--data", data, "UCR data directory");
  app.add_option("--seeds", g_seeds, "Seeds per dataset")->capture_default_str();
  app.add_option("--threads", threads, "Worker thread cap");
  CLI11_PARSE(app, argc, argv);
  if (!data.empty()) g_data = data;
  set_thread_cap(threads);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"golden accuracies", golden_accuracies},   {"convolution oracle", convolution_oracle},
      {"ridge leave-one-out oracle", ridge_oracle}, {"gradient check", gradient_check},
      {"scaling shape", scaling_shape},           {"sensitivity orderings", sensitivity_orderings},
      {"determinism", determinism},               {"variability bound", variability}};

  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %d %s: %s (%s) [%.1f s]\n", id, criteria[i].first.c_str(), o.pass ? "PASS" : "FAIL",
                o.detail.c_str(), secs);
    std::fflush(stdout);
    all &= o.pass;
  }
  return all ? 0 : 1;
}
