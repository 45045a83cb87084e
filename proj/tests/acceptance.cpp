// Acceptance criteria 1-9. Each criterion prints exactly one PASS/FAIL line;
// `--criterion N` runs a single one and exits nonzero when it fails.

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "wsal/bounds.hpp"
#include "wsal/engine.hpp"
#include "wsal/erm.hpp"
#include "wsal/errors.hpp"
#include "wsal/lab.hpp"
#include "wsal/region.hpp"

using namespace wsal;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double limit_s;  // runtime limit
  std::function<Verdict()> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Label coin_label(std::mt19937_64& g) { return g() & 1 ? Label::positive : Label::negative; }
double grid_value(std::mt19937_64& g) { return static_cast<double>(g() % 11) / 10.0; }

Point disc_point(std::mt19937_64& g) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = 0.05 + 0.95 * std::sqrt(u(g));
  const double a = 2.0 * std::numbers::pi * u(g);
  return Point::plane(r * std::cos(a), r * std::sin(a));
}

int workers() { return std::max(1, omp_get_num_procs()); }

std::vector<std::uint64_t> seed_range(std::uint64_t n) {
  std::vector<std::uint64_t> s;
  for (std::uint64_t i = 1; i <= n; ++i) s.push_back(i);
  return s;
}

InstanceSpec line_instance(WeakMode mode, double g = 0.0, double beta = 0.0) {
  InstanceSpec s;
  s.family = Family::threshold_1d;
  s.nu = 0.1;
  s.weak_mode = mode;
  s.g = g;
  s.beta = beta;
  return s;
}

AlgoConfig scaled_config() {
  AlgoConfig c = AlgoConfig::for_class(ClassId::threshold, 0.01);
  c.target_epsilon = 0.05;
  c.delta = 0.1;
  return c;
}

// 1. cons_learn reaches the constrained minimum.
Verdict constrained_erm() {
  std::mt19937_64 g(101);
  int mismatches = 0, infeasible = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const bool signed_class = trial % 2 == 1;
    const ClassId id = signed_class ? ClassId::signed_threshold : ClassId::threshold;
    std::vector<LabeledExample> data, cons;
    const std::size_t n = 1 + g() % 12;
    for (std::size_t i = 0; i < n; ++i) data.push_back({Point::line(grid_value(g)), coin_label(g)});
    const std::size_t c = g() % 4;
    for (std::size_t i = 0; i < c; ++i) cons.push_back({Point::line(grid_value(g)), coin_label(g)});
    const auto want = oracle::constrained_min_errors(data, cons, signed_class);
    try {
      const Classifier h = cons_learn(id, cons, data);
      bool ok = want.has_value() && empirical_error(h, data) == Fraction(*want, static_cast<std::int64_t>(n));
      for (const auto& e : cons) ok = ok && predict(h, e.point) == e.label;
      mismatches += !ok;
    } catch (const Infeasible&) {
      ++infeasible;
      mismatches += want.has_value();
    }
  }
  return {mismatches == 0, fmt("1000 instances, %d mismatches (%d infeasible)", mismatches, infeasible)};
}

// 2. The cost-sensitive difference ERM is feasible and optimal.
Verdict difference_erm() {
  std::mt19937_64 g(202);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const bool disc = trial % 2 == 1;
    TripleSet ts(disc ? 2 : 1);
    const std::size_t m = 1 + g() % 14;
    const double rate = u(g);
    for (std::size_t i = 0; i < m; ++i) {
      const Point p = disc ? disc_point(g) : Point::line(grid_value(g));
      const Label s = coin_label(g);
      ts.push_back({p, s, u(g) < rate ? flip(s) : s});
    }
    const std::uint64_t budget = g() % 4;
    const DifferenceClassifier h = cost_sensitive_diff_erm(disc ? ClassId::halfspace : ClassId::threshold, ts, budget);
    std::int64_t pos = 0, fn = 0;
    for (const auto& t : ts) {
      const bool p = predict(h, t.point) == Label::positive;
      pos += p;
      fn += !p && t.strong != t.weak;
    }
    const bool ok = fn <= static_cast<std::int64_t>(budget) &&
                    pos == oracle::diff_min_positives(ts, static_cast<std::int64_t>(budget));
    mismatches += !ok;
  }
  return {mismatches == 0, fmt("1000 triple sets (m <= 14), %d mismatches", mismatches)};
}

// 3. The region test agrees with enumerated disagreement-set membership.
Verdict region_iff() {
  std::mt19937_64 g(303);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int mismatches = 0, inside = 0;
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<LabeledExample> data;
    const std::size_t n = 1 + g() % 10;
    for (std::size_t i = 0; i < n; ++i) data.push_back({Point::line(grid_value(g)), coin_label(g)});
    const std::int64_t num = static_cast<std::int64_t>(g() % 5), den = 1 + static_cast<std::int64_t>(g() % 10);
    const LabeledSet s = LabeledSet::from_examples(1, data);
    for (int probe = 0; probe < 50; ++probe) {
      const Point x = Point::line(probe % 2 ? grid_value(g) : u(g) * 1.2 - 0.1);
      const bool want = oracle::in_region(data, num, den, x, false);
      inside += want;
      mismatches += in_disagreement_region(s, Fraction(num, den), x, ClassId::threshold) != want;
    }
  }
  return {mismatches == 0, fmt("25000 probes (%d inside), %d mismatches", inside, mismatches)};
}

// 4. The doubling bias estimator brackets p and its draw count.
Verdict bias_guarantee() {
  bool pass = true;
  std::string detail;
  for (double p : {0.1, 0.3, 0.7}) {
    rng::Engine e(rng::derive(rng::StreamKey{404, 0, rng::Phase::free, static_cast<std::uint64_t>(p * 10)},
                              rng::Channel::coin));
    int ok = 0;
    double draws = 0.0;
    for (int run = 0; run < 200; ++run) {
      const BiasEstimate b = estimate_bias([&] { return rng::uniform01(e) < p; }, 0.1);
      ok += b.p_hat <= p && p <= 2 * b.p_hat;
      draws += static_cast<double>(b.draws);
    }
    const double success = ok / 200.0;
    const double mean = draws / 200.0;
    const double reference = std::log(1.0 / (0.1 * p)) / (p * p);
    const double factor = mean / reference;
    pass = pass && success >= 0.85 && factor <= 10.0 && factor >= 0.1;
    detail += fmt("p=%.1f success=%.3f mean_draws=%.0f ref=%.1f (x%.1f); ", p, success, mean, reference, factor);
  }
  return {pass, detail};
}

Verdict pass_fractions(const std::vector<lab::TrialResult>& rows, std::size_t seeds, double eps,
                       const std::vector<std::string>& labels) {
  bool pass = true;
  std::string detail;
  for (std::size_t b = 0; b < labels.size(); ++b) {
    int passed = 0, errors = 0;
    double worst = 0.0;
    for (std::size_t i = 0; i < seeds; ++i) {
      const auto& r = rows[b * seeds + i];
      passed += r.passed(eps);
      errors += !r.ok();
      if (r.ok()) worst = std::max(worst, r.excess_error);
    }
    const double frac = static_cast<double>(passed) / static_cast<double>(seeds);
    pass = pass && frac >= 0.9;
    detail += fmt("%s %d/%zu pass (errors %d, worst excess %.2e); ", labels[b].c_str(), passed, seeds, errors, worst);
  }
  return {pass, detail};
}

// 5. Scaled consistency for helpful, mildly wrong and adversarial weak labelers.
Verdict consistency() {
  const std::vector<InstanceSpec> grid{line_instance(WeakMode::identical),
                                       line_instance(WeakMode::boundary_disagree, 0.05),
                                       line_instance(WeakMode::adversarial)};
  const auto rows = lab::sweep(grid, seed_range(50), scaled_config(), {}, workers());
  return pass_fractions(rows, 50, 0.05, {"identical", "boundary-disagree(g=0.05)", "adversarial"});
}

// 6. Fewer O queries than the baseline on the favorable instance.
Verdict label_savings() {
  const auto rows =
      lab::run_comparison(line_instance(WeakMode::boundary_disagree, 0.02), scaled_config(), seed_range(20), {}, workers());
  int below = 0;
  std::string ratios;
  for (const auto& r : rows) {
    below += r.ok() && r.ratio && *r.ratio < 1.0;
    ratios += r.ratio ? fmt("%.4f ", *r.ratio) : std::string("err ");
  }
  return {below >= 18, fmt("boundary-disagree(g=0.02), ratio < 1 in %d/20; ratios: %s", below, ratios.c_str())};
}

// 7. alpha on the case study and theta for both families.
Verdict geometry() {
  const double nu = 0.05, g = 0.1, r = 2 * nu + 0.05;
  const World cs = build_case_study(nu, g, 7);
  const double alpha = lab::estimate_alpha(cs, cs.best_in_class(), r, 0.0, 1'000'000);
  const bool alpha_ok = alpha <= g + 0.02;

  const std::vector<double> radii{0.01, 0.02, 0.05, 0.1, 0.2};
  InstanceSpec line;
  line.nu = 0.1;
  const World w1(line);
  InstanceSpec disc = line;
  disc.family = Family::halfspace_2d;
  const World w2(disc);
  double lo1 = INFINITY, hi1 = 0.0, hi2 = 0.0;
  for (const auto& t : lab::estimate_theta(w1, w1.best_in_class(), radii, 1'000'000)) {
    lo1 = std::min(lo1, t.theta_hat);
    hi1 = std::max(hi1, t.theta_hat);
  }
  for (const auto& t : lab::estimate_theta(w2, w2.best_in_class(), radii, 1'000'000)) hi2 = std::max(hi2, t.theta_hat);
  const bool theta1_ok = lo1 >= 0.95 && hi1 <= 1.05;
  const bool theta2_ok = hi2 <= std::sqrt(2.0) + 0.1;
  return {alpha_ok && theta1_ok && theta2_ok,
          fmt("alpha_hat=%.4f (<= %.2f: %s); theta_1d in [%.4f, %.4f] (1 +- 0.05: %s); theta_2d max %.4f (<= %.4f: %s)",
              alpha, g + 0.02, alpha_ok ? "ok" : "no", lo1, hi1, theta1_ok ? "ok" : "no", hi2, std::sqrt(2.0) + 0.1,
              theta2_ok ? "ok" : "no")};
}

// 8. Closed forms evaluated by hand in long double.
Verdict formulas() {
  std::mt19937_64 g(808);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto rel = [](double got, long double want) {
    return static_cast<double>(std::fabs((static_cast<long double>(got) - want) / want));
  };
  double worst = 0.0;
  int bad = 0;
  auto track = [&](double e) {
    worst = std::max(worst, e);
    bad += !(e <= 1e-12);
  };
  const long double e1 = std::exp(1.0L);
  for (int i = 0; i < 20; ++i) {
    const std::uint64_t n = 10 + g() % 100'000'000;
    const int d = 1 + static_cast<int>(g() % 5);
    const double delta = 1e-6 + 0.9 * u(g);
    const long double nn = static_cast<long double>(n);
    track(rel(bounds::sigma(n, d, delta),
              8.0L / nn * (2.0L * d * std::log(2.0L * e1 * nn / d) + std::log(24.0L / delta))));
    track(rel(bounds::gamma(n, delta), 4.0L / nn * std::log(2.0L / delta)));
    const long double mega = 1024.0L * 1024.0L;
    const long double n0 = 64.0L * mega * (2.0L * d * std::log(512.0L * mega) + std::log(96.0L / delta));
    track(rel(bounds::initial_sample_size_raw(delta, d), n0));
    bad += bounds::initial_sample_size(delta, d, 1.0) != static_cast<std::uint64_t>(std::ceil(n0));
    const double p = 0.001 + 0.999 * u(g);
    const double eps = std::ldexp(1.0, -static_cast<int>(1 + g() % 12));
    const int dp = 1 + static_cast<int>(g() % 4);
    const long double r = static_cast<long double>(p) / eps;
    const long double m =
        64.0L * 1024.0L * r * (dp * std::log(512.0L * 1024.0L * r) + std::log(72.0L / delta));
    track(rel(bounds::diff_classifier_sample_size_raw(p, eps, dp, delta), m));
    bad += bounds::diff_classifier_sample_size(p, eps, dp, delta, 1.0) != static_cast<std::uint64_t>(std::ceil(m));

    const double target = 0.001 + 0.998 * u(g);
    int k0 = 0;
    while (std::ldexp(1.0, -k0) > target) ++k0;
    const auto schedule = bounds::epoch_schedule(target, delta);
    bad += schedule.size() != static_cast<std::size_t>(k0) + 1;
    track(rel(schedule[0].delta, static_cast<long double>(delta) / 4.0L));
    for (std::size_t k = 1; k < schedule.size(); ++k) {
      bad += schedule[k].epsilon != std::ldexp(1.0, -static_cast<int>(k));
      const long double kp = static_cast<long double>(k) + 1.0L;
      track(rel(schedule[k].delta, static_cast<long double>(delta) / (4.0L * kp * kp)));
    }
  }
  return {bad == 0, fmt("20 tuples per formula, worst relative error %.3e, %d failures", worst, bad)};
}

// 9. Mixture oracle law and consistency against the mixture's best classifier.
Verdict mixture() {
  const double beta = 0.3;
  World w(line_instance(WeakMode::boundary_disagree, 0.05, beta));
  bool law_ok = true;
  std::string detail = "probes:";
  const double probes[] = {0.1, 0.48, 0.5, 0.52, 0.8};
  for (std::size_t i = 0; i < 5; ++i) {
    const Point x = Point::line(probes[i]);
    const double want = (1 - beta) * w.oracle_probability(x) + beta * w.weak_probability(x);
    w.select_stream(0, rng::Phase::free, i);
    constexpr int n = 20000;
    int pos = 0;
    for (int j = 0; j < n; ++j) pos += w.query_strong(x) == Label::positive;
    const double freq = pos / static_cast<double>(n);
    // 99% binomial half-width, floored at one count for the degenerate laws.
    const double ci = std::max(lab::kZ99 * std::sqrt(want * (1 - want) / n), 1.0 / n);
    law_ok = law_ok && std::abs(freq - want) <= ci;
    detail += fmt(" x=%.2f P=%.2f freq=%.4f;", probes[i], want, freq);
  }
  const double routed = static_cast<double>(w.ledger().routed_to_weak()) / static_cast<double>(w.ledger().strong_queries());
  const double rci = lab::kZ99 * std::sqrt(beta * (1 - beta) / static_cast<double>(w.ledger().strong_queries()));
  law_ok = law_ok && std::abs(routed - beta) <= rci;
  detail += fmt(" routed=%.4f;", routed);

  const auto rows = lab::sweep({line_instance(WeakMode::boundary_disagree, 0.05, beta)}, seed_range(50), scaled_config(),
                               {}, workers());
  const Verdict run = pass_fractions(rows, 50, 0.05, {"mixture(beta=0.3)"});
  return {law_ok && run.pass, detail + " " + run.detail};
}

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {1, "constrained ERM equals brute force", 10, constrained_erm},
      {2, "difference ERM optimal", 30, difference_erm},
      {3, "region test iff brute force", 60, region_iff},
      {4, "bias estimator guarantee", 60, bias_guarantee},
      {5, "scaled consistency", 600, consistency},
      {6, "label savings on favorable instance", 600, label_savings},
      {7, "alpha and theta geometry", 120, geometry},
      {8, "formula fidelity", 1, formulas},
      {9, "mixture oracle", 300, mixture},
  };
  return all;
}

bool run_one(const Criterion& c) {
  const auto start = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = c.run();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = secs < c.limit_s;
  const bool pass = v.pass && in_time;
  std::printf("criterion %d %s: %s [%.1fs of %.0fs] %s\n", c.id, pass ? "PASS" : "FAIL", c.name, secs, c.limit_s,
              v.detail.c_str());
  std::fflush(stdout);
  return pass;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: acceptance [--criterion N]\n");
      return 2;
    }
  }
  if (only < 0 || only > static_cast<int>(criteria().size())) {
    std::fprintf(stderr, "unknown criterion %d\n", only);
    return 2;
  }
  bool all = true;
  for (const auto& c : criteria()) {
    if (only == 0 || only == c.id) all = run_one(c) && all;
  }
  return all ? 0 : 1;
}
