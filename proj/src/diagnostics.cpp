#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "wsal/errors.hpp"
#include "wsal/lab.hpp"

namespace wsal::lab {

namespace {

constexpr double kPi = std::numbers::pi;

rng::Engine estimate_engine(const World& world, int epoch, rng::Phase phase, std::uint64_t round) {
  return rng::Engine(rng::derive(rng::StreamKey{world.spec().seed, epoch, phase, round}, rng::Channel::sampler));
}

// P(y_O != y_W | x) with the two labels drawn independently.
double disagreement_probability(const World& world, const Point& x) {
  const double o = world.strong_probability(x);
  const double w = world.weak_probability(x);
  return o * (1.0 - w) + w * (1.0 - o);
}

std::vector<double> log_grid(double r) {
  if (r >= 1.0) return {r};
  std::vector<double> g(32);
  for (int i = 0; i < 32; ++i) g[i] = r * std::pow(1.0 / r, i / 31.0);
  g.back() = 1.0;
  return g;
}

// Packed predictions of one classifier on a point list.
struct Bits {
  std::vector<std::uint64_t> words;

  static Bits of(std::size_t n) { return Bits{std::vector<std::uint64_t>((n + 63) / 64, 0)}; }
  void set(std::size_t i) { words[i / 64] |= std::uint64_t{1} << (i % 64); }
  std::int64_t differ(const Bits& o) const {
    std::int64_t c = 0;
    for (std::size_t i = 0; i < words.size(); ++i) c += std::popcount(words[i] ^ o.words[i]);
    return c;
  }
};

Bits predictions(const Classifier& h, const LabeledSet& s) {
  Bits b = Bits::of(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (predict(h, s.point(i)) == Label::positive) b.set(i);
  }
  return b;
}

std::vector<Classifier> probe_grid(ClassId id, int probes) {
  std::vector<Classifier> out;
  for (int i = 0; i <= probes; ++i) {
    if (id == ClassId::halfspace) {
      if (i < probes) out.push_back(HalfspaceClassifier{2.0 * kPi * i / probes});
    } else {
      out.push_back(ThresholdClassifier{static_cast<double>(i) / probes, 1});
    }
  }
  return out;
}

}  // namespace

double closed_form_dis_mass(ClassId id, const Classifier& h_star, double r) {
  if (r < 0.0) throw std::invalid_argument("closed_form_dis_mass: radius must be nonnegative");
  if (id == ClassId::halfspace) return std::min(1.0, 2.0 * r);
  const double t = std::clamp(std::get<ThresholdClassifier>(h_star).threshold, 0.0, 1.0);
  return std::max(0.0, std::min(1.0, t + r) - std::max(0.0, t - r));
}

std::vector<ThetaSample> estimate_theta(const World& world, const Classifier& h_star, const std::vector<double>& radii,
                                        std::uint64_t n_mc) {
  if (n_mc == 0) throw std::invalid_argument("estimate_theta: n_mc must be positive");
  rng::Engine e = estimate_engine(world, 0, rng::Phase::estimate, 1);
  std::vector<double> cost(n_mc);
  for (auto& c : cost) c = flip_cost(h_star, world.draw_point(e));
  std::sort(cost.begin(), cost.end());
  const double n = static_cast<double>(n_mc);
  std::vector<ThetaSample> out;
  for (double r : radii) {
    if (!(r > 0.0)) throw std::invalid_argument("estimate_theta: radii must be positive");
    ThetaSample s{r, 0.0, 0.0};
    for (double rp : log_grid(r)) {
      const auto inside = std::upper_bound(cost.begin(), cost.end(), rp) - cost.begin();
      s.theta_hat = std::max(s.theta_hat, static_cast<double>(inside) / n / rp);
      s.theta_exact = std::max(s.theta_exact, closed_form_dis_mass(world.class_id(), h_star, rp) / rp);
    }
    out.push_back(s);
  }
  return out;
}

double estimate_alpha(const World& world, const Classifier& h_star, double r, double eta, std::uint64_t n_mc,
                      int grid) {
  if (n_mc == 0 || grid < 1) throw std::invalid_argument("estimate_alpha: n_mc and grid must be positive");
  if (r < 0.0 || eta < 0.0) throw std::invalid_argument("estimate_alpha: r and eta must be nonnegative");
  rng::Engine e = estimate_engine(world, 0, rng::Phase::estimate, 2);
  const auto g = static_cast<std::size_t>(grid);
  const bool plane = world.dim() == 2;
  std::vector<std::uint32_t> bins;
  std::vector<double> q;
  for (std::uint64_t i = 0; i < n_mc; ++i) {
    const Point x = world.draw_point(e);
    if (flip_cost(h_star, x) > r) continue;
    const double u = plane ? axis_angle(x) / kPi : x.x;
    bins.push_back(static_cast<std::uint32_t>(std::min(g - 1, static_cast<std::size_t>(u * grid))));
    q.push_back(disagreement_probability(world, x));
  }
  std::vector<double> count, fn;
  kernels::bin_sums(bins, std::vector<double>(bins.size(), 1.0), g, count, kernels::Backend::omp);
  kernels::bin_sums(bins, q, g, fn, kernels::Backend::omp);
  // Prefix sums over the doubled bin sequence so wedges may wrap.
  std::vector<double> cp(2 * g + 1, 0.0), fp(2 * g + 1, 0.0);
  for (std::size_t i = 0; i < 2 * g; ++i) {
    cp[i + 1] = cp[i] + count[i % g];
    fp[i + 1] = fp[i] + fn[i % g];
  }
  const double n = static_cast<double>(n_mc);
  const double total_fn = fp[g];
  const double limit = eta * n + 1e-9;
  double best = cp[g];  // constant +1
  if (total_fn <= limit) best = 0.0;  // constant -1
  for (std::size_t i = 0; i < g; ++i) {
    const std::size_t max_len = plane ? g - 1 : g - i;
    for (std::size_t len = 1; len <= max_len; ++len) {
      const double pos = cp[i + len] - cp[i];
      if (pos >= best) break;  // longer windows only add mass
      if (total_fn - (fp[i + len] - fp[i]) <= limit) best = pos;
    }
  }
  return best / n;
}

DiagnosticReport check_invariants(const RunResult& run, World& world, const DiagnosticsOptions& options) {
  if (world.options().benchmark_mode) throw Unavailable("check_invariants: shadow labels are disabled");
  const ClassId id = world.class_id();
  const Classifier h_star = world.best_in_class();
  const double nu = world.best_error();
  std::vector<Classifier> probes = probe_grid(id, options.probes);
  probes.push_back(h_star);
  const std::size_t star = probes.size() - 1;
  std::vector<double> true_err;
  for (const auto& h : probes) true_err.push_back(world.exact_error(h));

  DiagnosticReport report;
  report.invariant1_margin = -std::numeric_limits<double>::infinity();
  for (std::size_t idx = 1; idx < run.states.size(); ++idx) {
    const EpochState& st = run.states[idx];
    if (!st.s_hat || !st.region) throw std::invalid_argument("check_invariants: run was made without retain_samples");
    const LabeledSet& s_hat = *st.s_hat;
    const double n = static_cast<double>(s_hat.size());
    LabeledSet s_true = s_hat;
    world.select_stream(st.k, rng::Phase::diagnostics);
    for (std::size_t i = 0; i < s_true.size(); ++i) s_true.set_label(i, world.shadow_strong_label(s_true.point(i)));

    Bits y_hat = Bits::of(s_hat.size()), y_true = Bits::of(s_hat.size());
    for (std::size_t i = 0; i < s_hat.size(); ++i) {
      if (s_hat.label(i) == Label::positive) y_hat.set(i);
      if (s_true.label(i) == Label::positive) y_true.set(i);
    }
    std::vector<Bits> pred;
    std::vector<double> err_hat, err_true;
    for (const auto& h : probes) {
      pred.push_back(predictions(h, s_hat));
      err_hat.push_back(static_cast<double>(pred.back().differ(y_hat)) / n);
      err_true.push_back(static_cast<double>(pred.back().differ(y_true)) / n);
    }

    EpochDiagnostics d;
    d.k = st.k;
    d.footnote = st.footnote;
    // Invariant 1 against h* and every probe whose true excess is at most eps_k.
    d.invariant1_margin = -std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < probes.size(); ++b) {
      if (b != star && true_err[b] - nu > st.epsilon) continue;
      for (std::size_t a = 0; a < probes.size(); ++a) {
        const double lhs = err_true[a] - err_true[b];
        const double rhs = err_hat[a] - err_hat[b] + st.epsilon / 16.0;
        d.invariant1_margin = std::max(d.invariant1_margin, lhs - rhs);
      }
    }
    d.stopping_rule_holds = st.sigma + std::sqrt(st.sigma * st.error().to_double()) <= st.epsilon / 512.0;
    d.concentration_worst = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < probes.size(); ++a) {
      for (std::size_t b = a + 1; b < probes.size(); ++b) {
        const double rho = static_cast<double>(pred[a].differ(pred[b])) / n;
        const double lhs = std::abs((err_true[a] - err_true[b]) - (true_err[a] - true_err[b]));
        d.concentration_worst = std::max(d.concentration_worst, lhs - (st.sigma + std::sqrt(st.sigma * rho)));
      }
    }
    d.invariant2_holds = d.stopping_rule_holds && d.concentration_worst <= 0.0;

    // Invariant 3 masses on the region this epoch sampled from.
    const DifferenceClassifier h_df = st.h_df.value_or(DifferenceClassifier{ConstantClassifier{Label::positive}});
    rng::Engine e = estimate_engine(world, st.k, rng::Phase::diagnostics, 1);
    std::vector<Point> xs(options.n_mc);
    for (auto& x : xs) x = world.draw_point(e);
    std::vector<std::uint8_t> mask;
    kernels::region_mask(*st.region, xs, mask, kernels::Backend::omp);
    double fn = 0.0, pos = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (!mask[i]) continue;
      if (predict(h_df, xs[i]) == Label::positive) pos += 1.0;
      else fn += disagreement_probability(world, xs[i]);
    }
    const double m = static_cast<double>(options.n_mc);
    d.fn_mass = fn / m;
    d.pos_mass = pos / m;
    d.fn_bound = st.epsilon / 64.0;
    const double r = 2.0 * nu + 2.0 * st.epsilon;  // eps_{k-1} = 2 eps_k
    const double alpha = estimate_alpha(world, h_star, r, st.epsilon / 512.0, options.n_mc);
    report.alpha_hat.push_back({r, st.epsilon / 512.0, alpha});
    d.pos_bound = 6.0 * (alpha + st.epsilon / 1024.0);
    report.invariant1_margin = std::max(report.invariant1_margin, d.invariant1_margin);
    report.epochs.push_back(d);
  }
  if (report.epochs.empty()) report.invariant1_margin = 0.0;
  report.theta_hat = estimate_theta(world, h_star, {0.01, 0.02, 0.05, 0.1, 0.2}, options.n_mc);
  return report;
}

nlohmann::json to_json(const DiagnosticReport& r) {
  nlohmann::json j;
  j["invariant1_margin"] = r.invariant1_margin;
  j["epochs"] = nlohmann::json::array();
  for (const auto& e : r.epochs) {
    j["epochs"].push_back({{"k", e.k},
                           {"invariant1_margin", e.invariant1_margin},
                           {"stopping_rule_holds", e.stopping_rule_holds},
                           {"concentration_worst", e.concentration_worst},
                           {"invariant2_holds", e.invariant2_holds},
                           {"fn_mass", e.fn_mass},
                           {"fn_bound", e.fn_bound},
                           {"pos_mass", e.pos_mass},
                           {"pos_bound", e.pos_bound},
                           {"footnote", e.footnote}});
  }
  j["theta_hat"] = nlohmann::json::array();
  for (const auto& s : r.theta_hat) {
    j["theta_hat"].push_back({{"r", s.r}, {"theta_hat", s.theta_hat}, {"theta_exact", s.theta_exact}});
  }
  j["alpha_hat"] = nlohmann::json::array();
  for (const auto& s : r.alpha_hat) j["alpha_hat"].push_back({{"r", s.r}, {"eta", s.eta}, {"alpha_hat", s.alpha_hat}});
  return j;
}

}  // namespace wsal::lab
