#include "wsal/engine.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "wsal/erm.hpp"

namespace wsal {

std::string to_string(EpsilonPassMode m) { return m == EpsilonPassMode::main_text ? "main-text" : "appendix"; }

EpsilonPassMode pass_mode_from_string(const std::string& s) {
  if (s == "main-text") return EpsilonPassMode::main_text;
  if (s == "appendix") return EpsilonPassMode::appendix;
  throw std::invalid_argument("unknown epsilon pass mode: " + s);
}

AlgoConfig AlgoConfig::for_class(ClassId id, double scale) {
  AlgoConfig c;
  c.bound_params.d = vc_dimension(id);
  c.bound_params.d_prime = difference_vc_dimension(id);
  c.bound_params.constant_scale = scale;
  return c;
}

void AlgoConfig::validate() const {
  if (!(target_epsilon > 0.0)) throw std::invalid_argument("AlgoConfig: target_epsilon must be > 0");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("AlgoConfig: delta must lie in (0,1)");
  bound_params.validate();
  if (max_unlabeled == 0) throw std::invalid_argument("AlgoConfig: max_unlabeled must be positive");
  if (max_doubling_t < 1 || max_doubling_t > 40) throw std::invalid_argument("AlgoConfig: max_doubling_t must lie in [1,40]");
}

BiasEstimate estimate_bias(const std::function<bool()>& coin, double delta, const BiasOptions& options) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("estimate_bias: delta must lie in (0,1)");
  BiasEstimate out;
  for (int i = 1; i < 63; ++i) {
    const std::uint64_t n = std::uint64_t{1} << i;
    if (out.draws + n > options.max_draws) {
      throw BudgetExhausted("estimate_bias: draw cap reached before the stopping rule fired");
    }
    std::uint64_t heads = 0;
    for (std::uint64_t j = 0; j < n; ++j) heads += coin();
    out.draws += n;
    out.stages = i;
    const double nn = static_cast<double>(n);
    const double freq = static_cast<double>(heads) / nn;
    out.empirical = freq;
    const double radius = std::sqrt(4.0 * std::log(4.0 * nn / delta) / nn);
    if (radius <= freq / 3.0) {
      out.p_hat = 2.0 * freq / 3.0;
      return out;
    }
    if (options.ucb_floor > 0.0) {
      // Normalized Chernoff bound at stage i with confidence delta / 2^i.
      const double g = bounds::gamma(n, std::ldexp(delta, -i));
      const double ucb = freq + std::sqrt(freq * g) + g;
      if (ucb < options.ucb_floor) {
        out.below_floor = true;
        out.p_hat = ucb;
        return out;
      }
    }
  }
  throw BudgetExhausted("estimate_bias: stage counter overflow");
}

DifferenceTraining train_difference_classifier(World& world, const DisagreementRegion& region, double epsilon,
                                               double delta, const AlgoConfig& config, int epoch) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("train_difference_classifier: epsilon must be > 0");
  DifferenceTraining out;
  out.triples = TripleSet(world.dim());
  world.ledger().enter(epoch, Bucket::difference);

  world.select_stream(epoch, rng::Phase::bias);
  BiasOptions bias_options;
  bias_options.max_draws = config.max_unlabeled;
  bias_options.ucb_floor = epsilon / 64.0;
  out.bias = estimate_bias([&] { return region.contains(world.sample_unlabeled()); }, delta / 3.0, bias_options);
  if (out.bias.below_floor) {
    out.footnote = true;
    out.h_df = ConstantClassifier{Label::positive};
    return out;
  }

  const double p_hat = out.bias.p_hat;
  out.m = bounds::diff_classifier_sample_size(std::min(p_hat, 1.0), epsilon, config.bound_params.d_prime, delta,
                                              config.bound_params.constant_scale);
  world.select_stream(epoch, rng::Phase::difference);
  out.triples.reserve(out.m);
  std::uint64_t draws = 0;
  while (out.triples.size() < out.m) {
    if (++draws > config.max_unlabeled) {
      throw BudgetExhausted("train_difference_classifier: unlabeled cap reached while collecting in-region points");
    }
    const Point x = world.sample_unlabeled();
    if (!region.contains(x)) {
      ++out.rejected;
      continue;
    }
    const Label strong = world.query_strong(x);
    const Label weak = world.query_weak(x);
    out.triples.push_back({x, strong, weak});
  }
  out.fn_budget = static_cast<std::uint64_t>(
      std::floor(static_cast<double>(out.m) * epsilon / (256.0 * p_hat)));
  out.h_df = cost_sensitive_diff_erm(region.class_id(), out.triples, out.fn_budget);
  return out;
}

AdaptiveResult adaptive_active_learn(World& world, const DisagreementRegion& region, const DifferenceClassifier& h_df,
                                     double epsilon, double delta, const AlgoConfig& config, int epoch) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("adaptive_active_learn: epsilon must be > 0");
  world.ledger().enter(epoch, Bucket::adaptive);
  const Classifier& h_prev = region.erm();
  const ClassId id = region.class_id();
  const int d = config.bound_params.d;
  const double scale = config.bound_params.constant_scale;
  const double target = epsilon / 512.0;

  AdaptiveResult out;
  for (int t = 1;; ++t) {
    if (t > config.max_doubling_t) throw DoublingCapExceeded("adaptive_active_learn: doubling cap reached");
    const std::uint64_t n = std::uint64_t{1} << t;
    const double delta_t = delta / (static_cast<double>(t) * (t + 1));
    world.select_stream(epoch, rng::Phase::adaptive, static_cast<std::uint64_t>(t));

    LabeledSet s(world.dim());
    s.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
      const Point x = world.sample_unlabeled();
      Label y;
      if (!region.contains(x)) {
        y = predict(h_prev, x);
      } else if (predict(h_df, x) == Label::positive) {
        y = world.query_strong(x);
      } else {
        y = world.query_weak(x);
      }
      s.push_back(x, y);
    }
    ErmIndex index(id, std::move(s));
    const double err = index.min_error().to_double();
    const double sigma = bounds::scaled_sigma(n, d, delta_t, scale);
    const double lhs = sigma + std::sqrt(sigma * err);
    out.rounds.push_back({t, n, index.min_errors(), sigma, lhs});
    if (lhs <= target) {
      out.sigma = sigma;
      out.t0 = t;
      out.index.emplace(std::move(index));
      return out;
    }
  }
}

nlohmann::json trace_record(const EpochState& s) {
  nlohmann::json j;
  j["epoch"] = s.k;
  j["epsilon"] = s.epsilon;
  j["p_hat"] = s.p_hat ? nlohmann::json(*s.p_hat) : nlohmann::json(nullptr);
  j["footnote"] = s.footnote;
  j["m1"] = s.m1;
  j["t0"] = s.t0;
  j["m2"] = s.m2;
  j["weak"] = s.weak;
  j["sigma"] = s.sigma;
  j["err"] = s.error().to_double();
  j["sample_size"] = s.sample_size;
  j["h_hat"] = describe(s.h_hat);
  j["h_df"] = s.h_df ? nlohmann::json(describe(*s.h_df)) : nlohmann::json(nullptr);
  return j;
}

namespace {

void copy_epoch_counts(const QueryLedger& ledger, EpochState& s) {
  for (const auto& e : ledger.epochs()) {
    if (e.k == s.k) {
      s.m1 = e.m1;
      s.m2 = e.m2;
      s.weak = e.weak;
    }
  }
}

RunResult run(World& world, const AlgoConfig& config, bool baseline) {
  config.validate();
  const ClassId id = world.class_id();
  if (config.bound_params.d != vc_dimension(id) || config.bound_params.d_prime != difference_vc_dimension(id)) {
    throw std::invalid_argument("AlgoConfig: bound_params do not match the world's hypothesis class");
  }
  const double scale = config.bound_params.constant_scale;
  const int d = config.bound_params.d;

  RunResult result;
  result.baseline = baseline;
  std::optional<ErmIndex> index;
  try {
    const auto schedule = bounds::epoch_schedule(config.target_epsilon, config.delta);

    // Epoch 0: every label comes from O. The size uses the overall delta, which
    // equals 24 / delta_0 inside the log term of the closed form.
    result.n0 = bounds::initial_sample_size(config.delta, d, scale);
    world.ledger().enter(0, Bucket::initial);
    world.select_stream(0, rng::Phase::initial);
    {
      LabeledSet s0(world.dim());
      s0.reserve(result.n0);
      for (std::uint64_t i = 0; i < result.n0; ++i) {
        const Point x = world.sample_unlabeled();
        const Label y = world.query_strong(x);
        s0.push_back(x, y);
        result.initial_digest = rng::mix(result.initial_digest ^ std::bit_cast<std::uint64_t>(x.x)) ^
                                std::bit_cast<std::uint64_t>(x.y) ^ static_cast<std::uint64_t>(y == Label::positive);
      }
      std::optional<LabeledSet> kept;
      if (config.retain_samples) kept = s0;
      index.emplace(id, std::move(s0));
      EpochState st;
      st.k = 0;
      st.epsilon = schedule[0].epsilon;
      st.delta = schedule[0].delta;
      st.sigma = bounds::scaled_sigma(result.n0, d, schedule[0].delta, scale);
      st.h_hat = index->erm();
      st.errors = index->min_errors();
      st.sample_size = result.n0;
      st.s_hat = std::move(kept);
      result.states.push_back(std::move(st));
    }

    for (std::size_t i = 1; i < schedule.size(); ++i) {
      const auto& spec = schedule[i];
      const int k = spec.k;
      const Fraction tau(3, std::int64_t{2} << k);  // 3 eps_k / 2
      const DisagreementRegion region = index->region(tau);

      EpochState st;
      st.k = k;
      st.epsilon = spec.epsilon;
      st.delta = spec.delta;
      DifferenceClassifier h_df = ConstantClassifier{Label::positive};
      if (!baseline) {
        const double eps_df =
            config.epsilon_pass_mode == EpsilonPassMode::appendix ? spec.epsilon / 128.0 : spec.epsilon;
        DifferenceTraining tr = train_difference_classifier(world, region, eps_df, spec.delta / 2.0, config, k);
        h_df = tr.h_df;
        st.p_hat = tr.bias.p_hat;
        st.footnote = tr.footnote;
        st.fn_budget = tr.fn_budget;
        if (config.retain_samples) st.triples = std::move(tr.triples);
      }
      st.h_df = h_df;
      AdaptiveResult ar = adaptive_active_learn(world, region, h_df, spec.epsilon, spec.delta / 2.0, config, k);
      index = std::move(ar.index);
      st.sigma = ar.sigma;
      st.t0 = ar.t0;
      st.h_hat = index->erm();
      st.errors = index->min_errors();
      st.sample_size = index->samples().size();
      st.rounds = std::move(ar.rounds);
      if (config.retain_samples) {
        st.s_hat = index->samples();
        st.region = region;
      }
      copy_epoch_counts(world.ledger(), st);
      result.states.push_back(std::move(st));
    }
  } catch (const Error& e) {
    if (index) result.h = index->erm();
    result.ledger = world.ledger();
    throw RunAborted(e.what(), std::move(result));
  }
  result.h = index->erm();
  result.ledger = world.ledger();
  return result;
}

}  // namespace

RunResult run_main(World& world, const AlgoConfig& config) { return run(world, config, false); }

RunResult run_dbal_baseline(World& world, const AlgoConfig& config) { return run(world, config, true); }

}  // namespace wsal
