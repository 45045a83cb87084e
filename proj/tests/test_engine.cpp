#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "wsal/engine.hpp"

using namespace wsal;

namespace {

InstanceSpec line_spec(double nu, WeakMode mode = WeakMode::identical, double g = 0.0, std::uint64_t seed = 1) {
  InstanceSpec s;
  s.nu = nu;
  s.weak_mode = mode;
  s.g = g;
  s.seed = seed;
  return s;
}

AlgoConfig small_config(double eps, double scale) {
  AlgoConfig c = AlgoConfig::for_class(ClassId::threshold, scale);
  c.target_epsilon = eps;
  return c;
}

// Labels of a noise-free threshold at 0.5 on an even grid.
LabeledSet clean_grid(int n) {
  LabeledSet s(1);
  for (int i = 0; i < n; ++i) {
    const double x = (i + 0.5) / n;
    s.push_back(Point::line(x), x >= 0.5 ? Label::positive : Label::negative);
  }
  return s;
}

}  // namespace

TEST_CASE("bias estimate brackets the coin") {
  std::mt19937_64 g(5);
  for (double p : {1.0, 0.5, 0.2}) {
    std::bernoulli_distribution coin(p);
    int ok = 0;
    for (int run = 0; run < 40; ++run) {
      const BiasEstimate b = estimate_bias([&] { return coin(g); }, 0.1);
      ok += b.p_hat <= p && p <= 2 * b.p_hat;
      CHECK(b.draws == (std::uint64_t{1} << (b.stages + 1)) - 2);
    }
    CHECK(ok >= 36);
  }
  const BiasEstimate one = estimate_bias([] { return true; }, 0.1);
  CHECK(one.p_hat == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("bias estimate draw cap and floor") {
  BiasOptions capped;
  capped.max_draws = 1000;
  CHECK_THROWS_AS(estimate_bias([] { return false; }, 0.1, capped), BudgetExhausted);
  BiasOptions floor;
  floor.ucb_floor = 0.01;
  const BiasEstimate b = estimate_bias([] { return false; }, 0.1, floor);
  CHECK(b.below_floor);
  CHECK(b.p_hat < 0.01);
  const double g = bounds::gamma(std::uint64_t{1} << b.stages, std::ldexp(0.1, -b.stages));
  CHECK(b.p_hat == doctest::Approx(g));
  CHECK_THROWS_AS(estimate_bias([] { return true; }, 1.0), std::invalid_argument);
}

TEST_CASE("empty region takes the footnote path") {
  World w(line_spec(0.0));
  const ErmIndex index(ClassId::threshold, clean_grid(20000));
  const DisagreementRegion region = index.region(Fraction(0, 1));
  const AlgoConfig c = small_config(0.05, 1.0);
  const DifferenceTraining t = train_difference_classifier(w, region, 1.0, 0.05, c, 1);
  CHECK(t.footnote);
  CHECK(is_constant(t.h_df, Label::positive));
  CHECK(t.m == 0);
  CHECK(w.ledger().strong_queries() == 0);
  CHECK(w.ledger().weak_queries() == 0);
}

TEST_CASE("difference training uses the published sample size at scale 1") {
  World w(line_spec(0.1, WeakMode::boundary_disagree, 0.05));
  const ErmIndex index(ClassId::threshold, clean_grid(200));
  const DisagreementRegion region = index.region(Fraction(3, 16));
  const AlgoConfig c = small_config(0.05, 1.0);
  const DifferenceTraining t = train_difference_classifier(w, region, 1.0, 0.05, c, 1);
  REQUIRE_FALSE(t.footnote);
  const double p_hat = t.bias.p_hat;
  const double raw = 64.0 * 1024.0 * p_hat * (2.0 * std::log(512.0 * 1024.0 * p_hat) + std::log(72.0 / 0.05));
  CHECK(t.m == static_cast<std::uint64_t>(std::ceil(raw)));
  CHECK(t.triples.size() == t.m);
  CHECK(t.fn_budget == static_cast<std::uint64_t>(std::floor(t.m / (256.0 * p_hat))));
  const auto& e = w.ledger().epochs().at(0);
  CHECK(e.m1 == t.m);
  CHECK(e.weak == t.m);
  // Every triple lies in the region and the false-negative budget holds.
  std::uint64_t fn = 0;
  for (const auto& tr : t.triples) {
    CHECK(region.contains(tr.point));
    fn += predict(t.h_df, tr.point) == Label::negative && tr.strong != tr.weak;
  }
  CHECK(fn <= t.fn_budget);
}

TEST_CASE("difference training on tiny samples is optimal") {
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    World w(line_spec(0.1, WeakMode::boundary_disagree, 0.1, seed));
    const ErmIndex index(ClassId::threshold, clean_grid(100));
    const DisagreementRegion region = index.region(Fraction(1, 4));
    const AlgoConfig c = small_config(0.05, 2e-6);
    const DifferenceTraining t = train_difference_classifier(w, region, 1.0, 0.05, c, 1);
    if (t.footnote || t.m > 14) continue;
    ++checked;
    std::int64_t pos = 0;
    for (const auto& tr : t.triples) pos += predict(t.h_df, tr.point) == Label::positive;
    CHECK(pos == oracle::diff_min_positives(t.triples, static_cast<std::int64_t>(t.fn_budget)));
  }
  CHECK(checked > 20);
}

TEST_CASE("adaptive sampler stops at the first round meeting the rule") {
  World w(line_spec(0.1, WeakMode::boundary_disagree, 0.05, 3));
  const ErmIndex index(ClassId::threshold, clean_grid(400));
  const DisagreementRegion region = index.region(Fraction(3, 8));
  const AlgoConfig c = small_config(0.05, 0.01);
  const DifferenceClassifier h_df = IntervalClassifier{0.45, 0.55};
  const AdaptiveResult r = adaptive_active_learn(w, region, h_df, 0.5, 0.05, c, 1);
  REQUIRE(r.t0 >= 1);
  REQUIRE(r.rounds.size() == static_cast<std::size_t>(r.t0));
  CHECK(r.index->samples().size() == (std::size_t{1} << r.t0));
  const double target = 0.5 / 512.0;
  for (const auto& round : r.rounds) {
    const double dt = 0.05 / (round.t * (round.t + 1.0));
    const double sigma = 0.01 * (8.0 / round.n) * (2.0 * std::log(2.0 * std::numbers::e * round.n) + std::log(24.0 / dt));
    const double lhs = sigma + std::sqrt(sigma * static_cast<double>(round.errors) / round.n);
    CHECK(round.n == std::uint64_t{1} << round.t);
    CHECK(round.sigma == doctest::Approx(sigma).epsilon(1e-12));
    CHECK((lhs <= target) == (round.t == r.t0));
  }
  CHECK(r.sigma == r.rounds.back().sigma);
  REQUIRE(r.index);
  CHECK(r.index->min_errors() == r.rounds.back().errors);

  // m2 counts the in-region points with h_df = +1 over every round; W takes the rest of the region.
  World twin(w.spec());
  std::uint64_t to_o = 0, to_w = 0;
  for (const auto& round : r.rounds) {
    twin.select_stream(1, rng::Phase::adaptive, static_cast<std::uint64_t>(round.t));
    for (std::uint64_t i = 0; i < round.n; ++i) {
      const Point x = twin.sample_unlabeled();
      if (!region.contains(x)) continue;
      (predict(h_df, x) == Label::positive ? to_o : to_w) += 1;
    }
  }
  CHECK(w.ledger().epochs().at(0).m2 == to_o);
  CHECK(w.ledger().epochs().at(0).weak == to_w);
  CHECK(w.ledger().strong_queries() == to_o);
}

TEST_CASE("adaptive sampler with constant +1 makes no weak queries") {
  World w(line_spec(0.1, WeakMode::adversarial));
  const ErmIndex index(ClassId::threshold, clean_grid(400));
  const AdaptiveResult r = adaptive_active_learn(w, index.region(Fraction(3, 8)), ConstantClassifier{Label::positive},
                                                 0.5, 0.05, small_config(0.05, 0.01), 1);
  CHECK(r.t0 > 0);
  CHECK(w.ledger().weak_queries() == 0);
}

TEST_CASE("adaptive sampler on a realizable world stops once sigma alone is small enough") {
  World w(line_spec(0.0));
  const ErmIndex index(ClassId::threshold, clean_grid(400));
  const AdaptiveResult r = adaptive_active_learn(w, index.region(Fraction(3, 8)), ConstantClassifier{Label::positive},
                                                 0.5, 0.05, small_config(0.05, 0.01), 1);
  CHECK(r.rounds.back().errors == 0);
  int expect = 1;
  while (bounds::scaled_sigma(std::uint64_t{1} << expect, 1, 0.05 / (expect * (expect + 1.0)), 0.01) > 0.5 / 512.0) ++expect;
  CHECK(r.t0 == expect);
}

TEST_CASE("doubling cap") {
  World w(line_spec(0.1));
  AlgoConfig c = small_config(0.05, 0.01);
  c.max_doubling_t = 3;
  const ErmIndex index(ClassId::threshold, clean_grid(400));
  CHECK_THROWS_AS(adaptive_active_learn(w, index.region(Fraction(3, 8)), ConstantClassifier{Label::positive}, 0.5, 0.05,
                                        c, 1),
                  DoublingCapExceeded);
}

TEST_CASE("target epsilon of 1 returns the initial ERM") {
  World w(line_spec(0.1));
  const RunResult r = run_main(w, small_config(1.0, 1e-5));
  CHECK(r.states.size() == 1);
  CHECK(r.n0 == bounds::initial_sample_size(0.1, 1, 1e-5));
  CHECK(r.ledger.strong_queries() == r.n0);
  CHECK(r.ledger.weak_queries() == 0);
  CHECK(r.ledger.conserved());
}

TEST_CASE("main run plumbing") {
  World w(line_spec(0.1, WeakMode::boundary_disagree, 0.05, 4));
  AlgoConfig c = small_config(0.25, 1e-3);
  c.retain_samples = true;
  const RunResult r = run_main(w, c);
  REQUIRE(r.states.size() == 3);
  CHECK(r.ledger.conserved());
  double budget = 0.1 / 4.0;
  std::uint64_t strong = r.n0;
  for (int k = 1; k <= 2; ++k) {
    const EpochState& s = r.states[k];
    CHECK(s.k == k);
    CHECK(s.epsilon == std::ldexp(1.0, -k));
    CHECK(s.delta == doctest::Approx(0.1 / (4.0 * (k + 1) * (k + 1))));
    budget += s.delta;
    CHECK(s.sample_size == (std::uint64_t{1} << s.t0));
    CHECK(s.s_hat->size() == s.sample_size);
    strong += s.m1 + s.m2;
    if (!s.footnote) CHECK(s.m1 == s.triples->size());
    const auto j = trace_record(s);
    CHECK(j.at("epoch") == k);
    CHECK(j.at("m1") == s.m1);
    CHECK(j.at("t0") == s.t0);
  }
  CHECK(budget < 0.1);
  CHECK(strong == r.ledger.strong_queries());
  CHECK(r.h == r.states.back().h_hat);
}

TEST_CASE("baseline never asks W and never trains a difference classifier") {
  World w(line_spec(0.1, WeakMode::boundary_disagree, 0.05, 4));
  const RunResult r = run_dbal_baseline(w, small_config(0.25, 1e-3));
  CHECK(r.baseline);
  CHECK(r.ledger.weak_queries() == 0);
  for (const auto& e : r.ledger.epochs()) CHECK(e.m1 == 0);
  for (std::size_t k = 1; k < r.states.size(); ++k) CHECK(is_constant(*r.states[k].h_df, Label::positive));
}

TEST_CASE("with W identical to O, routing to W changes nothing") {
  // Same region and streams: replacing W answers by O answers must give the same sample.
  World a(line_spec(0.1, WeakMode::identical, 0.0, 6));
  World b(line_spec(0.1, WeakMode::identical, 0.0, 6));
  const ErmIndex index(ClassId::threshold, clean_grid(400));
  const DisagreementRegion region = index.region(Fraction(3, 8));
  const AlgoConfig c = small_config(0.05, 0.01);
  const AdaptiveResult ra = adaptive_active_learn(a, region, IntervalClassifier{0.4, 0.45}, 0.5, 0.05, c, 1);
  const AdaptiveResult rb = adaptive_active_learn(b, region, ConstantClassifier{Label::positive}, 0.5, 0.05, c, 1);
  CHECK(a.ledger().weak_queries() > 0);
  CHECK(b.ledger().weak_queries() == 0);
  CHECK(ra.t0 == rb.t0);
  CHECK(ra.index->samples().labels() == rb.index->samples().labels());
  CHECK(ra.index->samples().xs() == rb.index->samples().xs());
  CHECK(ra.index->erm() == rb.index->erm());
}

TEST_CASE("baseline and main share the initial sample") {
  World a(line_spec(0.1, WeakMode::boundary_disagree, 0.05, 8));
  World b(line_spec(0.1, WeakMode::boundary_disagree, 0.05, 8));
  const AlgoConfig c = small_config(0.5, 1e-3);
  const RunResult m = run_main(a, c);
  const RunResult base = run_dbal_baseline(b, c);
  CHECK(m.initial_digest == base.initial_digest);
  CHECK(m.n0 == base.n0);
  CHECK(m.states[0].h_hat == base.states[0].h_hat);
}

TEST_CASE("failures carry the partial run") {
  World w(line_spec(0.1));
  AlgoConfig c = small_config(0.25, 1e-3);
  c.max_doubling_t = 2;
  try {
    run_main(w, c);
    FAIL("expected RunAborted");
  } catch (const RunAborted& e) {
    CHECK(e.partial().n0 == bounds::initial_sample_size(0.1, 1, 1e-3));
    CHECK(e.partial().states.size() == 1);
    CHECK(e.partial().ledger.strong_queries() >= e.partial().n0);
  }
  AlgoConfig wrong = small_config(0.25, 1e-3);
  wrong.bound_params.d = 2;
  CHECK_THROWS_AS(run_main(w, wrong), std::invalid_argument);
}

TEST_CASE("appendix mode shrinks the difference-classifier epsilon") {
  World a(line_spec(0.1, WeakMode::boundary_disagree, 0.05, 2));
  World b(line_spec(0.1, WeakMode::boundary_disagree, 0.05, 2));
  AlgoConfig main = small_config(0.5, 1e-4);
  AlgoConfig app = main;
  app.epsilon_pass_mode = EpsilonPassMode::appendix;
  const RunResult rm = run_main(a, main);
  const RunResult ra = run_main(b, app);
  REQUIRE(rm.states.size() == 2);
  REQUIRE(ra.states.size() == 2);
  if (!rm.states[1].footnote && !ra.states[1].footnote) CHECK(ra.states[1].m1 > rm.states[1].m1);
  CHECK(pass_mode_from_string(to_string(EpsilonPassMode::appendix)) == EpsilonPassMode::appendix);
}
