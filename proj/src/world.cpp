#include "wsal/world.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "wsal/errors.hpp"

namespace wsal {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// 1-D layout: h* = [x >= 0.5], flips split evenly between intervals centred at 0.1 and 0.9.
constexpr double kThresholdStar = 0.5;
constexpr double kLeftFlip = 0.1;
constexpr double kRightFlip = 0.9;
constexpr double kMaxLineNu = 0.4;
// Disc layout: h* has normal (1, 0); wedge A sits a quarter of its width below
// the boundary direction pi/2 and wedge B straddles direction 0.
constexpr double kMaxDiscNu = 2.0 / 7.0;

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

double disc_flip_centre(double nu) { return 0.25 - 3.0 * nu / 8.0; }

PiecewiseLaw build_oracle_law(const InstanceSpec& s) {
  PiecewiseLaw law;
  if (s.family == Family::threshold_1d) {
    law.assign(kThresholdStar, 1.0, 1.0);
    if (s.nu > 0.0) {
      law.assign(kLeftFlip - s.nu / 4.0, kLeftFlip + s.nu / 4.0, 1.0);
      law.assign(kRightFlip - s.nu / 4.0, kRightFlip + s.nu / 4.0, 0.0);
    }
  } else {
    law.assign(0.0, 0.25, 1.0);
    law.assign(0.75, 1.0, 1.0);
    if (s.nu > 0.0) {
      law.assign(0.25 - 5.0 * s.nu / 8.0, 0.25 - s.nu / 8.0, 0.0);
      law.assign_cyclic(-s.nu / 4.0, s.nu / 4.0, 0.0);
    }
  }
  return law;
}

PiecewiseLaw build_weak_law(const InstanceSpec& s, const PiecewiseLaw& oracle) {
  switch (s.weak_mode) {
    case WeakMode::identical: return oracle;
    case WeakMode::adversarial: return oracle.map([](double q) { return 1.0 - q; });
    case WeakMode::random_flip: {
      const double p = s.p;
      return oracle.map([p](double q) { return (1.0 - p) * q + p * (1.0 - q); });
    }
    case WeakMode::boundary_disagree: {
      PiecewiseLaw region;
      if (s.family == Family::threshold_1d) {
        region.assign(kThresholdStar - s.g / 2.0, kThresholdStar + s.g / 2.0, 1.0);
      } else if (s.g > 0.0) {
        const double c = disc_flip_centre(s.nu);
        region.assign_cyclic(c - s.g / 4.0, c + s.g / 4.0, 1.0);
        region.assign_cyclic(c + 0.5 - s.g / 4.0, c + 0.5 + s.g / 4.0, 1.0);
      }
      return PiecewiseLaw::combine(oracle, region, [](double q, double in) { return in > 0.5 ? 1.0 - q : q; });
    }
  }
  return oracle;
}

double error_against(const PiecewiseLaw& law, const Classifier& h) {
  return PiecewiseLaw::combine(positive_profile(h), law, [](double q, double p) {
           return q > 0.5 ? 1.0 - p : p;
         }).integral();
}

}  // namespace

std::string to_string(Family f) { return f == Family::threshold_1d ? "threshold-1d" : "halfspace-2d"; }

std::string to_string(WeakMode m) {
  switch (m) {
    case WeakMode::identical: return "identical";
    case WeakMode::boundary_disagree: return "boundary-disagree";
    case WeakMode::adversarial: return "adversarial";
    case WeakMode::random_flip: return "random-flip";
  }
  return "?";
}

Family family_from_string(const std::string& s) {
  if (s == "threshold-1d") return Family::threshold_1d;
  if (s == "halfspace-2d") return Family::halfspace_2d;
  throw std::invalid_argument("unknown family: " + s);
}

WeakMode weak_mode_from_string(const std::string& s) {
  if (s == "identical") return WeakMode::identical;
  if (s == "boundary-disagree") return WeakMode::boundary_disagree;
  if (s == "adversarial") return WeakMode::adversarial;
  if (s == "random-flip") return WeakMode::random_flip;
  throw std::invalid_argument("unknown weak_mode: " + s);
}

void InstanceSpec::validate() const {
  require(nu >= 0.0 && nu < 0.5, "InstanceSpec: nu must lie in [0, 0.5)");
  require(g >= 0.0 && g <= 1.0, "InstanceSpec: g must lie in [0, 1]");
  require(p >= 0.0 && p <= 1.0, "InstanceSpec: p must lie in [0, 1]");
  require(beta >= 0.0 && beta <= 1.0, "InstanceSpec: beta must lie in [0, 1]");
  if (family == Family::threshold_1d) {
    if (nu > kMaxLineNu) throw Infeasible("threshold-1d: flip intervals need nu <= 0.4");
  } else {
    if (nu >= kMaxDiscNu) throw Infeasible("halfspace-2d: flip wedges overlap for nu >= 2/7");
    if (weak_mode == WeakMode::boundary_disagree && g > 0.0 && g < nu) {
      throw Infeasible("halfspace-2d: the disagreement wedge must contain the flip wedge (g >= nu)");
    }
  }
}

void QueryLedger::enter(int epoch, Bucket bucket) {
  epoch_ = epoch;
  bucket_ = bucket;
  if (bucket == Bucket::difference || bucket == Bucket::adaptive) current();
}

EpochQueries& QueryLedger::current() {
  if (epochs_.empty() || epochs_.back().k != epoch_) {
    EpochQueries e;
    e.k = epoch_;
    epochs_.push_back(e);
  }
  return epochs_.back();
}

void QueryLedger::record_strong() {
  ++strong_;
  switch (bucket_) {
    case Bucket::initial: ++initial_; break;
    case Bucket::difference: ++current().m1; break;
    case Bucket::adaptive: ++current().m2; break;
    case Bucket::none: ++unattributed_; break;
  }
}

void QueryLedger::record_weak() {
  ++weak_;
  if (bucket_ == Bucket::difference || bucket_ == Bucket::adaptive) ++current().weak;
}

void QueryLedger::record_unlabeled(std::uint64_t n) {
  unlabeled_ += n;
  if (bucket_ == Bucket::difference || bucket_ == Bucket::adaptive) current().unlabeled += n;
}

bool QueryLedger::conserved() const {
  std::uint64_t total = initial_ + unattributed_;
  for (const auto& e : epochs_) total += e.m1 + e.m2;
  return total == strong_;
}

World::World(const InstanceSpec& spec, WorldOptions options) : spec_(spec), options_(options) {
  spec_.validate();
  oracle_law_ = build_oracle_law(spec_);
  weak_law_ = build_weak_law(spec_, oracle_law_);
  const double beta = spec_.beta;
  target_law_ = beta == 0.0 ? oracle_law_
                            : PiecewiseLaw::combine(oracle_law_, weak_law_, [beta](double o, double w) {
                                return (1.0 - beta) * o + beta * w;
                              });

  // err is piecewise linear in the classifier parameter between law breakpoints,
  // so the best member sits at one of them.
  bool first = true;
  auto consider = [&](const Classifier& h, double param) {
    const double e = error_against(target_law_, h);
    const double best_param = std::holds_alternative<ThresholdClassifier>(best_)
                                  ? std::get<ThresholdClassifier>(best_).threshold
                                  : std::get<HalfspaceClassifier>(best_).angle;
    if (first || e < best_error_ - 1e-15 || (std::abs(e - best_error_) <= 1e-15 && param < best_param)) {
      first = false;
      best_ = h;
      best_error_ = e;
    }
  };
  if (spec_.family == Family::threshold_1d) {
    best_ = ThresholdClassifier{};
    std::vector<double> candidates = target_law_.starts();
    candidates.push_back(1.0);
    for (double t : candidates) consider(ThresholdClassifier{t, 1}, t);
  } else {
    best_ = HalfspaceClassifier{};
    for (double u : target_law_.starts()) {
      for (double shift : {-kPi / 2.0, kPi / 2.0}) {
        const double a = wrap_two_pi(kTwoPi * u + shift);
        consider(HalfspaceClassifier{a}, a);
      }
    }
  }
  select_stream(0, rng::Phase::free, 0);
}

void World::select_stream(const rng::StreamKey& key) {
  sampler_.seed(rng::derive(key, rng::Channel::sampler));
  labels_.seed(rng::derive(key, rng::Channel::label));
  coins_.seed(rng::derive(key, rng::Channel::coin));
  shadow_.seed(rng::derive(key, rng::Channel::shadow));
}

void World::select_stream(int epoch, rng::Phase phase, std::uint64_t round) {
  select_stream(rng::StreamKey{spec_.seed, epoch, phase, round});
}

Point World::sample_unlabeled() {
  if (options_.max_unlabeled != 0 && ledger_.unlabeled_draws() >= options_.max_unlabeled) {
    throw UnlabeledCapExceeded("unlabeled draw cap reached");
  }
  ledger_.record_unlabeled(1);
  return draw_point(sampler_);
}

Point World::draw_point(rng::Engine& e) const {
  if (spec_.family == Family::threshold_1d) return Point::line(rng::uniform01(e));
  const double r = std::sqrt(rng::uniform01(e));
  const double a = kTwoPi * rng::uniform01(e);
  return Point::plane(r * std::cos(a), r * std::sin(a));
}

std::vector<Point> World::sample_unlabeled(std::size_t n) {
  std::vector<Point> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(sample_unlabeled());
  return out;
}

Label World::draw(double p_plus) {
  // Step laws are 0 or 1 almost everywhere; those labels need no uniform.
  if (p_plus <= 0.0) return Label::negative;
  if (p_plus >= 1.0) return Label::positive;
  return rng::uniform01(labels_) < p_plus ? Label::positive : Label::negative;
}

Label World::query_strong(const Point& x) {
  ledger_.record_strong();
  const double u = coordinate(x);
  if (spec_.beta > 0.0) {
    const bool heads = rng::uniform01(coins_) < spec_.beta;
    if (heads) {
      ledger_.record_routed_to_weak();
      return draw(weak_law_.at(u));
    }
  }
  return draw(oracle_law_.at(u));
}

Label World::query_weak(const Point& x) {
  ledger_.record_weak();
  return draw(weak_law_.at(coordinate(x)));
}

Label World::shadow_strong_label(const Point& x) {
  if (options_.benchmark_mode) throw Unavailable("shadow labels are disabled in benchmark mode");
  return rng::uniform01(shadow_) < target_law_.at(coordinate(x)) ? Label::positive : Label::negative;
}

double World::coordinate(const Point& x) const {
  if (x.dim != dim()) throw std::invalid_argument("World: point dimension mismatch");
  if (x.dim == 1) return x.x;
  return direction_angle(x) / kTwoPi;
}

double World::exact_error(const Classifier& h) const {
  if (dimension_of(h) != dim()) throw std::invalid_argument("World: classifier dimension mismatch");
  return error_against(target_law_, h);
}

double World::disagreement_mass() const {
  return PiecewiseLaw::combine(oracle_law_, weak_law_, [](double o, double w) { return o != w ? 1.0 : 0.0; })
      .integral();
}

World make_mixture_oracle(const World& world, double beta) {
  InstanceSpec spec = world.spec();
  spec.beta = beta;
  return World(spec, world.options());
}

World build_case_study(double nu, double g, std::uint64_t seed) {
  InstanceSpec spec;
  spec.family = Family::halfspace_2d;
  spec.nu = nu;
  spec.weak_mode = WeakMode::boundary_disagree;
  spec.g = g;
  spec.seed = seed;
  return World(spec);
}

PiecewiseLaw positive_profile(const Classifier& h) {
  PiecewiseLaw q;
  if (const auto* t = std::get_if<ThresholdClassifier>(&h)) {
    const double c = std::clamp(t->threshold, 0.0, 1.0);
    if (t->orientation > 0) {
      q.assign(c, 1.0, 1.0);
    } else {
      q.assign(0.0, c, 1.0);
    }
  } else {
    const double a = std::get<HalfspaceClassifier>(h).angle;
    q.assign_cyclic((a - kPi / 2.0) / kTwoPi, (a + kPi / 2.0) / kTwoPi, 1.0);
  }
  return q;
}

PiecewiseLaw positive_profile(const DifferenceClassifier& h) {
  PiecewiseLaw q;
  if (const auto* c = std::get_if<ConstantClassifier>(&h)) return PiecewiseLaw(c->value == Label::positive ? 1.0 : 0.0);
  if (const auto* i = std::get_if<IntervalClassifier>(&h)) {
    q.assign(i->lo, std::nextafter(i->hi, 2.0), 1.0);
    return q;
  }
  const auto& w = std::get<WedgeClassifier>(h);
  const double a = w.start / kTwoPi;
  const double len = std::min(w.width, kPi) / kTwoPi;
  q.assign_cyclic(a, a + len, 1.0);
  q.assign_cyclic(a + 0.5, a + 0.5 + len, 1.0);
  return q;
}

double flip_cost(const Classifier& h, const Point& x) {
  if (const auto* t = std::get_if<ThresholdClassifier>(&h)) return std::abs(x.x - std::clamp(t->threshold, 0.0, 1.0));
  const double a = std::get<HalfspaceClassifier>(h).angle;
  const double d = wrap_pi(direction_angle(x) - (a + kPi / 2.0));
  return std::min(d, kPi - d) / kPi;
}

}  // namespace wsal
