#include "ppw/inference.hpp"

#include <cmath>
#include <thread>

#include "ppw/error.hpp"

namespace ppw {
namespace {

std::vector<Symbol> domain_of(const Program& p) { return p.theory ? p.theory->domain : std::vector<Symbol>{}; }

// Replays a fixed prefix of choice indices, then takes the first option of
// positive probability at every new choice point.
class EnumerationChooser : public Chooser {
 public:
  EnumerationChooser(std::vector<std::size_t> prefix, std::size_t max_choices)
      : path_(std::move(prefix)), max_choices_(max_choices) {}

  bool coin(double p) override {
    if (p >= 1.0) return true;
    if (p <= 0.0) return false;
    return next({p, 1.0 - p}) == 0;
  }
  std::size_t pick(const std::vector<double>& weights) override { return next(weights); }
  Term draw(const GroundDistribution&) override {
    throw Error(ErrorKind::Enumeration, "exact inference cannot enumerate a continuous or unbounded distribution");
  }

  double probability() const { return probability_; }

  /// Moves to the next path in depth-first order; false when exhausted.
  bool advance() {
    while (!options_.empty()) {
      std::size_t depth = options_.size() - 1;
      const auto& w = options_[depth];
      for (std::size_t k = path_[depth] + 1; k < w.size(); ++k) {
        if (w[k] > 0.0) {
          path_.resize(depth + 1);
          path_[depth] = k;
          options_.clear();
          return true;
        }
      }
      options_.pop_back();
      path_.pop_back();
    }
    return false;
  }

  void restart() {
    cursor_ = 0;
    probability_ = 1.0;
  }

 private:
  std::size_t next(const std::vector<double>& weights) {
    if (cursor_ >= max_choices_) {
      throw Error(ErrorKind::Enumeration,
                  "exact inference supports at most " + std::to_string(max_choices_) + " random choices per world");
    }
    if (cursor_ == path_.size()) {
      std::size_t first = 0;
      while (first + 1 < weights.size() && !(weights[first] > 0.0)) ++first;
      path_.push_back(first);
    }
    if (options_.size() <= cursor_) options_.resize(cursor_ + 1);
    options_[cursor_] = weights;
    std::size_t k = path_[cursor_++];
    probability_ *= weights[k];
    return k;
  }

  std::vector<std::size_t> path_;
  std::vector<std::vector<double>> options_;
  std::size_t cursor_ = 0;
  std::size_t max_choices_;
  double probability_ = 1.0;
};

struct Sample {
  double weight;
  bool hit;
};

void run_range(const std::shared_ptr<const Model>& model, const Formula& query, const Evidence& evidence,
               const QueryOptions& options, std::size_t from, std::size_t to, std::vector<Sample>& out) {
  WorldBuilder builder(model, evidence);
  SamplingChooser chooser(options.seed);
  for (std::size_t i = from; i < to; ++i) {
    chooser.reseed(derive(options.seed, i));
    builder.begin(chooser);
    for (int t = 0; t <= options.horizon; ++t) builder.build_layer(t);
    builder.finish();
    double w = builder.world().weight();
    out[i] = {w, w > 0.0 && holds(builder.world(), query, options.horizon, options.domain)};
  }
}

}  // namespace

QueryResult estimate_query(std::shared_ptr<const Model> model, const Formula& query, const Evidence& evidence,
                           const QueryOptions& options) {
  if (options.samples < 1) throw Error(ErrorKind::Argument, "sample count must be at least 1");
  if (options.horizon < 0) throw Error(ErrorKind::Argument, "horizon must be non-negative");
  std::vector<Sample> samples(options.samples);
  unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(options.samples)));
  if (threads == 1) {
    run_range(model, query, evidence, options, 0, options.samples, samples);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    std::size_t chunk = (options.samples + threads - 1) / threads;
    for (unsigned k = 0; k < threads; ++k) {
      std::size_t from = k * chunk, to = std::min(options.samples, from + chunk);
      pool.emplace_back([&, k, from, to] {
        try {
          run_range(model, query, evidence, options, from, to, samples);
        } catch (...) {
          errors[k] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  double sw = 0.0, sw2 = 0.0, swq = 0.0;
  for (const auto& s : samples) {
    sw += s.weight;
    sw2 += s.weight * s.weight;
    if (s.hit) swq += s.weight;
  }
  if (!(sw > 0.0)) {
    throw Error(ErrorKind::ImpossibleEvidence,
                "evidence has zero weight in all " + std::to_string(options.samples) + " samples");
  }
  QueryResult r;
  r.n_samples = options.samples;
  r.estimate = std::min(1.0, std::max(0.0, swq / sw));
  double var = 0.0;
  for (const auto& s : samples) {
    double d = (s.hit ? 1.0 : 0.0) - r.estimate;
    var += s.weight * s.weight * d * d;
  }
  r.std_error = std::sqrt(var) / sw;
  r.effective_sample_size = sw * sw / sw2;
  return r;
}

QueryResult estimate_query(const Program& program, const Formula& query, const Evidence& evidence,
                           QueryOptions options) {
  if (options.domain.empty()) options.domain = domain_of(program);
  return estimate_query(Model::compile(program.clauses), query, evidence, options);
}

double exact_query(std::shared_ptr<const Model> model, const Formula& query, const Evidence& evidence, int horizon,
                   const std::vector<Symbol>& domain, std::size_t max_choices) {
  if (horizon < 0) throw Error(ErrorKind::Argument, "horizon must be non-negative");
  if (model->has_infinite_support()) {
    throw Error(ErrorKind::Enumeration,
                "exact inference needs finite discrete distributions (found gaussian, uniform or poisson)");
  }
  WorldBuilder builder(model, evidence);
  EnumerationChooser chooser({}, max_choices);
  double num = 0.0, den = 0.0;
  do {
    chooser.restart();
    builder.begin(chooser);
    for (int t = 0; t <= horizon; ++t) builder.build_layer(t);
    builder.finish();
    double w = chooser.probability() * builder.world().weight();
    if (w > 0.0) {
      den += w;
      if (holds(builder.world(), query, horizon, domain)) num += w;
    }
  } while (chooser.advance());
  if (!(den > 0.0)) throw Error(ErrorKind::ImpossibleEvidence, "evidence has probability zero");
  return num / den;
}

double exact_query(const Program& program, const Formula& query, const Evidence& evidence, int horizon) {
  return exact_query(Model::compile(program.clauses), query, evidence, horizon, domain_of(program));
}

}  // namespace ppw
