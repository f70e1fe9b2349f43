#include "evoattack/attack.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "evoattack/rng.hpp"

namespace evoattack {

namespace {

double max_attainable_distance(std::size_t n, Metric metric) {
  switch (metric) {
    case Metric::L0: return double(n);
    case Metric::L2: return std::sqrt(double(n));
    case Metric::LInf: return 1.0;
  }
  return 0.0;
}

void check_probs(const std::vector<double>& probs) {
  if (probs.size() < 2) throw std::invalid_argument("loss: need at least 2 classes");
}

}  // namespace

std::string to_string(Metric metric) {
  switch (metric) {
    case Metric::L0: return "l0";
    case Metric::L2: return "l2";
    case Metric::LInf: return "linf";
  }
  return "l2";
}

Metric metric_from_string(const std::string& s) {
  if (s == "l0") return Metric::L0;
  if (s == "l2") return Metric::L2;
  if (s == "linf") return Metric::LInf;
  throw std::invalid_argument("unknown metric '" + s + "' (expected l0, l2, or linf)");
}

std::string to_string(AttackMode mode) {
  return mode == AttackMode::Targeted ? "targeted" : "non-targeted";
}

std::string to_string(AttackStatus status) {
  switch (status) {
    case AttackStatus::Success: return "success";
    case AttackStatus::Failure: return "failure";
    case AttackStatus::SkippedInitiallyMisclassified: return "skipped-initially-misclassified";
  }
  return "failure";
}

void validate(const AttackSpec& spec, std::size_t genome_length, int num_classes) {
  validate(spec.ga);
  if (num_classes < 2) throw std::invalid_argument("attack: oracle must have >= 2 classes");
  if (spec.label < 0 || spec.label >= num_classes) {
    throw std::invalid_argument("attack: label " + std::to_string(spec.label) + " outside [0, " +
                                std::to_string(num_classes) + ")");
  }
  const double max_d = max_attainable_distance(genome_length, spec.metric);
  if (!(spec.penalty > max_d)) {
    throw std::invalid_argument("attack: penalty " + std::to_string(spec.penalty) +
                                " must exceed the largest attainable " + to_string(spec.metric) +
                                " distance " + std::to_string(max_d) +
                                " so the loss term dominates");
  }
}

double distance(const std::vector<double>& x, const std::vector<double>& y, Metric metric) {
  if (x.size() != y.size()) throw std::invalid_argument("distance: length mismatch");
  switch (metric) {
    case Metric::L0: {
      std::size_t changed = 0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (std::abs(x[i] - y[i]) > 1e-12) ++changed;
      }
      return double(changed);
    }
    case Metric::L2: {
      double acc = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        acc += d * d;
      }
      return std::sqrt(acc);
    }
    case Metric::LInf: {
      double mx = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        mx = std::max(mx, std::abs(x[i] - y[i]));
      }
      return mx;
    }
  }
  return 0.0;
}

double loss_nontargeted(const std::vector<double>& probs, int real_label) {
  check_probs(probs);
  const std::size_t r = std::size_t(real_label);
  double best_other = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (i != r) best_other = std::max(best_other, probs[i]);
  }
  return std::max(probs[r] - best_other, 0.0);
}

double loss_targeted(const std::vector<double>& probs, int target_label) {
  check_probs(probs);
  const std::size_t t = std::size_t(target_label);
  double best_other = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (i != t) best_other = std::max(best_other, probs[i]);
  }
  return std::max(best_other - probs[t], 0.0);
}

double attack_fitness(const std::vector<double>& original, const std::vector<double>& candidate,
                      const Oracle& oracle, const AttackSpec& spec) {
  const std::vector<double> probs = oracle.classify(candidate);
  const double loss = spec.mode == AttackMode::Targeted ? loss_targeted(probs, spec.label)
                                                        : loss_nontargeted(probs, spec.label);
  return distance(original, candidate, spec.metric) + spec.penalty * loss;
}

AttackResult run_attack(const Oracle& oracle, const Image& original, const AttackSpec& spec,
                        std::size_t eval_threads) {
  validate(spec, original.pixels.size(), oracle.num_classes());
  if (!(original.shape == oracle.input_shape())) {
    throw std::invalid_argument("attack: image shape does not match the oracle input shape");
  }

  AttackResult result;
  result.mode = spec.mode;
  result.attack_label = spec.label;
  result.penalty = spec.penalty;

  if (spec.mode == AttackMode::NonTargeted) {
    // protocol precondition: only attack samples the oracle gets right
    const int initial = argmax_label(oracle.classify(original.pixels));
    if (initial != spec.label) {
      result.status = AttackStatus::SkippedInitiallyMisclassified;
      result.predicted_label = initial;
      result.adversarial = original;
      return result;
    }
  }

  std::atomic<long long> queries{0};
  const FitnessFn fitness = [&](const std::vector<double>& genome) {
    queries.fetch_add(1, std::memory_order_relaxed);
    return attack_fitness(original.pixels, genome, oracle, spec);
  };

  StoppingRule stopping = spec.stopping;
  if (stopping.enabled && !std::isfinite(stopping.fitness_threshold)) {
    stopping.fitness_threshold = spec.penalty;
  }

  const RunResult rr = run(original.pixels, fitness, spec.ga, stopping, eval_threads);

  // independent certification query on the returned image
  const std::vector<double> probs = oracle.classify(rr.elite.genome);
  queries.fetch_add(1, std::memory_order_relaxed);
  result.predicted_label = argmax_label(probs);
  result.success = spec.mode == AttackMode::Targeted ? result.predicted_label == spec.label
                                                     : result.predicted_label != spec.label;
  result.status = result.success ? AttackStatus::Success : AttackStatus::Failure;
  result.adversarial = Image{rr.elite.genome, original.shape};
  result.distance = distance(original.pixels, rr.elite.genome, spec.metric);
  result.final_fitness = *rr.elite.fitness;
  result.queries = queries.load();
  result.generations = rr.generations_executed;
  result.trend = rr.trend;
  return result;
}

std::vector<AttackResult> batch_attack(const Oracle& oracle, const Dataset& data,
                                       const AttackSpec& spec_template,
                                       const BatchOptions& options) {
  if (data.images.empty()) throw std::invalid_argument("batch_attack: dataset is empty");
  if (options.count == 0) throw std::invalid_argument("batch_attack: count must be >= 1");
  const int m = oracle.num_classes();

  // first `count` samples the oracle classifies correctly
  struct Selected {
    std::size_t index;
    int label;
  };
  std::vector<Selected> selected;
  for (std::size_t i = 0; i < data.size() && selected.size() < options.count; ++i) {
    if (spec_template.mode == AttackMode::Targeted && !options.targeted_all_labels &&
        data.labels[i] == spec_template.label) {
      continue;  // fixed-target mode: a sample already labelled t has nothing to flip
    }
    const int predicted = argmax_label(oracle.classify(data.images[i].pixels));
    if (predicted == data.labels[i]) selected.push_back({i, data.labels[i]});
  }
  if (selected.size() < options.count) {
    throw ShortfallError(selected.size(), options.count);
  }

  struct Job {
    std::size_t sample_index;
    int true_label;
    int attack_label;
  };
  std::vector<Job> jobs;
  for (const auto& s : selected) {
    if (spec_template.mode == AttackMode::Targeted) {
      if (options.targeted_all_labels) {
        for (int t = 0; t < m; ++t) {
          if (t != s.label) jobs.push_back({s.index, s.label, t});
        }
      } else {
        jobs.push_back({s.index, s.label, spec_template.label});
      }
    } else {
      jobs.push_back({s.index, s.label, s.label});
    }
  }

  std::vector<AttackResult> results(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t j = next.fetch_add(1);
      if (j >= jobs.size()) return;
      AttackSpec spec = spec_template;
      spec.label = jobs[j].attack_label;
      spec.ga.seed = derive_seed(options.seed, j);
      AttackResult r = run_attack(oracle, data.images[jobs[j].sample_index], spec,
                                  options.eval_threads);
      r.sample_index = int(jobs[j].sample_index);
      r.true_label = jobs[j].true_label;
      results[j] = std::move(r);
    }
  };

  if (options.jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    const std::size_t n_threads = std::min(options.jobs, jobs.size());
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return results;
}

GaParams ga_profile(std::string_view name) {
  GaParams p;  // defaults already carry the MNIST row
  if (name == "mnist" || name == "synth") {
    p.population_size = 100;
    p.gaussian_sigma = 30.0;
  } else if (name == "cifar10") {
    p.population_size = 200;
    p.gaussian_sigma = 20.0;
  } else {
    throw std::invalid_argument("unknown GA profile '" + std::string(name) +
                                "' (expected mnist, cifar10, or synth)");
  }
  return p;
}

}  // namespace evoattack
