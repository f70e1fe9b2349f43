#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "evoattack/classifier.hpp"
#include "evoattack/dataset.hpp"
#include "evoattack/evo.hpp"

namespace evoattack {

enum class Metric { L0, L2, LInf };

std::string to_string(Metric metric);
Metric metric_from_string(const std::string& s);

enum class AttackMode { NonTargeted, Targeted };

std::string to_string(AttackMode mode);

struct AttackSpec {
  AttackMode mode = AttackMode::NonTargeted;
  int label = 0;  // the real label r (non-targeted) or the target label t (targeted)
  Metric metric = Metric::L2;
  double penalty = 1e4;  // M; must exceed the largest attainable distance
  GaParams ga;
  StoppingRule stopping;  // off by default: fixed-iteration runs
};

// Rejects specs whose penalty cannot dominate the distance term, bad labels,
// and invalid GA parameters.
void validate(const AttackSpec& spec, std::size_t genome_length, int num_classes);

double distance(const std::vector<double>& x, const std::vector<double>& y, Metric metric);

// max(probs_r - max_{i != r} probs_i, 0): zero once the classifier prefers
// any other label.
double loss_nontargeted(const std::vector<double>& probs, int real_label);

// max(max_{i != t} probs_i - probs_t, 0): zero once the target label leads.
double loss_targeted(const std::vector<double>& probs, int target_label);

// distance + penalty * loss; performs exactly one oracle query.
double attack_fitness(const std::vector<double>& original, const std::vector<double>& candidate,
                      const Oracle& oracle, const AttackSpec& spec);

enum class AttackStatus { Success, Failure, SkippedInitiallyMisclassified };

std::string to_string(AttackStatus status);

struct AttackResult {
  AttackStatus status = AttackStatus::Failure;
  AttackMode mode = AttackMode::NonTargeted;
  int sample_index = -1;  // dataset position, filled by batch_attack
  int true_label = -1;
  int attack_label = -1;  // r or t, depending on mode
  bool success = false;
  Image adversarial;
  double distance = 0.0;
  double final_fitness = 0.0;
  int predicted_label = -1;
  long long queries = 0;  // fitness evaluations + the certification query
  std::size_t generations = 0;
  double penalty = 0.0;
  TrendLog trend;
};

// Drives the evolutionary engine against the oracle and certifies the elite
// with a fresh query. Non-targeted attacks on samples the oracle already
// misclassifies are skipped, not failed.
AttackResult run_attack(const Oracle& oracle, const Image& original, const AttackSpec& spec,
                        std::size_t eval_threads = 1);

class ShortfallError : public std::runtime_error {
 public:
  ShortfallError(std::size_t found, std::size_t requested)
      : std::runtime_error("only " + std::to_string(found) + " of " + std::to_string(requested) +
                           " requested samples are initially classified correctly"),
        found_(found),
        requested_(requested) {}

  std::size_t found() const { return found_; }
  std::size_t requested() const { return requested_; }

 private:
  std::size_t found_;
  std::size_t requested_;
};

struct BatchOptions {
  std::size_t count = 0;             // N samples to attack
  bool targeted_all_labels = true;   // targeted mode: one attack per non-true label
  std::uint64_t seed = 0;            // per-attack seeds derive from this
  std::size_t jobs = 1;              // concurrent attacks
  std::size_t eval_threads = 1;      // fitness-evaluation workers per attack
};

// Attacks the first `count` initially-correctly-classified samples of the
// dataset. Results come back in deterministic order, independent of jobs.
std::vector<AttackResult> batch_attack(const Oracle& oracle, const Dataset& data,
                                       const AttackSpec& spec_template,
                                       const BatchOptions& options);

// Table-style GA defaults per dataset family: "mnist", "cifar10", "synth".
GaParams ga_profile(std::string_view name);

}  // namespace evoattack
