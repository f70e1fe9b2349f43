#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <vector>

namespace evoattack {

/// One candidate solution: a real vector in [0,1]^n with a cached objective value.
struct Individual {
  std::vector<double> genome;
  std::optional<double> fitness;
};

struct GaParams {
  std::size_t population_size = 100;
  std::size_t generations = 200;
  double crossover_prob = 0.5;   // per pair
  double gene_swap_prob = 0.5;   // per gene, once a pair crosses
  double mutation_prob = 0.05;   // per individual
  double gaussian_mean = 0.0;    // byte scale, as is the sigma below
  double gaussian_sigma = 30.0;  // divided by 255 to act on [0,1] genes
  double init_epsilon = 1.0 / 255.0;
  std::size_t tournament_size = 3;
  double mutation_step_cap = 3.0;        // noise clamped to this many sigmas
  double zero_pixel_mutation_factor = 0.1;  // mutation rate factor for zero-valued origin genes
  std::uint64_t seed = 0;
};

void validate(const GaParams& params);

// Must be pure: the same genome always maps to the same value. That is what
// lets evaluations run on parallel workers without changing results.
using FitnessFn = std::function<double(const std::vector<double>&)>;

struct TrendPoint {
  std::size_t generation = 0;
  double best_fitness = 0.0;
};
using TrendLog = std::vector<TrendPoint>;

struct StoppingRule {
  bool enabled = false;
  std::size_t window = 30;
  double min_improvement = 1e-6;
  // only stop once the best fitness is below this (attack: the penalty M,
  // i.e. the loss term has already reached zero)
  double fitness_threshold = std::numeric_limits<double>::infinity();
};

struct Population {
  std::vector<Individual> individuals;
  std::vector<double> origin;  // the unperturbed reference vector
  Individual elite;            // best individual seen so far
  bool has_elite = false;
  std::size_t generation = 0;
};

// Each gene starts at clamp(origin_i + u, 0, 1) with u uniform in [-eps, +eps].
Population init_population(const std::vector<double>& origin, const GaParams& params,
                           std::mt19937_64& rng);

// k draws with replacement; returns the index of the draw with minimal
// fitness (ties keep the earliest draw). All fitnesses must be cached.
std::size_t tournament_select(const Population& pop, std::size_t tournament_size,
                              std::mt19937_64& rng);

// Per gene, children swap parents' values with probability gene_swap_prob.
// Children's fitness is unset.
std::pair<Individual, Individual> uniform_crossover(const Individual& a, const Individual& b,
                                                    double gene_swap_prob, std::mt19937_64& rng);

// With probability mutation_prob the individual mutates: every gene gets
// Gaussian noise (mean, sigma/255) clamped to +-cap*sigma and the result
// clamped to [0,1]. Genes whose ORIGIN pixel is exactly 0 mutate only with
// probability zero_pixel_mutation_factor.
Individual gaussian_mutate(Individual ind, const std::vector<double>& origin,
                           const GaParams& params, std::mt19937_64& rng);

// Fills unset fitness values (optionally on `threads` workers, written back
// in index order) and refreshes the elite. Returns the evaluation count.
std::size_t evaluate_population(Population& pop, const FitnessFn& fitness,
                                std::size_t threads = 1);

// One generation: evaluate pending fitnesses, update the elite, then build
// the successor population (elite copied in, the rest bred by tournament
// selection, uniform crossover and Gaussian mutation).
Population step(const Population& pop, const FitnessFn& fitness, const GaParams& params,
                std::mt19937_64& rng, std::size_t threads = 1);

struct RunResult {
  Individual elite;
  TrendLog trend;  // per-generation best fitness; non-increasing by elitism
  std::size_t generations_executed = 0;
  std::size_t evaluations = 0;
  bool stopped_early = false;
};

RunResult run(const std::vector<double>& origin, const FitnessFn& fitness,
              const GaParams& params, const StoppingRule& stopping = {},
              std::size_t threads = 1);

}  // namespace evoattack
