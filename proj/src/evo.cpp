#include "evoattack/evo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace evoattack {

namespace {

void update_elite(Population& pop) {
  for (const auto& ind : pop.individuals) {
    if (!ind.fitness) throw std::logic_error("evo: unevaluated individual while updating elite");
    if (!pop.has_elite || *ind.fitness < *pop.elite.fitness) {
      pop.elite = ind;
      pop.has_elite = true;
    }
  }
}

// Breeds the successor generation. The elite goes in first with its cached
// fitness; children are selected, crossed and mutated, fitness unset.
Population make_offspring(const Population& pop, const GaParams& params, std::mt19937_64& rng) {
  Population next;
  next.origin = pop.origin;
  next.generation = pop.generation + 1;
  next.elite = pop.elite;
  next.has_elite = pop.has_elite;
  next.individuals.reserve(params.population_size);
  next.individuals.push_back(pop.elite);

  std::uniform_real_distribution<double> coin(0.0, 1.0);
  while (next.individuals.size() < params.population_size) {
    const std::size_t ia = tournament_select(pop, params.tournament_size, rng);
    const std::size_t ib = tournament_select(pop, params.tournament_size, rng);
    Individual child_a = pop.individuals[ia];
    Individual child_b = pop.individuals[ib];
    if (coin(rng) < params.crossover_prob) {
      std::tie(child_a, child_b) = uniform_crossover(child_a, child_b, params.gene_swap_prob, rng);
    }
    child_a = gaussian_mutate(std::move(child_a), pop.origin, params, rng);
    child_b = gaussian_mutate(std::move(child_b), pop.origin, params, rng);
    next.individuals.push_back(std::move(child_a));
    if (next.individuals.size() < params.population_size) {
      next.individuals.push_back(std::move(child_b));
    }
  }
  return next;
}

}  // namespace

void validate(const GaParams& p) {
  if (p.population_size < 2) throw std::invalid_argument("ga: population_size must be >= 2");
  if (p.crossover_prob < 0.0 || p.crossover_prob > 1.0) {
    throw std::invalid_argument("ga: crossover_prob must lie in [0,1]");
  }
  if (p.gene_swap_prob < 0.0 || p.gene_swap_prob > 1.0) {
    throw std::invalid_argument("ga: gene_swap_prob must lie in [0,1]");
  }
  if (p.mutation_prob < 0.0 || p.mutation_prob > 1.0) {
    throw std::invalid_argument("ga: mutation_prob must lie in [0,1]");
  }
  if (p.gaussian_sigma < 0.0) throw std::invalid_argument("ga: gaussian_sigma must be >= 0");
  if (p.tournament_size < 1) throw std::invalid_argument("ga: tournament_size must be >= 1");
  if (p.tournament_size > p.population_size) {
    throw std::invalid_argument("ga: tournament_size exceeds population_size");
  }
  if (p.mutation_step_cap < 0.0) throw std::invalid_argument("ga: mutation_step_cap must be >= 0");
  if (p.zero_pixel_mutation_factor < 0.0 || p.zero_pixel_mutation_factor > 1.0) {
    throw std::invalid_argument("ga: zero_pixel_mutation_factor must lie in [0,1]");
  }
}

Population init_population(const std::vector<double>& origin, const GaParams& params,
                           std::mt19937_64& rng) {
  validate(params);
  for (double v : origin) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("ga: origin gene outside [0,1]");
  }
  Population pop;
  pop.origin = origin;
  pop.individuals.resize(params.population_size);
  if (params.init_epsilon == 0.0) {
    for (auto& ind : pop.individuals) ind.genome = origin;
    return pop;
  }
  std::uniform_real_distribution<double> jitter(-params.init_epsilon, params.init_epsilon);
  for (auto& ind : pop.individuals) {
    ind.genome.resize(origin.size());
    for (std::size_t i = 0; i < origin.size(); ++i) {
      ind.genome[i] = std::clamp(origin[i] + jitter(rng), 0.0, 1.0);
    }
  }
  return pop;
}

std::size_t tournament_select(const Population& pop, std::size_t tournament_size,
                              std::mt19937_64& rng) {
  if (tournament_size < 1 || tournament_size > pop.individuals.size()) {
    throw std::invalid_argument("tournament_select: bad tournament size");
  }
  std::uniform_int_distribution<std::size_t> pick(0, pop.individuals.size() - 1);
  std::size_t best = pick(rng);
  if (!pop.individuals[best].fitness) {
    throw std::logic_error("tournament_select: unevaluated individual");
  }
  for (std::size_t k = 1; k < tournament_size; ++k) {
    const std::size_t challenger = pick(rng);
    if (!pop.individuals[challenger].fitness) {
      throw std::logic_error("tournament_select: unevaluated individual");
    }
    if (*pop.individuals[challenger].fitness < *pop.individuals[best].fitness) {
      best = challenger;
    }
  }
  return best;
}

std::pair<Individual, Individual> uniform_crossover(const Individual& a, const Individual& b,
                                                    double gene_swap_prob, std::mt19937_64& rng) {
  if (a.genome.size() != b.genome.size()) {
    throw std::invalid_argument("uniform_crossover: genome length mismatch");
  }
  Individual ca, cb;
  ca.genome = a.genome;
  cb.genome = b.genome;
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (std::size_t i = 0; i < ca.genome.size(); ++i) {
    if (coin(rng) < gene_swap_prob) std::swap(ca.genome[i], cb.genome[i]);
  }
  return {std::move(ca), std::move(cb)};
}

Individual gaussian_mutate(Individual ind, const std::vector<double>& origin,
                           const GaParams& params, std::mt19937_64& rng) {
  if (ind.genome.size() != origin.size()) {
    throw std::invalid_argument("gaussian_mutate: genome/origin length mismatch");
  }
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (coin(rng) >= params.mutation_prob) return ind;

  const double sigma = params.gaussian_sigma / 255.0;
  const double cap = params.mutation_step_cap * sigma;
  if (sigma > 0.0) {
    std::normal_distribution<double> noise(params.gaussian_mean, sigma);
    for (std::size_t i = 0; i < ind.genome.size(); ++i) {
      if (origin[i] == 0.0 && coin(rng) >= params.zero_pixel_mutation_factor) continue;
      const double delta = std::clamp(noise(rng), -cap, cap);
      ind.genome[i] = std::clamp(ind.genome[i] + delta, 0.0, 1.0);
    }
  }
  ind.fitness.reset();
  return ind;
}

std::size_t evaluate_population(Population& pop, const FitnessFn& fitness, std::size_t threads) {
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < pop.individuals.size(); ++i) {
    if (!pop.individuals[i].fitness) pending.push_back(i);
  }
  if (threads <= 1 || pending.size() < 2) {
    for (std::size_t i : pending) {
      pop.individuals[i].fitness = fitness(pop.individuals[i].genome);
    }
  } else {
    const std::size_t workers = std::min(threads, pending.size());
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t k = w; k < pending.size(); k += workers) {
          auto& ind = pop.individuals[pending[k]];
          ind.fitness = fitness(ind.genome);
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  update_elite(pop);
  return pending.size();
}

Population step(const Population& pop, const FitnessFn& fitness, const GaParams& params,
                std::mt19937_64& rng, std::size_t threads) {
  validate(params);
  if (pop.individuals.size() != params.population_size) {
    throw std::invalid_argument("step: population size does not match params");
  }
  Population current = pop;
  evaluate_population(current, fitness, threads);
  return make_offspring(current, params, rng);
}

RunResult run(const std::vector<double>& origin, const FitnessFn& fitness, const GaParams& params,
              const StoppingRule& stopping, std::size_t threads) {
  validate(params);
  // one generator, fixed draw order: initialization, then per generation
  // selection -> crossover -> mutation. Evaluation never draws, which is
  // what makes threaded evaluation bit-identical to sequential.
  std::mt19937_64 rng(params.seed);

  Population pop = init_population(origin, params, rng);
  RunResult result;
  result.evaluations += evaluate_population(pop, fitness, threads);

  for (std::size_t g = 1; g <= params.generations; ++g) {
    pop = make_offspring(pop, params, rng);
    result.evaluations += evaluate_population(pop, fitness, threads);
    result.trend.push_back({g, *pop.elite.fitness});

    if (stopping.enabled && result.trend.size() >= stopping.window) {
      const double then = result.trend[result.trend.size() - stopping.window].best_fitness;
      const double now = result.trend.back().best_fitness;
      if (then - now < stopping.min_improvement && now < stopping.fitness_threshold) {
        result.stopped_early = true;
        break;
      }
    }
  }

  result.elite = pop.elite;
  result.generations_executed = result.trend.size();
  return result;
}

}  // namespace evoattack
