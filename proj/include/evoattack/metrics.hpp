#pragma once

#include <optional>
#include <string>
#include <vector>

#include "evoattack/attack.hpp"
#include "evoattack/dataset.hpp"

namespace evoattack {

struct HistogramBin {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t count = 0;
};

struct BatchSummary {
  std::string model_id;
  std::string mode;
  std::size_t attacks = 0;
  std::size_t successes = 0;
  double success_prob = 0.0;
  // Distance statistics cover successful attacks only and use the
  // population standard deviation (divide by N).
  std::optional<double> distance_mean;
  std::optional<double> distance_sd;
  std::vector<double> mean_trend;  // per-generation mean of best fitness
  std::vector<HistogramBin> fitness_histogram;  // over final best fitness
};

// Aggregates a batch. Skipped attacks are excluded; throws on an empty or
// all-skipped input.
BatchSummary summarize(const std::vector<AttackResult>& results, std::size_t histogram_bins = 10,
                       std::string model_id = "");

/// Signed per-pixel difference adversarial - original, in [-1, 1].
struct DeltaImage {
  std::vector<double> delta;
  Shape shape;
};

DeltaImage perturbation(const Image& original, const Image& adversarial);

// CSV exports (RFC-4180 style, header row, doubles at 17 significant digits).
void export_trend_csv(const TrendLog& trend, double penalty, const std::string& path);
void export_mean_trend_csv(const std::vector<double>& mean_trend, const std::string& path);
void export_summary_csv(const std::vector<BatchSummary>& summaries, const std::string& path);
void export_histogram_csv(const std::vector<HistogramBin>& bins, const std::string& path);

// One JSON record per attack, one per line.
void export_results_jsonl(const std::vector<AttackResult>& results, const std::string& path);
std::vector<AttackResult> import_results_jsonl(const std::string& path);

// Raw little-endian float64 dump.
void write_raw_f64(const std::vector<double>& values, const std::string& path);

// Binary PGM (1 channel) / PPM (3 channels). Plain images map [0,1] to
// 0..255; delta images use a diverging scale with 0 at mid-gray so negative
// and positive perturbations are distinguishable.
void write_image_pnm(const Image& image, const std::string& path);
void write_delta_pnm(const DeltaImage& delta, const std::string& path);

}  // namespace evoattack
