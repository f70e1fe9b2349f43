#include "evoattack/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace evoattack {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  return out;
}

// Accumulating over sorted values keeps the aggregates independent of the
// order the results arrive in.
double sorted_sum(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double acc = 0.0;
  for (double v : values) acc += v;
  return acc;
}

AttackStatus status_from_string(const std::string& s) {
  if (s == "success") return AttackStatus::Success;
  if (s == "failure") return AttackStatus::Failure;
  if (s == "skipped-initially-misclassified") return AttackStatus::SkippedInitiallyMisclassified;
  throw std::runtime_error("unknown attack status '" + s + "'");
}

}  // namespace

BatchSummary summarize(const std::vector<AttackResult>& results, std::size_t histogram_bins,
                       std::string model_id) {
  if (results.empty()) throw std::invalid_argument("summarize: empty result list");
  if (histogram_bins == 0) throw std::invalid_argument("summarize: need at least one bin");

  std::vector<const AttackResult*> ran;
  for (const auto& r : results) {
    if (r.status != AttackStatus::SkippedInitiallyMisclassified) ran.push_back(&r);
  }
  if (ran.empty()) throw std::invalid_argument("summarize: every attack was skipped");

  BatchSummary s;
  s.model_id = std::move(model_id);
  s.mode = to_string(ran.front()->mode);
  s.attacks = ran.size();

  std::vector<double> success_distances;
  for (const auto* r : ran) {
    if (r->success) success_distances.push_back(r->distance);
  }
  s.successes = success_distances.size();
  s.success_prob = double(s.successes) / double(s.attacks);

  if (!success_distances.empty()) {
    const double n = double(success_distances.size());
    const double mean = sorted_sum(success_distances) / n;
    std::vector<double> sq;
    sq.reserve(success_distances.size());
    for (double d : success_distances) sq.push_back((d - mean) * (d - mean));
    s.distance_mean = mean;
    s.distance_sd = std::sqrt(sorted_sum(std::move(sq)) / n);
  }

  std::size_t max_len = 0;
  for (const auto* r : ran) max_len = std::max(max_len, r->trend.size());
  s.mean_trend.resize(max_len);
  for (std::size_t g = 0; g < max_len; ++g) {
    std::vector<double> at_g;
    for (const auto* r : ran) {
      if (g < r->trend.size()) at_g.push_back(r->trend[g].best_fitness);
    }
    s.mean_trend[g] = sorted_sum(std::move(at_g)) / double(
        std::count_if(ran.begin(), ran.end(),
                      [g](const AttackResult* r) { return g < r->trend.size(); }));
  }

  double lo = ran.front()->final_fitness, hi = lo;
  for (const auto* r : ran) {
    lo = std::min(lo, r->final_fitness);
    hi = std::max(hi, r->final_fitness);
  }
  const double width = (hi - lo) / double(histogram_bins);
  s.fitness_histogram.resize(histogram_bins);
  for (std::size_t b = 0; b < histogram_bins; ++b) {
    s.fitness_histogram[b].lower = lo + width * double(b);
    s.fitness_histogram[b].upper = lo + width * double(b + 1);
  }
  s.fitness_histogram.back().upper = hi;
  for (const auto* r : ran) {
    std::size_t b = histogram_bins - 1;
    if (width > 0.0) {
      b = std::min(std::size_t((r->final_fitness - lo) / width), histogram_bins - 1);
    }
    ++s.fitness_histogram[b].count;
  }
  return s;
}

DeltaImage perturbation(const Image& original, const Image& adversarial) {
  if (!(original.shape == adversarial.shape)) {
    throw std::invalid_argument("perturbation: shape mismatch");
  }
  DeltaImage d;
  d.shape = original.shape;
  d.delta.resize(original.pixels.size());
  for (std::size_t i = 0; i < d.delta.size(); ++i) {
    d.delta[i] = adversarial.pixels[i] - original.pixels[i];
  }
  return d;
}

void export_trend_csv(const TrendLog& trend, double penalty, const std::string& path) {
  auto out = open_out(path);
  out << "generation,best_fitness,loss_term_zero\n";
  for (const auto& p : trend) {
    out << p.generation << ',' << fmt(p.best_fitness) << ','
        << (p.best_fitness < penalty ? "true" : "false") << '\n';
  }
}

void export_mean_trend_csv(const std::vector<double>& mean_trend, const std::string& path) {
  auto out = open_out(path);
  out << "generation,mean_best_fitness\n";
  for (std::size_t g = 0; g < mean_trend.size(); ++g) {
    out << (g + 1) << ',' << fmt(mean_trend[g]) << '\n';
  }
}

void export_summary_csv(const std::vector<BatchSummary>& summaries, const std::string& path) {
  auto out = open_out(path);
  out << "model,mode,attacks,successes,prob,mean,sd\n";
  for (const auto& s : summaries) {
    out << s.model_id << ',' << s.mode << ',' << s.attacks << ',' << s.successes << ','
        << fmt(s.success_prob) << ',' << (s.distance_mean ? fmt(*s.distance_mean) : "") << ','
        << (s.distance_sd ? fmt(*s.distance_sd) : "") << '\n';
  }
}

void export_histogram_csv(const std::vector<HistogramBin>& bins, const std::string& path) {
  auto out = open_out(path);
  out << "bin_lower,bin_upper,count\n";
  for (const auto& b : bins) {
    out << fmt(b.lower) << ',' << fmt(b.upper) << ',' << b.count << '\n';
  }
}

void export_results_jsonl(const std::vector<AttackResult>& results, const std::string& path) {
  auto out = open_out(path);
  for (const auto& r : results) {
    json rec{{"sample_index", r.sample_index},
             {"mode", to_string(r.mode)},
             {"status", to_string(r.status)},
             {"true_label", r.true_label},
             {"attack_label", r.attack_label},
             {"success", r.success},
             {"predicted_label", r.predicted_label},
             {"distance", r.distance},
             {"final_fitness", r.final_fitness},
             {"queries", r.queries},
             {"generations", r.generations},
             {"penalty", r.penalty}};
    json trend = json::array();
    for (const auto& p : r.trend) trend.push_back({p.generation, p.best_fitness});
    rec["trend"] = std::move(trend);
    out << rec.dump() << '\n';
  }
}

std::vector<AttackResult> import_results_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open file");
  std::vector<AttackResult> results;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad JSON record (" +
                               std::string(e.what()) + ")");
    }
    AttackResult r;
    r.sample_index = rec.at("sample_index").get<int>();
    r.mode = rec.at("mode").get<std::string>() == "targeted" ? AttackMode::Targeted
                                                             : AttackMode::NonTargeted;
    r.status = status_from_string(rec.at("status").get<std::string>());
    r.true_label = rec.at("true_label").get<int>();
    r.attack_label = rec.at("attack_label").get<int>();
    r.success = rec.at("success").get<bool>();
    r.predicted_label = rec.at("predicted_label").get<int>();
    r.distance = rec.at("distance").get<double>();
    r.final_fitness = rec.at("final_fitness").get<double>();
    r.queries = rec.at("queries").get<long long>();
    r.generations = rec.at("generations").get<std::size_t>();
    r.penalty = rec.at("penalty").get<double>();
    for (const auto& p : rec.at("trend")) {
      r.trend.push_back({p.at(0).get<std::size_t>(), p.at(1).get<double>()});
    }
    results.push_back(std::move(r));
  }
  return results;
}

void write_raw_f64(const std::vector<double>& values, const std::string& path) {
  auto out = open_out(path, true);
  for (double v : values) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, sizeof(bits));
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = char((bits >> (8 * i)) & 0xff);
    out.write(b, 8);
  }
}

namespace {

void write_pnm_bytes(const Shape& shape, const std::vector<std::uint8_t>& bytes,
                     const std::string& path) {
  if (shape.channels != 1 && shape.channels != 3) {
    throw std::invalid_argument("pnm export: only 1- or 3-channel images");
  }
  auto out = open_out(path, true);
  out << (shape.channels == 1 ? "P5" : "P6") << '\n'
      << shape.width << ' ' << shape.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
}

}  // namespace

void write_image_pnm(const Image& image, const std::string& path) {
  std::vector<std::uint8_t> bytes(image.pixels.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = pixel_to_byte(image.pixels[i]);
  write_pnm_bytes(image.shape, bytes, path);
}

void write_delta_pnm(const DeltaImage& delta, const std::string& path) {
  std::vector<std::uint8_t> bytes(delta.delta.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    // -1 -> 0, 0 -> mid-gray, +1 -> 255
    const long v = std::lround(127.5 + delta.delta[i] * 127.5);
    bytes[i] = std::uint8_t(std::clamp(v, 0L, 255L));
  }
  write_pnm_bytes(delta.shape, bytes, path);
}

}  // namespace evoattack
