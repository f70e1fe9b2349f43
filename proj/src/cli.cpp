#include "evoattack/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "evoattack/attack.hpp"
#include "evoattack/classifier.hpp"
#include "evoattack/dataset.hpp"
#include "evoattack/metrics.hpp"
#include "evoattack/rng.hpp"

namespace evoattack {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kOk = 0;
constexpr int kDomainError = 1;
constexpr int kUsageError = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json shape_json(const Shape& s) {
  return json{{"height", s.height}, {"width", s.width}, {"channels", s.channels}};
}

// ---- shared option groups ------------------------------------------------

struct DatasetArgs {
  std::string images;
  std::string labels;
  std::vector<std::string> cifar;

  void attach(CLI::App* cmd) {
    auto* img = cmd->add_option("--images", images, "IDX image file");
    auto* lab = cmd->add_option("--labels", labels, "IDX label file");
    img->needs(lab);
    lab->needs(img);
    cmd->add_option("--cifar", cifar, "CIFAR-10 binary batch file (repeatable)")
        ->excludes(img)
        ->excludes(lab);
  }

  Dataset load() const {
    if (!cifar.empty()) return load_cifar10(cifar);
    if (images.empty()) {
      throw UsageError("a dataset is required: --images/--labels or --cifar");
    }
    return load_idx(images, labels);
  }

  json echo() const {
    return json{{"images", images}, {"labels", labels}, {"cifar", cifar}};
  }
};

struct GaArgs {
  std::string profile = "synth";
  std::size_t population = 0;
  std::size_t generations = 0;
  double crossover_prob = 0, gene_swap_prob = 0, mutation_prob = 0;
  double gaussian_mean = 0, gaussian_sigma = 0, init_epsilon = 0;
  std::size_t tournament = 0;
  double step_cap = 0, zero_factor = 0;
  bool early_stop = false;

  CLI::Option *o_pop{}, *o_gens{}, *o_pc{}, *o_swap{}, *o_pm{}, *o_mean{}, *o_sigma{}, *o_eps{},
      *o_tour{}, *o_cap{}, *o_zero{};

  void attach(CLI::App* cmd) {
    cmd->add_option("--profile", profile, "GA defaults: synth, mnist, or cifar10")
        ->capture_default_str();
    o_pop = cmd->add_option("--population", population, "population size");
    o_gens = cmd->add_option("--generations", generations, "number of GA iterations");
    o_pc = cmd->add_option("--crossover-prob", crossover_prob, "per-pair crossover probability");
    o_swap = cmd->add_option("--gene-swap-prob", gene_swap_prob,
                             "per-gene swap rate once a pair crosses");
    o_pm = cmd->add_option("--mutation-prob", mutation_prob, "per-individual mutation probability");
    o_mean = cmd->add_option("--gaussian-mean", gaussian_mean, "mutation noise mean (byte scale)");
    o_sigma = cmd->add_option("--gaussian-sigma", gaussian_sigma,
                              "mutation noise standard deviation (byte scale)");
    o_eps = cmd->add_option("--init-epsilon", init_epsilon,
                            "initialization jitter amplitude in [0,1] units");
    o_tour = cmd->add_option("--tournament", tournament, "tournament size");
    o_cap = cmd->add_option("--step-cap", step_cap, "mutation step cap, in sigmas");
    o_zero = cmd->add_option("--zero-mutation-factor", zero_factor,
                             "mutation rate factor for zero-valued origin pixels");
    cmd->add_flag("--early-stop", early_stop,
                  "stop once best fitness stalls below the penalty (default: fixed iterations)");
  }

  GaParams resolve(std::uint64_t seed) const {
    GaParams p = ga_profile(profile);
    if (*o_pop) p.population_size = population;
    if (*o_gens) p.generations = generations;
    if (*o_pc) p.crossover_prob = crossover_prob;
    if (*o_swap) p.gene_swap_prob = gene_swap_prob;
    if (*o_pm) p.mutation_prob = mutation_prob;
    if (*o_mean) p.gaussian_mean = gaussian_mean;
    if (*o_sigma) p.gaussian_sigma = gaussian_sigma;
    if (*o_eps) p.init_epsilon = init_epsilon;
    if (*o_tour) p.tournament_size = tournament;
    if (*o_cap) p.mutation_step_cap = step_cap;
    if (*o_zero) p.zero_pixel_mutation_factor = zero_factor;
    p.seed = seed;
    return p;
  }

  static json echo(const GaParams& p, bool early_stop) {
    return json{{"population_size", p.population_size},
                {"generations", p.generations},
                {"crossover_prob", p.crossover_prob},
                {"gene_swap_prob", p.gene_swap_prob},
                {"mutation_prob", p.mutation_prob},
                {"gaussian_mean", p.gaussian_mean},
                {"gaussian_sigma", p.gaussian_sigma},
                {"init_epsilon", p.init_epsilon},
                {"tournament_size", p.tournament_size},
                {"mutation_step_cap", p.mutation_step_cap},
                {"zero_pixel_mutation_factor", p.zero_pixel_mutation_factor},
                {"seed", p.seed},
                {"early_stop", early_stop}};
  }
};

struct ModelArgs {
  std::string kind = "lr";
  std::vector<std::size_t> hidden = {128, 128};
  std::size_t filters = 8, kernel = 3, pool = 2;
  double learning_rate = 0.5;
  std::size_t epochs = 100;
  std::size_t batch_size = 32;
  double temperature = 1.0;
  double accuracy_floor = 0.0;

  void attach(CLI::App* cmd, const std::string& prefix = "") {
    const std::string p = prefix.empty() ? "--" : "--" + prefix + "-";
    cmd->add_option(p + "kind", kind, "model kind: lr, dnn, or cnn")->capture_default_str();
    cmd->add_option(p + "hidden", hidden, "hidden layer widths (dnn)")->capture_default_str();
    cmd->add_option(p + "filters", filters, "conv filter count (cnn)")->capture_default_str();
    cmd->add_option(p + "kernel", kernel, "conv kernel size (cnn)")->capture_default_str();
    cmd->add_option(p + "pool", pool, "max-pool size (cnn)")->capture_default_str();
    if (prefix.empty()) {
      cmd->add_option("--learning-rate", learning_rate, "SGD learning rate")
          ->capture_default_str();
      cmd->add_option("--epochs", epochs, "training epochs")->capture_default_str();
      cmd->add_option("--batch-size", batch_size, "mini-batch size")->capture_default_str();
      cmd->add_option("--accuracy-floor", accuracy_floor,
                      "warn when training accuracy ends below this")
          ->capture_default_str();
    }
  }

  ModelConfig resolve(const Shape& input_shape, int num_classes, std::uint64_t init_seed,
                      double temp) const {
    ModelConfig c;
    c.kind = model_kind_from_string(kind);
    c.input_shape = input_shape;
    c.num_classes = num_classes;
    c.hidden_widths = hidden;
    c.conv = ConvSpec{filters, kernel, pool};
    c.learning_rate = learning_rate;
    c.epochs = epochs;
    c.batch_size = batch_size;
    c.init_seed = init_seed;
    c.temperature = temp;
    c.accuracy_floor = accuracy_floor;
    return c;
  }

  static json echo(const ModelConfig& c) {
    return json{{"kind", to_string(c.kind)},
                {"input_shape", shape_json(c.input_shape)},
                {"num_classes", c.num_classes},
                {"hidden_widths", c.hidden_widths},
                {"conv",
                 {{"filters", c.conv.filters}, {"kernel", c.conv.kernel}, {"pool", c.conv.pool}}},
                {"learning_rate", c.learning_rate},
                {"epochs", c.epochs},
                {"batch_size", c.batch_size},
                {"init_seed", c.init_seed},
                {"temperature", c.temperature},
                {"accuracy_floor", c.accuracy_floor}};
  }
};

fs::path prepare_out_dir(const std::string& out) {
  fs::path dir(out);
  fs::create_directories(dir);
  return dir;
}

void write_config_echo(const fs::path& out_dir, const json& echo) {
  std::ofstream f(out_dir / "config-echo.json");
  if (!f) throw std::runtime_error((out_dir / "config-echo.json").string() + ": cannot write");
  f << echo.dump(2) << '\n';
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error(path.string() + ": cannot write");
  f << j.dump(2) << '\n';
}

// ---- subcommands -----------------------------------------------------------

struct MakeSynthCmd {
  CLI::App* cmd{};
  int classes = 10;
  int per_class = 100;
  std::uint64_t seed = 1;
  std::string out;

  void attach(CLI::App& app) {
    cmd = app.add_subcommand("make-synth", "generate the deterministic 8x8 synthetic dataset");
    cmd->add_option("--classes", classes, "number of classes (2..10)")->capture_default_str();
    cmd->add_option("--per-class", per_class, "images per class")->capture_default_str();
    cmd->add_option("--seed", seed, "noise seed")->capture_default_str();
    cmd->add_option("--out", out, "output directory")->envname("EVOATTACK_OUT")->required();
  }

  int execute() const {
    const fs::path dir = prepare_out_dir(out);
    const Dataset data = make_synthetic(classes, per_class, seed);
    save_idx(data, (dir / "images.idx").string(), (dir / "labels.idx").string());
    write_config_echo(dir, json{{"command", "make-synth"},
                                {"classes", classes},
                                {"per_class", per_class},
                                {"seed", seed},
                                {"out", out}});
    std::cerr << "wrote " << data.size() << " images to " << (dir / "images.idx") << '\n';
    return kOk;
  }
};

struct TrainCmd {
  CLI::App* cmd{};
  DatasetArgs dataset;
  ModelArgs model;
  double train_fraction = 0.8;
  double temperature = 1.0;
  std::uint64_t seed = 1;
  std::string out;

  void attach(CLI::App& app) {
    cmd = app.add_subcommand("train", "train a classifier");
    dataset.attach(cmd);
    model.attach(cmd);
    cmd->add_option("--train-fraction", train_fraction,
                    "train split fraction; 1.0 trains on everything")
        ->capture_default_str()
        ->check(CLI::Range(1e-9, 1.0));
    cmd->add_option("--temperature", temperature, "softmax temperature")->capture_default_str();
    cmd->add_option("--seed", seed, "seed for split, init and SGD order")->capture_default_str();
    cmd->add_option("--out", out, "output directory")->envname("EVOATTACK_OUT")->required();
  }

  int execute() const {
    const fs::path dir = prepare_out_dir(out);
    const Dataset all = dataset.load();
    Dataset train_set = all, test_set;
    if (train_fraction < 1.0) {
      std::tie(train_set, test_set) = split(all, train_fraction, derive_seed(seed, 0));
    }
    const ModelConfig config =
        model.resolve(train_set.images.empty() ? Shape{} : train_set.images.front().shape,
                      all.num_classes, derive_seed(seed, 1), temperature);
    const TrainResult result = train(config, train_set, derive_seed(seed, 2));

    save_weights(result.weights, (dir / "model.weights").string());
    json report{{"train_accuracy", result.train_accuracy},
                {"final_loss", result.final_loss},
                {"accuracy_floor_met", result.accuracy_floor_met}};
    if (!test_set.images.empty()) report["test_accuracy"] = accuracy(result.weights, test_set);
    write_json(dir / "train-report.json", report);
    write_config_echo(dir, json{{"command", "train"},
                                {"dataset", dataset.echo()},
                                {"model", ModelArgs::echo(config)},
                                {"train_fraction", train_fraction},
                                {"seed", seed},
                                {"out", out}});

    std::cerr << "train accuracy " << result.train_accuracy;
    if (!test_set.images.empty()) std::cerr << ", test accuracy " << accuracy(result.weights, test_set);
    std::cerr << '\n';
    if (!result.accuracy_floor_met) {
      std::cerr << "warning: training accuracy below the configured floor\n";
    }
    return kOk;
  }
};

struct DistillCmd {
  CLI::App* cmd{};
  DatasetArgs dataset;
  ModelArgs teacher;
  std::string student_kind;
  std::vector<std::size_t> student_hidden;
  double train_fraction = 0.8;
  double temperature = 10.0;
  double serve_temperature = 1.0;
  std::uint64_t seed = 1;
  std::string out;
  CLI::Option *o_student_kind{}, *o_student_hidden{};

  void attach(CLI::App& app) {
    cmd = app.add_subcommand("distill", "defensive distillation: teacher then student");
    dataset.attach(cmd);
    teacher.attach(cmd);
    o_student_kind =
        cmd->add_option("--student-kind", student_kind, "student kind (default: teacher's)");
    o_student_hidden = cmd->add_option("--student-hidden", student_hidden,
                                       "student hidden widths (default: teacher's)");
    cmd->add_option("--train-fraction", train_fraction, "train split fraction")
        ->capture_default_str()
        ->check(CLI::Range(1e-9, 1.0));
    cmd->add_option("--temperature", temperature, "distillation temperature T")
        ->capture_default_str();
    cmd->add_option("--serve-temperature", serve_temperature,
                    "temperature the student is served at")
        ->capture_default_str();
    cmd->add_option("--seed", seed, "seed")->capture_default_str();
    cmd->add_option("--out", out, "output directory")->envname("EVOATTACK_OUT")->required();
  }

  int execute() const {
    const fs::path dir = prepare_out_dir(out);
    const Dataset all = dataset.load();
    Dataset train_set = all, test_set;
    if (train_fraction < 1.0) {
      std::tie(train_set, test_set) = split(all, train_fraction, derive_seed(seed, 0));
    }
    const Shape shape = train_set.images.empty() ? Shape{} : train_set.images.front().shape;
    ModelConfig tcfg = teacher.resolve(shape, all.num_classes, derive_seed(seed, 1), temperature);
    ModelConfig scfg = tcfg;
    scfg.init_seed = derive_seed(seed, 2);
    if (*o_student_kind) scfg.kind = model_kind_from_string(student_kind);
    if (*o_student_hidden) scfg.hidden_widths = student_hidden;

    const DistillResult result =
        distill(tcfg, scfg, temperature, train_set, derive_seed(seed, 3), serve_temperature);

    save_weights(result.teacher.weights, (dir / "teacher.weights").string());
    save_weights(result.student.weights, (dir / "student.weights").string());
    json report{{"teacher_train_accuracy", result.teacher.train_accuracy},
                {"student_train_accuracy", result.student.train_accuracy}};
    if (!test_set.images.empty()) {
      report["teacher_test_accuracy"] = accuracy(result.teacher.weights, test_set);
      report["student_test_accuracy"] = accuracy(result.student.weights, test_set);
    }
    write_json(dir / "distill-report.json", report);
    write_config_echo(dir, json{{"command", "distill"},
                                {"dataset", dataset.echo()},
                                {"teacher", ModelArgs::echo(tcfg)},
                                {"student", ModelArgs::echo(scfg)},
                                {"temperature", temperature},
                                {"serve_temperature", serve_temperature},
                                {"train_fraction", train_fraction},
                                {"seed", seed},
                                {"out", out}});
    std::cerr << "teacher train accuracy " << result.teacher.train_accuracy
              << ", student train accuracy " << result.student.train_accuracy << '\n';
    return kOk;
  }
};

struct AttackCmd {
  CLI::App* cmd{};
  DatasetArgs dataset;
  GaArgs ga;
  std::string model_path;
  int image_index = 0;
  int target = -1;
  std::string metric = "l2";
  double penalty = 1e4;
  std::uint64_t seed = 1;
  std::size_t eval_threads = 1;
  std::string out;
  CLI::Option* o_target{};

  void attach(CLI::App& app) {
    cmd = app.add_subcommand("attack", "attack a single image");
    dataset.attach(cmd);
    ga.attach(cmd);
    cmd->add_option("--model", model_path, "weights file")->required();
    cmd->add_option("--image-index", image_index, "dataset index of the image to attack")
        ->required();
    o_target = cmd->add_option("--target", target, "target label (omit for non-targeted)");
    cmd->add_option("--metric", metric, "distance metric: l0, l2, or linf")
        ->capture_default_str();
    cmd->add_option("--penalty", penalty, "loss penalty M")->capture_default_str();
    cmd->add_option("--seed", seed, "attack seed")->capture_default_str();
    cmd->add_option("--eval-threads", eval_threads, "fitness evaluation workers")
        ->capture_default_str();
    cmd->add_option("--out", out, "output directory")->envname("EVOATTACK_OUT")->required();
  }

  int execute() const {
    const fs::path dir = prepare_out_dir(out);
    const Model oracle(load_weights(model_path));
    const Dataset data = dataset.load();
    if (image_index < 0 || std::size_t(image_index) >= data.size()) {
      throw std::runtime_error("image index " + std::to_string(image_index) +
                               " outside the dataset (size " + std::to_string(data.size()) + ")");
    }
    const Image& original = data.images[std::size_t(image_index)];
    const int true_label = data.labels[std::size_t(image_index)];

    AttackSpec spec;
    spec.mode = *o_target ? AttackMode::Targeted : AttackMode::NonTargeted;
    spec.label = *o_target ? target : true_label;
    spec.metric = metric_from_string(metric);
    spec.penalty = penalty;
    spec.ga = ga.resolve(seed);
    spec.stopping.enabled = ga.early_stop;

    AttackResult result = run_attack(oracle, original, spec, eval_threads);
    result.sample_index = image_index;
    result.true_label = true_label;

    export_results_jsonl({result}, (dir / "result.json").string());
    export_trend_csv(result.trend, result.penalty, (dir / "trend.csv").string());
    write_raw_f64(result.adversarial.pixels, (dir / "adversarial.raw").string());
    const DeltaImage delta = perturbation(original, result.adversarial);
    write_raw_f64(delta.delta, (dir / "delta.raw").string());
    const char* img_ext = original.shape.channels == 3 ? ".ppm" : ".pgm";
    write_image_pnm(result.adversarial, (dir / ("adversarial" + std::string(img_ext))).string());
    write_delta_pnm(delta, (dir / ("delta" + std::string(img_ext))).string());
    write_config_echo(dir, json{{"command", "attack"},
                                {"dataset", dataset.echo()},
                                {"model", model_path},
                                {"image_index", image_index},
                                {"mode", to_string(spec.mode)},
                                {"label", spec.label},
                                {"metric", to_string(spec.metric)},
                                {"penalty", spec.penalty},
                                {"ga", GaArgs::echo(spec.ga, ga.early_stop)},
                                {"eval_threads", eval_threads},
                                {"seed", seed},
                                {"out", out}});

    if (result.status == AttackStatus::SkippedInitiallyMisclassified) {
      std::cerr << "skipped: the oracle already misclassifies sample " << image_index
                << " (predicted " << result.predicted_label << ", label " << true_label << ")\n";
      return kDomainError;
    }
    std::cerr << (result.success ? "success" : "failure") << ": distance " << result.distance
              << " after " << result.generations << " generations, " << result.queries
              << " queries\n";
    return kOk;
  }
};

struct BatchCmd {
  CLI::App* cmd{};
  DatasetArgs dataset;
  GaArgs ga;
  std::string model_path;
  std::string mode = "non-targeted";
  std::size_t count = 0;
  int target = -1;
  std::string metric = "l2";
  double penalty = 1e4;
  std::uint64_t seed = 1;
  std::size_t jobs = 1;
  std::size_t eval_threads = 1;
  std::size_t bins = 10;
  std::string model_id;
  std::string out;
  CLI::Option* o_target{};

  void attach(CLI::App& app) {
    cmd = app.add_subcommand("batch", "attack the first N correctly classified samples");
    dataset.attach(cmd);
    ga.attach(cmd);
    cmd->add_option("--model", model_path, "weights file")->required();
    cmd->add_option("--mode", mode, "targeted or non-targeted")
        ->required()
        ->check(CLI::IsMember({"targeted", "non-targeted"}));
    cmd->add_option("--n", count, "number of samples to attack")->required();
    o_target = cmd->add_option("--target", target,
                               "fixed target label (default: every non-true label)");
    cmd->add_option("--metric", metric, "distance metric")->capture_default_str();
    cmd->add_option("--penalty", penalty, "loss penalty M")->capture_default_str();
    cmd->add_option("--seed", seed, "batch seed; per-attack seeds derive from it")
        ->capture_default_str();
    cmd->add_option("--jobs", jobs, "concurrent attacks")->capture_default_str();
    cmd->add_option("--eval-threads", eval_threads, "fitness workers per attack")
        ->capture_default_str();
    cmd->add_option("--bins", bins, "fitness histogram bins")->capture_default_str();
    cmd->add_option("--model-id", model_id, "label for the summary row (default: model file)");
    cmd->add_option("--out", out, "output directory")->envname("EVOATTACK_OUT")->required();
  }

  int execute() const {
    const fs::path dir = prepare_out_dir(out);
    const Model oracle(load_weights(model_path));
    const Dataset data = dataset.load();

    AttackSpec spec;
    spec.mode = mode == "targeted" ? AttackMode::Targeted : AttackMode::NonTargeted;
    spec.metric = metric_from_string(metric);
    spec.penalty = penalty;
    spec.ga = ga.resolve(seed);
    spec.stopping.enabled = ga.early_stop;
    if (*o_target) {
      if (spec.mode != AttackMode::Targeted) {
        throw UsageError("--target only makes sense with --mode targeted");
      }
      spec.label = target;
    }

    BatchOptions options;
    options.count = count;
    options.targeted_all_labels = !*o_target;
    options.seed = seed;
    options.jobs = jobs;
    options.eval_threads = eval_threads;

    const std::vector<AttackResult> results = batch_attack(oracle, data, spec, options);

    export_results_jsonl(results, (dir / "results.jsonl").string());
    const BatchSummary summary =
        summarize(results, bins, model_id.empty() ? fs::path(model_path).filename().string()
                                                  : model_id);
    export_summary_csv({summary}, (dir / "summary.csv").string());
    export_histogram_csv(summary.fitness_histogram, (dir / "histogram.csv").string());
    export_mean_trend_csv(summary.mean_trend, (dir / "mean-trend.csv").string());

    if (!data.images.empty() && data.images.front().shape.channels == 1) {
      Dataset adversarial;
      adversarial.num_classes = oracle.num_classes();
      for (const auto& r : results) {
        adversarial.images.push_back(r.adversarial);
        adversarial.labels.push_back(std::max(r.predicted_label, 0));
      }
      save_idx(adversarial, (dir / "adversarial-images.idx").string(),
               (dir / "adversarial-labels.idx").string());
    }

    write_config_echo(dir, json{{"command", "batch"},
                                {"dataset", dataset.echo()},
                                {"model", model_path},
                                {"mode", to_string(spec.mode)},
                                {"n", count},
                                {"fixed_target", *o_target ? json(target) : json(nullptr)},
                                {"metric", to_string(spec.metric)},
                                {"penalty", spec.penalty},
                                {"ga", GaArgs::echo(spec.ga, ga.early_stop)},
                                {"jobs", jobs},
                                {"eval_threads", eval_threads},
                                {"bins", bins},
                                {"seed", seed},
                                {"out", out}});

    std::cerr << results.size() << " attacks, success rate " << summary.success_prob;
    if (summary.distance_mean) {
      std::cerr << ", mean distance " << *summary.distance_mean << " (sd " << *summary.distance_sd
                << ")";
    }
    std::cerr << '\n';
    return kOk;
  }
};

struct ReportCmd {
  CLI::App* cmd{};
  std::string results_path;
  std::size_t bins = 10;
  std::string model_id;
  std::string out;

  void attach(CLI::App& app) {
    cmd = app.add_subcommand("report", "summarize a results.jsonl file");
    cmd->add_option("--results", results_path, "results.jsonl produced by batch")->required();
    cmd->add_option("--bins", bins, "fitness histogram bins")->capture_default_str();
    cmd->add_option("--model-id", model_id, "label for the summary row");
    cmd->add_option("--out", out, "output directory")->envname("EVOATTACK_OUT")->required();
  }

  int execute() const {
    const fs::path dir = prepare_out_dir(out);
    const std::vector<AttackResult> results = import_results_jsonl(results_path);
    const BatchSummary summary = summarize(results, bins, model_id);
    export_summary_csv({summary}, (dir / "summary.csv").string());
    export_histogram_csv(summary.fitness_histogram, (dir / "histogram.csv").string());
    export_mean_trend_csv(summary.mean_trend, (dir / "mean-trend.csv").string());
    write_config_echo(dir, json{{"command", "report"},
                                {"results", results_path},
                                {"bins", bins},
                                {"model_id", model_id},
                                {"out", out}});
    std::cerr << summary.attacks << " attacks, success rate " << summary.success_prob << '\n';
    return kOk;
  }
};

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"black-box adversarial sample generation with an evolutionary search"};
  app.require_subcommand(1);

  MakeSynthCmd make_synth;
  TrainCmd train_cmd;
  DistillCmd distill_cmd;
  AttackCmd attack_cmd;
  BatchCmd batch_cmd;
  ReportCmd report_cmd;
  make_synth.attach(app);
  train_cmd.attach(app);
  distill_cmd.attach(app);
  attack_cmd.attach(app);
  batch_cmd.attach(app);
  report_cmd.attach(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (make_synth.cmd->parsed()) return make_synth.execute();
    if (train_cmd.cmd->parsed()) return train_cmd.execute();
    if (distill_cmd.cmd->parsed()) return distill_cmd.execute();
    if (attack_cmd.cmd->parsed()) return attack_cmd.execute();
    if (batch_cmd.cmd->parsed()) return batch_cmd.execute();
    if (report_cmd.cmd->parsed()) return report_cmd.execute();
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDomainError;
  }
  return kUsageError;
}

}  // namespace evoattack
