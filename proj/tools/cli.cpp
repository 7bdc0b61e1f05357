#include "cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rfhw/forest_engine.hpp"
#include "rfhw/majority_vote.hpp"
#include "rfhw/model_io.hpp"
#include "rfhw/report.hpp"
#include "rfhw/trainer.hpp"

namespace rfhw::cli {
namespace {

struct TrainArgs {
  std::string images, labels, out;
  TrainConfig config;
};

struct ClassifyArgs {
  std::string forest, images, labels;
  std::string variant = "iterative";
  double clock_hz = 303.4e6;
  unsigned workers = 1;
  std::size_t limit = 0;
};

struct CyclesArgs {
  std::uint32_t trees = 40;
  std::uint32_t levels = 14;
};

struct TraceArgs {
  std::string forest, images, dump;
  std::string variant = "iterative";
  std::size_t index = 0;
};

struct ExportArgs {
  std::string forest, dir;
};

MajorityVariant parse_variant(const std::string& s) {
  return s == "pipelined" ? MajorityVariant::pipelined : MajorityVariant::iterative;
}

// Labels are optional for trace; images alone are read from the IDX file.
Dataset load_images(const std::string& path) {
  const auto bytes = read_file(path);
  std::uint32_t rows = 0, cols = 0, count = 0;
  Dataset d;
  d.features = parse_idx_images(bytes, path, rows, cols, count);
  d.num_features = rows * cols;
  d.labels.assign(count, 0);
  d.num_classes = 2;
  return d;
}

void check_compatible(const ForestModel& f, const Dataset& d) {
  if (d.num_features != f.num_features) {
    throw std::invalid_argument("dataset has p = " + std::to_string(d.num_features) +
                                " features, forest expects " +
                                std::to_string(f.num_features));
  }
  for (std::size_t i = 0; i < d.labels.size(); ++i) {
    if (d.labels[i] >= f.num_classes) {
      throw std::invalid_argument("label " + std::to_string(d.labels[i]) + " of sample " +
                                  std::to_string(i) + " is outside the forest's K = " +
                                  std::to_string(f.num_classes));
    }
  }
}

int cmd_train(const TrainArgs& a, std::ostream& out) {
  const Dataset d = load_idx(a.images, a.labels);
  if (d.empty()) throw std::invalid_argument("training set is empty");
  const ForestModel f = train_forest(d, a.config);
  save_forest(f, a.out);
  out << "trained " << f.num_trees() << " trees, " << f.levels << " levels, on " << d.size()
      << " samples (p=" << f.num_features << ", K=" << f.num_classes << ")\n"
      << f.metadata << '\n'
      << "wrote " << a.out << '\n';
  return 0;
}

int cmd_classify(const ClassifyArgs& a, std::ostream& out) {
  const ForestModel f = load_forest(a.forest);
  Dataset d = load_idx(a.images, a.labels);
  if (d.empty()) throw std::invalid_argument("dataset is empty");
  if (a.limit != 0 && a.limit < d.size()) {
    d.labels.resize(a.limit);
    d.features.resize(a.limit * d.num_features);
  }
  check_compatible(f, d);
  const ForestEngine engine(f, {parse_variant(a.variant), a.workers});
  const auto traces = engine.classify_stream(d.rows());
  const RunReport r = build_report(engine, traces, d.labels, a.clock_hz);
  out << r.to_text() << "---\n" << r.to_key_values();
  return 0;
}

int cmd_cycles(const CyclesArgs& a, std::ostream& out) {
  if (a.trees < 2) throw std::invalid_argument("--trees must be >= 2");
  if (a.levels < 1) throw std::invalid_argument("--levels must be >= 1");
  const std::uint32_t t = a.trees;
  const bool over_bound = exceeds_iter_max_bound(t);
  out << "T=" << t << " l=" << a.levels << '\n'
      << "n_iter_min=" << n_iter_min(t) << '\n'
      << "n_iter_max=" << n_iter_max(t) << (over_bound ? " *" : "") << '\n'
      << "n_pipe=" << n_pipe(t) << '\n'
      << "issue_interval=" << issue_interval(t) << '\n'
      << "first_latency=" << first_latency(t, a.levels) << (over_bound ? " *" : "") << '\n'
      << "steady_interval=" << steady_interval(a.levels) << '\n';
  if (over_bound) {
    out << "* T = 2^k - 1: a unanimous count of " << t << " has " << ceil_log2(t)
        << " set bits, so the measured worst-case iterative latency is "
        << worst_iterative_latency(t) << " cycles (first result at "
        << tree_cycles(a.levels) + worst_iterative_latency(t) << "), one above the bound\n";
  }
  return 0;
}

int cmd_trace(const TraceArgs& a, std::ostream& out) {
  const ForestModel f = load_forest(a.forest);
  const Dataset d = load_images(a.images);
  if (a.index >= d.size()) {
    throw std::invalid_argument("--image-index " + std::to_string(a.index) + " but file has " +
                                std::to_string(d.size()) + " images");
  }
  if (d.num_features != f.num_features) {
    throw std::invalid_argument("images have p = " + std::to_string(d.num_features) +
                                ", forest expects " + std::to_string(f.num_features));
  }
  const ForestEngine engine(f, {parse_variant(a.variant), 1});
  if (a.dump.empty()) {
    engine.trace(d.row(a.index), out);
    return 0;
  }
  std::ofstream file(a.dump, std::ios::binary);
  if (!file) throw FormatError(FormatErrc::open_failed, a.dump, 0, "cannot open for writing");
  const auto tr = engine.trace(d.row(a.index), file);
  file.close();
  if (!file) throw FormatError(FormatErrc::write_failed, a.dump, 0, "short write");
  out << "class " << tr.majority_output << " published at cycle " << tr.published_at
      << "; trace written to " << a.dump << '\n';
  return 0;
}

int cmd_export(const ExportArgs& a, std::ostream& out) {
  const ForestModel f = load_forest(a.forest);
  export_mem(f, a.dir);
  out << "exported " << f.num_trees() << " memory images to " << a.dir << '\n';
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cycle-accurate random-forest inference engine"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* sc_train = app.add_subcommand("train", "Train a forest on IDX data");
  sc_train->add_option("--train-images", train.images, "IDX image file")->required()
      ->check(CLI::ExistingFile);
  sc_train->add_option("--train-labels", train.labels, "IDX label file")->required()
      ->check(CLI::ExistingFile);
  sc_train->add_option("--trees", train.config.num_trees, "Number of trees T")
      ->capture_default_str();
  sc_train->add_option("--levels", train.config.max_levels, "Decision levels l")
      ->capture_default_str();
  sc_train->add_option("--seed", train.config.seed, "Forest seed")->capture_default_str();
  sc_train->add_option("--bagging", train.config.bagging_fraction,
                       "Fraction of samples per tree")->capture_default_str();
  sc_train->add_option("--features-per-split", train.config.features_per_split,
                       "Candidate coordinates per split (0: ceil(sqrt(p)))")
      ->capture_default_str();
  sc_train->add_option("--workers", train.config.workers, "Training threads")
      ->capture_default_str();
  sc_train->add_option("--out", train.out, "Forest file to write")->required();

  ClassifyArgs classify;
  auto* sc_classify = app.add_subcommand("classify", "Simulate a labelled IDX set");
  sc_classify->add_option("--forest", classify.forest)->required()->check(CLI::ExistingFile);
  sc_classify->add_option("--images", classify.images)->required()->check(CLI::ExistingFile);
  sc_classify->add_option("--labels", classify.labels)->required()->check(CLI::ExistingFile);
  sc_classify->add_option("--variant", classify.variant, "Majority block")
      ->check(CLI::IsMember({"iterative", "pipelined"}))
      ->capture_default_str();
  sc_classify->add_option("--clock-hz", classify.clock_hz, "Clock for the throughput figure")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sc_classify->add_option("--workers", classify.workers)->capture_default_str();
  sc_classify->add_option("--limit", classify.limit, "Use only the first N samples");

  CyclesArgs cycles;
  auto* sc_cycles = app.add_subcommand("cycles", "Closed-form cycle counts");
  sc_cycles->add_option("--trees", cycles.trees)->capture_default_str();
  sc_cycles->add_option("--levels", cycles.levels)->capture_default_str();

  TraceArgs trace;
  auto* sc_trace = app.add_subcommand("trace", "Per-cycle trace of one input");
  sc_trace->add_option("--forest", trace.forest)->required()->check(CLI::ExistingFile);
  sc_trace->add_option("--images", trace.images)->required()->check(CLI::ExistingFile);
  sc_trace->add_option("--image-index", trace.index)->capture_default_str();
  sc_trace->add_option("--variant", trace.variant)
      ->check(CLI::IsMember({"iterative", "pipelined"}))
      ->capture_default_str();
  sc_trace->add_option("--dump", trace.dump, "Write the trace here instead of stdout");

  ExportArgs exp;
  auto* sc_export = app.add_subcommand("export-mem", "Write per-tree memory images");
  sc_export->add_option("--forest", exp.forest)->required()->check(CLI::ExistingFile);
  sc_export->add_option("--dir", exp.dir)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*sc_train) return cmd_train(train, out);
    if (*sc_classify) return cmd_classify(classify, out);
    if (*sc_cycles) return cmd_cycles(cycles, out);
    if (*sc_trace) return cmd_trace(trace, out);
    if (*sc_export) return cmd_export(exp, out);
  } catch (const FormatError& e) {
    err << "rfhw: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "rfhw: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace rfhw::cli
