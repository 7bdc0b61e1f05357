#include "rfhw/report.hpp"

#include <algorithm>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace rfhw {

RunReport build_report(const ForestEngine& engine,
                       const std::vector<ClassificationTrace>& traces,
                       std::span<const ClassLabel> labels, double clock_hz) {
  if (traces.empty()) throw std::invalid_argument("report: no classifications");
  if (traces.size() != labels.size()) {
    throw std::invalid_argument("report: " + std::to_string(traces.size()) +
                                " classifications for " + std::to_string(labels.size()) +
                                " labels");
  }
  const ForestModel& m = engine.model();
  RunReport r;
  r.variant = to_string(engine.options().variant);
  r.num_trees = m.num_trees();
  r.levels = m.levels;
  r.samples = traces.size();

  ClassLabel k = m.num_classes;
  for (auto l : labels) k = std::max(k, l + 1);
  r.confusion.assign(k, std::vector<std::uint64_t>(k, 0));

  r.latency_min = std::numeric_limits<Cycles>::max();
  long double latency_sum = 0;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const auto& tr = traces[i];
    ++r.confusion[labels[i]][tr.majority_output];
    if (tr.majority_output == labels[i]) ++r.correct;
    r.latency_min = std::min(r.latency_min, tr.first_latency);
    r.latency_max = std::max(r.latency_max, tr.first_latency);
    latency_sum += tr.first_latency;
  }
  r.accuracy = static_cast<double>(r.correct) / static_cast<double>(r.samples);
  r.latency_mean = static_cast<double>(latency_sum / static_cast<long double>(r.samples));
  r.result_latency = engine.result_latency();
  r.first_output_at = traces.front().published_at;
  r.steady_interval = engine.admission_interval();
  r.clock_hz = clock_hz;
  r.throughput = throughput_at(clock_hz, m.levels);
  return r;
}

std::string RunReport::to_text() const {
  std::ostringstream os;
  os << "forest: T=" << num_trees << " l=" << levels << " majority=" << variant << '\n';
  os << "samples: " << samples << "  correct: " << correct << "  accuracy: " << std::fixed
     << std::setprecision(2) << accuracy * 100.0 << " %\n";
  os << "majority-limited latency (cycles): min " << latency_min << "  max " << latency_max
     << "  mean " << std::setprecision(3) << latency_mean << '\n';
  os << "result published " << result_latency << " cycles after input, first at cycle "
     << first_output_at << ", then every " << steady_interval << " cycles\n";
  os << "throughput at " << std::setprecision(1) << clock_hz / 1e6 << " MHz: " << throughput
     << " classifications/s\n";
  os << "confusion (rows: true, cols: predicted)\n";
  for (std::size_t i = 0; i < confusion.size(); ++i) {
    os << std::setw(4) << i << ':';
    for (auto c : confusion[i]) os << ' ' << std::setw(5) << c;
    os << '\n';
  }
  return os.str();
}

std::string RunReport::to_key_values() const {
  std::ostringstream os;
  os << "variant=" << variant << '\n'
     << "trees=" << num_trees << '\n'
     << "levels=" << levels << '\n'
     << "samples=" << samples << '\n'
     << "correct=" << correct << '\n'
     << "accuracy=" << std::setprecision(6) << std::fixed << accuracy << '\n'
     << "latency_min=" << latency_min << '\n'
     << "latency_max=" << latency_max << '\n'
     << "latency_mean=" << std::setprecision(3) << latency_mean << '\n'
     << "result_latency=" << result_latency << '\n'
     << "first_output_at=" << first_output_at << '\n'
     << "steady_interval=" << steady_interval << '\n'
     << "clock_hz=" << std::setprecision(0) << clock_hz << '\n'
     << "throughput=" << throughput << '\n';
  for (std::size_t i = 0; i < confusion.size(); ++i) {
    os << "confusion." << i << '=';
    for (std::size_t j = 0; j < confusion[i].size(); ++j) {
      os << (j == 0 ? "" : ",") << confusion[i][j];
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace rfhw
