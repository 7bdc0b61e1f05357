#include "rfhw/forest_engine.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>

#include "parallel.hpp"
#include "rfhw/errors.hpp"
#include "rfhw/majority_blocks.hpp"

namespace rfhw {

void ForestModel::validate() const {
  if (trees.size() < 2) {
    throw std::invalid_argument("forest needs at least 2 trees, has " +
                                std::to_string(trees.size()));
  }
  if (num_classes < 2 || num_classes > 256) {
    throw std::invalid_argument("forest class count must be in [2, 256], got " +
                                std::to_string(num_classes));
  }
  if (num_features < 1 || num_features > 65536) {
    throw std::invalid_argument("forest feature count must be in [1, 65536], got " +
                                std::to_string(num_features));
  }
  for (std::size_t i = 0; i < trees.size(); ++i) {
    if (trees[i].levels() != levels) {
      throw std::invalid_argument("tree " + std::to_string(i) + " has " +
                                  std::to_string(trees[i].levels()) +
                                  " levels, forest declares " + std::to_string(levels));
    }
    trees[i].validate(num_features, num_classes);
  }
}

bool same_structure(const ForestModel& a, const ForestModel& b) {
  return a.num_classes == b.num_classes && a.num_features == b.num_features &&
         a.levels == b.levels && a.trees == b.trees;
}

const char* to_string(MajorityVariant v) noexcept {
  return v == MajorityVariant::iterative ? "iterative" : "pipelined";
}

Cycles first_latency(std::uint32_t num_trees, std::uint32_t levels) {
  if (num_trees < 2) throw std::invalid_argument("first_latency: T must be >= 2");
  if (levels < 1) throw std::invalid_argument("first_latency: l must be >= 1");
  return Cycles{3} * levels + ceil_log2(num_trees) + floor_log2(num_trees) + 3;
}

Cycles steady_interval(std::uint32_t levels) { return tree_cycles(levels); }

std::uint64_t throughput_at(double clock_hz, std::uint32_t levels) {
  if (!(clock_hz > 0.0) || !std::isfinite(clock_hz)) {
    throw std::invalid_argument("throughput_at: clock must be a positive frequency");
  }
  return static_cast<std::uint64_t>(
      std::floor(static_cast<long double>(clock_hz) /
                 static_cast<long double>(steady_interval(levels))));
}

ForestEngine::ForestEngine(ForestModel model, EngineOptions options)
    : model_(std::move(model)), options_(options) {
  model_.validate();
  tree_cycles_ = tree_cycles(model_.levels);
  const std::uint32_t t = model_.num_trees();
  if (options_.variant == MajorityVariant::iterative) {
    worst_majority_ = worst_iterative_latency(t);
    admission_interval_ = std::max(tree_cycles_, issue_interval(t));
  } else {
    worst_majority_ = n_pipe(t);
    admission_interval_ = tree_cycles_;
  }
}

Cycles ForestEngine::result_latency() const noexcept {
  return tree_cycles_ + worst_majority_;
}

void ForestEngine::check_input(FeatureSpan x) const {
  if (x.size() != model_.num_features) {
    throw std::invalid_argument("feature vector has " + std::to_string(x.size()) +
                                " values, forest expects " +
                                std::to_string(model_.num_features));
  }
}

std::vector<ClassLabel> ForestEngine::run_trees(FeatureSpan x) const {
  std::vector<ClassLabel> out(model_.num_trees());
  for (std::size_t i = 0; i < model_.trees.size(); ++i) {
    const TreeRun r = run_tree(model_.trees[i], x);
    if (r.cycles != tree_cycles_) {
      throw std::logic_error("tree unit took " + std::to_string(r.cycles) +
                             " cycles, expected " + std::to_string(tree_cycles_));
    }
    out[i] = r.label;
  }
  return out;
}

namespace {

MajorityResult run_pipelined_single(const VoteVector& votes) {
  PipelinedMajorityBlock block(votes.num_inputs(), votes.num_classes());
  auto o = block.tick(&votes);
  while (!o) o = block.tick();
  return {o->label, o->latency()};
}

}  // namespace

ClassificationTrace ForestEngine::classify_one(FeatureSpan x) const {
  check_input(x);
  ClassificationTrace tr;
  if (options_.workers > 1) {
    tr.tree_outputs.resize(model_.num_trees());
    detail::parallel_for(model_.trees.size(), options_.workers, [&](std::size_t i) {
      const TreeRun r = run_tree(model_.trees[i], x);
      if (r.cycles != tree_cycles_) throw std::logic_error("tree unit cycle mismatch");
      tr.tree_outputs[i] = r.label;
    });
  } else {
    tr.tree_outputs = run_trees(x);
  }
  const VoteVector votes(tr.tree_outputs, model_.num_classes);
  const MajorityResult m = options_.variant == MajorityVariant::iterative
                               ? run_iterative(votes)
                               : run_pipelined_single(votes);
  tr.majority_output = m.label;
  tr.tree_cycles = tree_cycles_;
  tr.majority_latency = m.latency;
  tr.first_latency = tree_cycles_ + m.latency;
  tr.steady_interval = admission_interval_;
  tr.admitted_at = 1;
  tr.valid_at = tr.first_latency;
  tr.published_at = result_latency();
  return tr;
}

namespace {

template <typename Block>
void drive_majority(Block& block, const std::vector<VoteVector>& votes,
                    std::vector<ClassificationTrace>& traces, Cycles interval,
                    Cycles tree_cycles, Cycles slot) {
  const std::size_t n = votes.size();
  std::size_t next = 0;
  std::size_t done = 0;
  while (done < n) {
    const Cycles t = block.cycle() + 1;
    const VoteVector* in = nullptr;
    if (next < n && t == 1 + next * interval + tree_cycles) {
      in = &votes[next];
      ++next;
    }
    if (auto o = block.tick(in, in != nullptr ? next - 1 : 0)) {
      ClassificationTrace& tr = traces[o->tag];
      tr.majority_output = o->label;
      tr.majority_latency = o->latency();
      tr.valid_at = o->valid_at;
      tr.first_latency = tr.valid_at - tr.admitted_at + 1;
      tr.published_at = tr.admitted_at + slot - 1;
      if (tr.valid_at > tr.published_at) {
        throw std::logic_error("majority decision missed its result slot");
      }
      ++done;
    }
  }
}

}  // namespace

std::vector<ClassificationTrace> ForestEngine::classify_stream(
    const std::vector<FeatureSpan>& inputs) const {
  for (FeatureSpan x : inputs) check_input(x);
  std::vector<ClassificationTrace> traces(inputs.size());
  detail::parallel_for(inputs.size(), options_.workers, [&](std::size_t i) {
    traces[i].tree_outputs = run_trees(inputs[i]);
  });

  std::vector<VoteVector> votes;
  votes.reserve(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    votes.emplace_back(traces[i].tree_outputs, model_.num_classes);
    traces[i].tree_cycles = tree_cycles_;
    traces[i].steady_interval = admission_interval_;
    traces[i].admitted_at = 1 + i * admission_interval_;
  }

  const std::uint32_t t = model_.num_trees();
  if (options_.variant == MajorityVariant::iterative) {
    IterativeMajorityBlock block(t, model_.num_classes);
    drive_majority(block, votes, traces, admission_interval_, tree_cycles_,
                   result_latency());
  } else {
    PipelinedMajorityBlock block(t, model_.num_classes);
    drive_majority(block, votes, traces, admission_interval_, tree_cycles_,
                   result_latency());
  }
  return traces;
}

ClassificationTrace ForestEngine::trace(FeatureSpan x, std::ostream& out) const {
  check_input(x);
  const std::uint32_t t = model_.num_trees();
  std::vector<TreeUnitState> units(t);

  IterativeMajorityBlock iter(t, model_.num_classes);
  PipelinedMajorityBlock pipe(t, model_.num_classes);
  MajorityTraceRow maj_row;
  iter.set_trace([&](const MajorityTraceRow& r) { maj_row = r; });

  ClassificationTrace tr;
  tr.tree_cycles = tree_cycles_;
  tr.steady_interval = admission_interval_;
  tr.admitted_at = 1;
  tr.published_at = result_latency();

  std::optional<VoteVector> votes;
  for (Cycles cycle = 1; cycle <= tr.published_at; ++cycle) {
    out << "cycle=" << cycle;
    if (units.front().phase != TreePhase::finished) {
      out << " tree=" << to_string(units.front().phase);
      for (std::size_t i = 0; i < units.size(); ++i) {
        units[i] = step_tree(units[i], model_.trees[i], x);
      }
      out << " level=" << units.front().level << " addr=0x" << std::hex
          << std::setw(4) << std::setfill('0') << units.front().node_address << std::dec
          << std::setfill(' ');
      if (units.front().phase == TreePhase::finished) {
        tr.tree_outputs.clear();
        for (const auto& u : units) tr.tree_outputs.push_back(*u.output);
        out << " leaves=";
        for (std::size_t i = 0; i < tr.tree_outputs.size(); ++i) {
          out << (i == 0 ? "" : ",") << tr.tree_outputs[i];
        }
      }
    } else {
      out << " tree=done";
    }

    const VoteVector* in = nullptr;
    if (cycle == tree_cycles_ + 1) {
      votes.emplace(tr.tree_outputs, model_.num_classes);
      in = &*votes;
    }
    std::optional<MajorityOutput> o;
    if (options_.variant == MajorityVariant::iterative) {
      o = iter.tick(in);
      out << " maj=" << maj_row.phase;
      if (!maj_row.sign_bits.empty()) out << " signs=" << maj_row.sign_bits;
      if (maj_row.or_word) {
        out << " or=" << *maj_row.or_word << " lod=";
        if (maj_row.lod) {
          out << *maj_row.lod;
        } else {
          out << "zero";
        }
      }
    } else {
      o = pipe.tick(in);
      out << " maj=" << (pipe.idle() && !o ? "idle" : "pipe");
    }
    if (o) {
      tr.majority_output = o->label;
      tr.majority_latency = o->latency();
      tr.valid_at = cycle;
      tr.first_latency = cycle;
      out << " out=" << o->label;
    }
    if (cycle == tr.published_at) out << " publish=" << tr.majority_output;
    out << '\n';
  }
  return tr;
}

}  // namespace rfhw
