// SPDX-License-Identifier: Apache-2.0
#include "frictionnet/domain_eval.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>
#include <thread>

#include "frictionnet/inference.hpp"
#include "frictionnet/kernels.hpp"
#include "frictionnet/util.hpp"

namespace frictionnet::sweep {

namespace {

constexpr std::size_t kSensors = 5;
constexpr std::size_t kTargets = 3;

int sensor_position(std::string_view name) {
  for (std::size_t i = 0; i < kSensors; ++i)
    if (name == kSensorOrder[i]) return static_cast<int>(i);
  return -1;
}

struct RoadIndices {
  std::array<int, kSensors> sensor;  // network variable index per sensor
  std::array<int, kTargets> target;
  std::array<int, kSensors> sensor_card;
  std::array<int, kTargets> target_card;
};

RoadIndices locate(const bn::Network& net) {
  RoadIndices idx{};
  for (std::size_t i = 0; i < kSensors; ++i) {
    idx.sensor[i] = net.index_of(kSensorOrder[i]);
    idx.sensor_card[i] = net.variable(idx.sensor[i]).cardinality();
  }
  for (std::size_t i = 0; i < kTargets; ++i) {
    idx.target[i] = net.index_of(kTargetOrder[i]);
    idx.target_card[i] = net.variable(idx.target[i]).cardinality();
  }
  return idx;
}

// Distances from every possible ground-truth state to the three posteriors
// for one evidence key: [R:0..2][W:3..5][mu:6..13].
struct DistEntry {
  std::array<double, 14> d;
};

constexpr std::array<std::size_t, kTargets> kDistOffset{0, 3, 6};

// At-most-once concurrent memo table, direct-indexed by packed evidence key.
class PosteriorMemo {
 public:
  explicit PosteriorMemo(std::size_t size) : state_(size), entries_(size) {
    for (auto& s : state_) s.store(0, std::memory_order_relaxed);
  }

  template <typename Compute>
  const DistEntry& get_or_compute(std::size_t key, const Compute& compute) {
    auto& state = state_[key];
    if (state.load(std::memory_order_acquire) == 2) return entries_[key];
    std::lock_guard<std::mutex> lock(mutex_);
    if (state.load(std::memory_order_relaxed) != 2) {
      entries_[key] = compute();
      state.store(2, std::memory_order_release);
    }
    return entries_[key];
  }

 private:
  std::vector<std::atomic<int>> state_;
  std::vector<DistEntry> entries_;
  std::mutex mutex_;
};

struct SubsetPlan {
  SensorSubset subset;
  std::array<std::size_t, kSensors> stride{};  // 0 for sensors outside the subset
  std::size_t key_space = 1;
  std::unique_ptr<PosteriorMemo> memo;
};

}  // namespace

SensorSubset SensorSubset::from_names(std::span<const std::string> names) {
  SensorSubset s;
  for (const auto& n : names) {
    const int pos = sensor_position(n);
    if (pos < 0) throw Error(ErrorCode::unknown_variable, n + " is not a sensor node");
    s.mask |= 1u << pos;
  }
  return s;
}

SensorSubset SensorSubset::parse(std::string_view text) {
  SensorSubset s;
  if (text.empty()) return s;
  std::string normalized(text);
  std::replace(normalized.begin(), normalized.end(), ';', ',');
  for (const auto& tok : util::split(normalized, ',')) {
    if (tok.empty()) continue;
    const int pos = sensor_position(tok);
    if (pos < 0) throw Error(ErrorCode::unknown_variable, tok + " is not a sensor node");
    s.mask |= 1u << pos;
  }
  return s;
}

std::string SensorSubset::name() const {
  std::string out;
  for (std::size_t i = 0; i < kSensors; ++i)
    if (contains(i)) {
      if (!out.empty()) out += ";";
      out += kSensorOrder[i];
    }
  return out;
}

std::vector<SensorSubset> all_subsets() {
  std::vector<SensorSubset> out(32);
  for (unsigned m = 0; m < 32; ++m) out[m].mask = m;
  return out;
}

void enumerate_domain(const bn::Network& net,
                      const std::function<void(std::span<const int>, double)>& visit,
                      const bn::Evidence& filter) {
  const auto& order = net.topological_order();
  const int n = net.size();
  std::vector<int> fixed(static_cast<std::size_t>(n), -1);
  for (const auto& [name, state] : filter) {
    const int v = net.index_of(name);
    if (state < 0 || state >= net.variable(v).cardinality())
      throw Error(ErrorCode::out_of_range, "filter state for " + name);
    fixed[static_cast<std::size_t>(v)] = state;
  }

  std::vector<int> assignment(static_cast<std::size_t>(n), 0);
  std::vector<double> partial(static_cast<std::size_t>(n) + 1, 1.0);

  // iterative DFS over the topological order with zero-branch pruning
  int depth = 0;
  std::vector<int> cursor(static_cast<std::size_t>(n), -1);
  while (depth >= 0) {
    if (depth == n) {
      visit(assignment, partial[static_cast<std::size_t>(n)]);
      --depth;
      continue;
    }
    const int var = order[static_cast<std::size_t>(depth)];
    const int card = net.variable(var).cardinality();
    int s = ++cursor[static_cast<std::size_t>(depth)];
    const int f = fixed[static_cast<std::size_t>(var)];
    if (f >= 0) {
      if (s > 0) {  // fixed value already explored
        cursor[static_cast<std::size_t>(depth)] = -1;
        --depth;
        continue;
      }
      s = f;
    } else if (s >= card) {
      cursor[static_cast<std::size_t>(depth)] = -1;
      --depth;
      continue;
    }
    assignment[static_cast<std::size_t>(var)] = s;
    const double p = partial[static_cast<std::size_t>(depth)] *
                     net.cpt_row_for(var, assignment)[static_cast<std::size_t>(s)];
    if (p > 0.0) {
      partial[static_cast<std::size_t>(depth) + 1] = p;
      ++depth;
    }
  }
}

EvalResult evaluate_subsets(const bn::Network& net, std::span<const SensorSubset> subsets,
                            const EvalOptions& options) {
  if (subsets.empty()) throw Error(ErrorCode::invalid_argument, "no sensor subsets given");
  const RoadIndices idx = locate(net);

  std::vector<SubsetPlan> plans;
  plans.reserve(subsets.size());
  for (const auto& subset : subsets) {
    SubsetPlan plan;
    plan.subset = subset;
    std::size_t space = 1;
    for (std::size_t i = kSensors; i-- > 0;) {
      if (!subset.contains(i)) continue;
      plan.stride[i] = space;
      space *= static_cast<std::size_t>(idx.sensor_card[i]);
    }
    plan.key_space = space;
    plan.memo = std::make_unique<PosteriorMemo>(space);
    plans.push_back(std::move(plan));
  }

  // ground-truth distance tables for one evidence key
  auto compute_entry = [&](const SubsetPlan& plan, std::span<const int> assignment) {
    bn::Evidence evidence;
    for (std::size_t i = 0; i < kSensors; ++i)
      if (plan.subset.contains(i))
        evidence.emplace(kSensorOrder[i], assignment[static_cast<std::size_t>(idx.sensor[i])]);
    DistEntry entry{};
    for (std::size_t t = 0; t < kTargets; ++t) {
      const bn::Distribution post = bn::posterior_ve(net, kTargetOrder[t], evidence);
      std::span<double> out(entry.d.data() + kDistOffset[t],
                            static_cast<std::size_t>(idx.target_card[t]));
      if (t == 2)
        kernels::wasserstein1_to_delta(post.p, out);
      else
        kernels::hellinger_to_delta(post.p, out);
    }
    return entry;
  };

  // fixed-size chunks over a prefix of the topological order make the
  // accumulation order independent of the thread count
  const auto& order = net.topological_order();
  std::vector<int> fixed(static_cast<std::size_t>(net.size()), -1);
  for (const auto& [name, state] : options.domain_filter)
    fixed[static_cast<std::size_t>(net.index_of(name))] = state;

  int prefix_len = 0;
  std::size_t chunk_count = 1;
  while (prefix_len < net.size() - 1 && chunk_count < 64) {
    const int var = order[static_cast<std::size_t>(prefix_len)];
    chunk_count *= fixed[static_cast<std::size_t>(var)] >= 0
                       ? 1
                       : static_cast<std::size_t>(net.variable(var).cardinality());
    ++prefix_len;
  }

  struct Accum {
    util::CompensatedSum equal;
    util::CompensatedSum weighted;
  };
  struct ChunkResult {
    std::vector<Accum> cells;  // subsets x targets
    util::CompensatedSum mass;
    std::uint64_t count = 0;
  };
  std::vector<ChunkResult> chunk_results(chunk_count);

  auto run_chunk = [&](std::size_t chunk) {
    ChunkResult& result = chunk_results[chunk];
    result.cells.assign(plans.size() * kTargets, Accum{});

    // chunk -> assignment of the prefix variables
    bn::Evidence filter = options.domain_filter;
    std::size_t rem = chunk;
    for (int d = prefix_len; d-- > 0;) {
      const int var = order[static_cast<std::size_t>(d)];
      if (fixed[static_cast<std::size_t>(var)] >= 0) continue;
      const auto card = static_cast<std::size_t>(net.variable(var).cardinality());
      filter[net.variable(var).name] = static_cast<int>(rem % card);
      rem /= card;
    }

    enumerate_domain(
        net,
        [&](std::span<const int> assignment, double probability) {
          ++result.count;
          result.mass.add(probability);
          for (std::size_t s = 0; s < plans.size(); ++s) {
            SubsetPlan& plan = plans[s];
            std::size_t key = 0;
            for (std::size_t i = 0; i < kSensors; ++i)
              key += plan.stride[i] *
                     static_cast<std::size_t>(
                         assignment[static_cast<std::size_t>(idx.sensor[i])]) *
                     (plan.subset.contains(i) ? 1u : 0u);
            const DistEntry* entry;
            DistEntry local;
            if (options.memoize) {
              entry = &plan.memo->get_or_compute(
                  key, [&] { return compute_entry(plan, assignment); });
            } else {
              local = compute_entry(plan, assignment);
              entry = &local;
            }
            for (std::size_t t = 0; t < kTargets; ++t) {
              const double d =
                  entry->d[kDistOffset[t] +
                           static_cast<std::size_t>(
                               assignment[static_cast<std::size_t>(idx.target[t])])];
              Accum& acc = result.cells[s * kTargets + t];
              acc.equal.add(d);
              acc.weighted.add(probability * d);
            }
          }
        },
        filter);
  };

  unsigned hw = std::thread::hardware_concurrency();
  std::size_t threads = options.threads > 0 ? static_cast<std::size_t>(options.threads)
                                            : (hw > 0 ? hw : 1);
  threads = std::min(threads, chunk_count);
  if (threads <= 1) {
    for (std::size_t c = 0; c < chunk_count; ++c) run_chunk(c);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        while (true) {
          const std::size_t c = next.fetch_add(1, std::memory_order_relaxed);
          if (c >= chunk_count) return;
          run_chunk(c);
        }
      });
    for (auto& t : pool) t.join();
  }

  // merge in chunk order; thread count cannot change the result
  std::vector<Accum> total(plans.size() * kTargets);
  util::CompensatedSum mass;
  std::uint64_t count = 0;
  for (const auto& chunk : chunk_results) {
    count += chunk.count;
    mass.merge(chunk.mass);
    for (std::size_t c = 0; c < total.size(); ++c) {
      total[c].equal.merge(chunk.cells[c].equal);
      total[c].weighted.merge(chunk.cells[c].weighted);
    }
  }
  if (count == 0)
    throw Error(ErrorCode::zero_probability_evidence, "domain filter admits no combination");

  EvalResult result;
  for (std::size_t s = 0; s < plans.size(); ++s)
    for (std::size_t t = 0; t < kTargets; ++t) {
      EvalRow row;
      row.subset = plans[s].subset;
      row.variable = kTargetOrder[t];
      row.metric = t == 2 ? metrics::MetricKind::wasserstein1 : metrics::MetricKind::hellinger;
      row.n = count;
      row.mean = total[s * kTargets + t].equal.value() / static_cast<double>(count);
      row.weighted_mean = total[s * kTargets + t].weighted.value() / mass.value();
      result.rows.push_back(std::move(row));
    }
  return result;
}

void emit_report(const EvalResult& result, const std::filesystem::path& path,
                 bool include_weighted) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
  out << "subset,variable,metric,mean,n";
  if (include_weighted) out << ",weighted_mean";
  out << "\n";
  for (const auto& row : result.rows) {
    out << row.subset.name() << ',' << row.variable << ',' << metrics::to_string(row.metric)
        << ',' << util::format_double(row.mean) << ',' << row.n;
    if (include_weighted) out << ',' << util::format_double(row.weighted_mean);
    out << "\n";
  }
  if (!out) throw Error(ErrorCode::io_error, "write failed for " + path.string());
}

EvalResult load_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::parse_error, "empty report");
  const auto header = util::split(line, ',');
  if (header.size() < 5 || header[0] != "subset" || header[1] != "variable" ||
      header[2] != "metric" || header[3] != "mean" || header[4] != "n")
    throw Error(ErrorCode::parse_error, "unexpected report header");
  const bool weighted = header.size() > 5 && header[5] == "weighted_mean";

  EvalResult result;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = util::split(line, ',');
    if (fields.size() != header.size())
      throw Error(ErrorCode::parse_error, "report row has wrong field count");
    EvalRow row;
    row.subset = SensorSubset::parse(fields[0]);
    row.variable = fields[1];
    row.metric = metrics::metric_kind_from(fields[2]);
    row.mean = util::parse_double(fields[3]);
    row.n = static_cast<std::uint64_t>(util::parse_int(fields[4]));
    if (weighted) row.weighted_mean = util::parse_double(fields[5]);
    result.rows.push_back(std::move(row));
  }
  return result;
}

}  // namespace frictionnet::sweep
