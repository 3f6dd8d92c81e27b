// SPDX-License-Identifier: Apache-2.0
#include "frictionnet/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <deque>

namespace frictionnet {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::cycle_detected: return "CycleDetected";
    case ErrorCode::missing_cpt: return "MissingCpt";
    case ErrorCode::row_length_mismatch: return "RowLengthMismatch";
    case ErrorCode::unnormalized_row: return "UnnormalizedRow";
    case ErrorCode::unknown_parent: return "UnknownParent";
    case ErrorCode::all_zero_row: return "AllZeroRow";
    case ErrorCode::unknown_variable: return "UnknownVariable";
    case ErrorCode::unknown_state: return "UnknownState";
    case ErrorCode::incomplete_assignment: return "IncompleteAssignment";
    case ErrorCode::query_is_evidence: return "QueryIsEvidence";
    case ErrorCode::zero_probability_evidence: return "ZeroProbabilityEvidence";
    case ErrorCode::non_finite_input: return "NonFiniteInput";
    case ErrorCode::negative_friction: return "NegativeFriction";
    case ErrorCode::out_of_range: return "OutOfRange";
    case ErrorCode::dimension_mismatch: return "DimensionMismatch";
    case ErrorCode::non_ordinal_variable: return "NonOrdinalVariable";
    case ErrorCode::empty_sample_set: return "EmptySampleSet";
    case ErrorCode::length_mismatch: return "LengthMismatch";
    case ErrorCode::empty_after_exclusion: return "EmptyAfterExclusion";
    case ErrorCode::unnormalized_scores: return "UnnormalizedScores";
    case ErrorCode::invalid_clamp: return "InvalidClamp";
    case ErrorCode::zero_or_negative_speed: return "ZeroOrNegativeSpeed";
    case ErrorCode::non_positive_load: return "NonPositiveLoad";
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::parse_error: return "ParseError";
    case ErrorCode::io_error: return "IoError";
  }
  return "UnknownError";
}

}  // namespace frictionnet

namespace frictionnet::bn {

namespace {
constexpr double kRowSumTolerance = 1e-9;
}

int Distribution::argmax() const {
  int best = 0;
  for (int i = 1; i < static_cast<int>(p.size()); ++i)
    if (p[i] > p[best]) best = i;
  return best;
}

Distribution make_delta(const Variable& var, int state) {
  if (state < 0 || state >= var.cardinality())
    throw Error(ErrorCode::out_of_range, "delta state out of range for " + var.name);
  Distribution d{var.name, var.scale, std::vector<double>(var.states.size(), 0.0)};
  d.p[static_cast<std::size_t>(state)] = 1.0;
  return d;
}

Network Network::build(std::vector<Variable> variables, std::vector<Cpt> cpts) {
  if (variables.empty())
    throw Error(ErrorCode::invalid_argument, "network needs at least one variable");

  Network net;
  net.variables_ = std::move(variables);
  const int n = net.size();

  for (int i = 0; i < n; ++i) {
    const Variable& v = net.variables_[i];
    if (v.cardinality() < 2)
      throw Error(ErrorCode::invalid_argument, "variable " + v.name + " needs >= 2 states");
    for (std::size_t a = 0; a < v.states.size(); ++a)
      for (std::size_t b = a + 1; b < v.states.size(); ++b)
        if (v.states[a] == v.states[b])
          throw Error(ErrorCode::invalid_argument,
                      "duplicate state label '" + v.states[a] + "' in " + v.name);
    if (!net.index_.emplace(v.name, i).second)
      throw Error(ErrorCode::invalid_argument, "duplicate variable name " + v.name);
  }

  net.cpts_.resize(static_cast<std::size_t>(n));
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (auto& cpt : cpts) {
    auto it = net.index_.find(cpt.child);
    if (it == net.index_.end())
      throw Error(ErrorCode::unknown_variable, "CPT child " + cpt.child + " is not a variable");
    const int i = it->second;
    if (seen[static_cast<std::size_t>(i)])
      throw Error(ErrorCode::invalid_argument, "more than one CPT for " + cpt.child);
    seen[static_cast<std::size_t>(i)] = true;
    net.cpts_[static_cast<std::size_t>(i)] = std::move(cpt);
  }
  for (int i = 0; i < n; ++i)
    if (!seen[static_cast<std::size_t>(i)])
      throw Error(ErrorCode::missing_cpt, "no CPT for variable " + net.variables_[i].name);

  net.parents_.resize(static_cast<std::size_t>(n));
  net.children_.resize(static_cast<std::size_t>(n));
  net.flat_.resize(static_cast<std::size_t>(n));
  net.strides_.resize(static_cast<std::size_t>(n));

  for (int i = 0; i < n; ++i) {
    const Cpt& cpt = net.cpts_[static_cast<std::size_t>(i)];
    std::size_t row_count = 1;
    for (const auto& pname : cpt.parents) {
      auto it = net.index_.find(pname);
      if (it == net.index_.end())
        throw Error(ErrorCode::unknown_parent,
                    "CPT for " + cpt.child + " references unknown parent " + pname);
      if (it->second == i)
        throw Error(ErrorCode::cycle_detected, cpt.child + " is its own parent");
      auto& parents = net.parents_[static_cast<std::size_t>(i)];
      if (std::find(parents.begin(), parents.end(), it->second) != parents.end())
        throw Error(ErrorCode::invalid_argument,
                    "CPT for " + cpt.child + " lists parent " + pname + " twice");
      parents.push_back(it->second);
      row_count *= static_cast<std::size_t>(net.variables_[it->second].cardinality());
    }
    const auto card = static_cast<std::size_t>(net.variables_[i].cardinality());
    if (cpt.rows.size() != row_count)
      throw Error(ErrorCode::row_length_mismatch,
                  "CPT for " + cpt.child + " has " + std::to_string(cpt.rows.size()) +
                      " rows, expected " + std::to_string(row_count));
    auto& flat = net.flat_[static_cast<std::size_t>(i)];
    flat.reserve(row_count * card);
    for (std::size_t r = 0; r < cpt.rows.size(); ++r) {
      const auto& row = cpt.rows[r];
      if (row.size() != card)
        throw Error(ErrorCode::row_length_mismatch,
                    "CPT for " + cpt.child + " row " + std::to_string(r) + " has " +
                        std::to_string(row.size()) + " entries, expected " + std::to_string(card));
      double sum = 0.0;
      for (double v : row) {
        if (!(v >= 0.0 && v <= 1.0))
          throw Error(ErrorCode::unnormalized_row,
                      "CPT for " + cpt.child + " row " + std::to_string(r) +
                          " has entry outside [0,1]");
        sum += v;
      }
      if (std::fabs(sum - 1.0) > kRowSumTolerance)
        throw Error(ErrorCode::unnormalized_row,
                    "CPT for " + cpt.child + " row " + std::to_string(r) + " sums to " +
                        std::to_string(sum));
      flat.insert(flat.end(), row.begin(), row.end());
    }
    // row stride per parent position (row-major, first parent slowest)
    auto& strides = net.strides_[static_cast<std::size_t>(i)];
    strides.assign(cpt.parents.size(), 1);
    for (int p = static_cast<int>(cpt.parents.size()) - 2; p >= 0; --p)
      strides[static_cast<std::size_t>(p)] =
          strides[static_cast<std::size_t>(p + 1)] *
          net.variables_[net.parents_[static_cast<std::size_t>(i)][static_cast<std::size_t>(p + 1)]]
              .cardinality();
  }

  for (int i = 0; i < n; ++i)
    for (int p : net.parents_[static_cast<std::size_t>(i)])
      net.children_[static_cast<std::size_t>(p)].push_back(i);

  // Kahn's algorithm, smallest index first for a deterministic order.
  std::vector<int> indegree(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    indegree[static_cast<std::size_t>(i)] =
        static_cast<int>(net.parents_[static_cast<std::size_t>(i)].size());
  std::vector<int> ready;
  for (int i = 0; i < n; ++i)
    if (indegree[static_cast<std::size_t>(i)] == 0) ready.push_back(i);
  while (!ready.empty()) {
    auto min_it = std::min_element(ready.begin(), ready.end());
    int v = *min_it;
    ready.erase(min_it);
    net.topo_order_.push_back(v);
    for (int c : net.children_[static_cast<std::size_t>(v)])
      if (--indegree[static_cast<std::size_t>(c)] == 0) ready.push_back(c);
  }
  if (static_cast<int>(net.topo_order_.size()) != n)
    throw Error(ErrorCode::cycle_detected, "parent relation contains a cycle");

  return net;
}

int Network::index_of(std::string_view name) const {
  int i = find(name);
  if (i < 0) throw Error(ErrorCode::unknown_variable, std::string(name));
  return i;
}

int Network::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  return it == index_.end() ? -1 : it->second;
}

std::span<const double> Network::cpt_row_for(int i, std::span<const int> assignment) const {
  const auto ui = static_cast<std::size_t>(i);
  std::size_t row = 0;
  const auto& par = parents_[ui];
  for (std::size_t p = 0; p < par.size(); ++p)
    row += static_cast<std::size_t>(assignment[static_cast<std::size_t>(par[p])]) *
           static_cast<std::size_t>(strides_[ui][p]);
  const auto card = static_cast<std::size_t>(variables_[ui].cardinality());
  return {flat_[ui].data() + row * card, card};
}

double Network::cpt_entry(int i, std::span<const int> parent_states, int child_state) const {
  const auto ui = static_cast<std::size_t>(i);
  std::size_t row = 0;
  for (std::size_t p = 0; p < parent_states.size(); ++p)
    row += static_cast<std::size_t>(parent_states[p]) * static_cast<std::size_t>(strides_[ui][p]);
  const auto card = static_cast<std::size_t>(variables_[ui].cardinality());
  return flat_[ui][row * card + static_cast<std::size_t>(child_state)];
}

int Network::state_index(int var, std::string_view label) const {
  const auto& states = variables_[static_cast<std::size_t>(var)].states;
  for (std::size_t s = 0; s < states.size(); ++s)
    if (states[s] == label) return static_cast<int>(s);
  throw Error(ErrorCode::unknown_state, std::string(label) + " is not a state of " +
                                            variables_[static_cast<std::size_t>(var)].name);
}

std::vector<int> Network::complete_assignment(const std::map<std::string, int>& by_name) const {
  std::vector<int> out(static_cast<std::size_t>(size()), -1);
  for (const auto& [name, state] : by_name) {
    const int i = index_of(name);
    if (state < 0 || state >= variables_[static_cast<std::size_t>(i)].cardinality())
      throw Error(ErrorCode::out_of_range, "state index for " + name);
    out[static_cast<std::size_t>(i)] = state;
  }
  for (int i = 0; i < size(); ++i)
    if (out[static_cast<std::size_t>(i)] < 0)
      throw Error(ErrorCode::incomplete_assignment,
                  "no value for " + variables_[static_cast<std::size_t>(i)].name);
  return out;
}

bool Network::same_structure_and_tables(const Network& other) const {
  if (size() != other.size()) return false;
  for (int i = 0; i < size(); ++i) {
    const Variable& a = variables_[static_cast<std::size_t>(i)];
    const Variable& b = other.variables_[static_cast<std::size_t>(i)];
    if (a.name != b.name || a.states != b.states || a.scale != b.scale) return false;
    const Cpt& ca = cpts_[static_cast<std::size_t>(i)];
    const Cpt& cb = other.cpts_[static_cast<std::size_t>(i)];
    if (ca.parents != cb.parents) return false;
    if (ca.rows.size() != cb.rows.size()) return false;
    for (std::size_t r = 0; r < ca.rows.size(); ++r) {
      if (ca.rows[r].size() != cb.rows[r].size()) return false;
      if (std::memcmp(ca.rows[r].data(), cb.rows[r].data(),
                      ca.rows[r].size() * sizeof(double)) != 0)
        return false;
    }
  }
  return true;
}

double joint_probability(const Network& net, std::span<const int> assignment) {
  if (assignment.size() != static_cast<std::size_t>(net.size()))
    throw Error(ErrorCode::incomplete_assignment,
                "assignment covers " + std::to_string(assignment.size()) + " of " +
                    std::to_string(net.size()) + " variables");
  double product = 1.0;
  for (int i = 0; i < net.size(); ++i) {
    const int s = assignment[static_cast<std::size_t>(i)];
    if (s < 0 || s >= net.variable(i).cardinality())
      throw Error(ErrorCode::out_of_range, "state index for " + net.variable(i).name);
    product *= net.cpt_row_for(i, assignment)[static_cast<std::size_t>(s)];
    if (product == 0.0) return 0.0;
  }
  return product;
}

double joint_probability(const Network& net, const std::map<std::string, int>& assignment) {
  return joint_probability(net, net.complete_assignment(assignment));
}

}  // namespace frictionnet::bn
