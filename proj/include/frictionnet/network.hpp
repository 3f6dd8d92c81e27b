// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "frictionnet/error.hpp"

namespace frictionnet::bn {

// Measurement scale of a discrete variable. Wasserstein-1 is only defined on
// ordered state spaces, so distributions carry this through to the metrics.
enum class Scale { nominal, ordinal };

struct Variable {
  std::string name;
  std::vector<std::string> states;
  Scale scale = Scale::nominal;

  int cardinality() const { return static_cast<int>(states.size()); }
};

// One conditional probability table. `rows` is indexed row-major over the
// ordered parent list (first parent varies slowest); each row is a
// distribution over the child's states.
struct Cpt {
  std::string child;
  std::vector<std::string> parents;
  std::vector<std::vector<double>> rows;
};

// Hard evidence: observed state index per variable name.
using Evidence = std::map<std::string, int>;

// Normalized probability vector over one variable's states.
struct Distribution {
  std::string variable;
  Scale scale = Scale::nominal;
  std::vector<double> p;

  int argmax() const;
};

Distribution make_delta(const Variable& var, int state);

// Immutable validated DAG of discrete variables with one CPT per variable.
// All accessors are const; safe for concurrent use after construction.
class Network {
 public:
  static Network build(std::vector<Variable> variables, std::vector<Cpt> cpts);

  int size() const { return static_cast<int>(variables_.size()); }
  const Variable& variable(int i) const { return variables_[i]; }
  const std::vector<Variable>& variables() const { return variables_; }

  int index_of(std::string_view name) const;  // throws unknown_variable
  int find(std::string_view name) const;      // -1 if absent

  const std::vector<int>& parents(int i) const { return parents_[i]; }
  const std::vector<int>& children(int i) const { return children_[i]; }
  const std::vector<int>& topological_order() const { return topo_order_; }

  const Cpt& cpt(int i) const { return cpts_[i]; }

  // Row of variable i's CPT for the given full assignment (indexed by
  // variable index; only i's parent entries are read).
  std::span<const double> cpt_row_for(int i, std::span<const int> assignment) const;

  // Probability of child state given parent states (parent order = cpt order).
  double cpt_entry(int i, std::span<const int> parent_states, int child_state) const;

  int state_index(int var, std::string_view label) const;  // throws unknown_state

  // Complete assignment (one state index per variable, in variable order)
  // from a name->state map. Throws incomplete_assignment / unknown_variable.
  std::vector<int> complete_assignment(const std::map<std::string, int>& by_name) const;

  bool same_structure_and_tables(const Network& other) const;  // bitwise CPT compare

 private:
  Network() = default;

  std::vector<Variable> variables_;
  std::vector<Cpt> cpts_;                    // aligned with variables_
  std::unordered_map<std::string, int> index_;
  std::vector<std::vector<int>> parents_;    // variable indices
  std::vector<std::vector<int>> children_;
  std::vector<int> topo_order_;
  std::vector<std::vector<double>> flat_;    // per variable: rows*card values
  std::vector<std::vector<int>> strides_;    // per variable: row stride per parent
};

// Product of P(x_i | parents_i) over all variables (Eq.-3-style factorization).
// `assignment` must cover every variable, in variable order.
double joint_probability(const Network& net, std::span<const int> assignment);
double joint_probability(const Network& net, const std::map<std::string, int>& assignment);

}  // namespace frictionnet::bn
