// SPDX-License-Identifier: Apache-2.0
#include "frictionnet/inference.hpp"

#include <algorithm>
#include <set>

#include "frictionnet/kernels.hpp"

namespace frictionnet::bn {

namespace {

struct QueryContext {
  int query = -1;
  std::vector<int> evidence_state;  // -1 where unobserved, indexed by variable
};

QueryContext validate_query(const Network& net, std::string_view query, const Evidence& evidence) {
  QueryContext ctx;
  ctx.query = net.index_of(query);
  ctx.evidence_state.assign(static_cast<std::size_t>(net.size()), -1);
  for (const auto& [name, state] : evidence) {
    const int i = net.index_of(name);
    if (state < 0 || state >= net.variable(i).cardinality())
      throw Error(ErrorCode::out_of_range, "evidence state for " + name);
    ctx.evidence_state[static_cast<std::size_t>(i)] = state;
  }
  if (ctx.evidence_state[static_cast<std::size_t>(ctx.query)] >= 0)
    throw Error(ErrorCode::query_is_evidence, std::string(query) + " is observed");
  return ctx;
}

Distribution normalize_posterior(const Network& net, int query, std::vector<double> mass) {
  const double total = kernels::sum(mass);
  if (!(total > 0.0))
    throw Error(ErrorCode::zero_probability_evidence,
                "evidence has probability zero under the model");
  kernels::scale(mass, 1.0 / total);
  const Variable& v = net.variable(query);
  return Distribution{v.name, v.scale, std::move(mass)};
}

// ---- variable elimination ----

struct Factor {
  std::vector<int> vars;   // ascending network variable indices
  std::vector<int> cards;  // matching cardinalities
  std::vector<double> values;  // row-major, last var fastest
};

Factor factor_from_cpt(const Network& net, int child, const std::vector<int>& evidence_state) {
  // scope = parents + child, evidence variables sliced out
  std::vector<int> scope = net.parents(child);
  scope.push_back(child);
  std::vector<int> scope_sorted = scope;
  std::sort(scope_sorted.begin(), scope_sorted.end());

  Factor f;
  for (int v : scope_sorted)
    if (evidence_state[static_cast<std::size_t>(v)] < 0) {
      f.vars.push_back(v);
      f.cards.push_back(net.variable(v).cardinality());
    }
  std::size_t size = 1;
  for (int c : f.cards) size *= static_cast<std::size_t>(c);
  f.values.assign(size, 0.0);

  // walk every assignment of the unobserved scope variables
  std::vector<int> full(static_cast<std::size_t>(net.size()), 0);
  for (int v : scope_sorted) {
    const int e = evidence_state[static_cast<std::size_t>(v)];
    if (e >= 0) full[static_cast<std::size_t>(v)] = e;
  }
  std::vector<int> idx(f.vars.size(), 0);
  for (std::size_t flat = 0; flat < f.values.size(); ++flat) {
    for (std::size_t k = 0; k < f.vars.size(); ++k)
      full[static_cast<std::size_t>(f.vars[k])] = idx[k];
    f.values[flat] = net.cpt_row_for(child, full)[static_cast<std::size_t>(
        full[static_cast<std::size_t>(child)])];
    for (int k = static_cast<int>(idx.size()) - 1; k >= 0; --k) {
      if (++idx[static_cast<std::size_t>(k)] <
          f.cards[static_cast<std::size_t>(k)])
        break;
      idx[static_cast<std::size_t>(k)] = 0;
    }
  }
  return f;
}

Factor factor_product(const Factor& a, const Factor& b) {
  Factor out;
  std::set_union(a.vars.begin(), a.vars.end(), b.vars.begin(), b.vars.end(),
                 std::back_inserter(out.vars));
  std::size_t size = 1;
  std::vector<int> stride_a(out.vars.size(), 0), stride_b(out.vars.size(), 0);
  out.cards.resize(out.vars.size());

  auto strides_of = [](const Factor& f) {
    std::vector<std::size_t> s(f.vars.size(), 1);
    for (int k = static_cast<int>(f.vars.size()) - 2; k >= 0; --k)
      s[static_cast<std::size_t>(k)] =
          s[static_cast<std::size_t>(k + 1)] *
          static_cast<std::size_t>(f.cards[static_cast<std::size_t>(k + 1)]);
    return s;
  };
  const auto sa = strides_of(a);
  const auto sb = strides_of(b);
  for (std::size_t k = 0; k < out.vars.size(); ++k) {
    const int v = out.vars[k];
    auto ia = std::find(a.vars.begin(), a.vars.end(), v);
    auto ib = std::find(b.vars.begin(), b.vars.end(), v);
    out.cards[k] = ia != a.vars.end()
                       ? a.cards[static_cast<std::size_t>(ia - a.vars.begin())]
                       : b.cards[static_cast<std::size_t>(ib - b.vars.begin())];
    if (ia != a.vars.end())
      stride_a[k] = static_cast<int>(sa[static_cast<std::size_t>(ia - a.vars.begin())]);
    if (ib != b.vars.end())
      stride_b[k] = static_cast<int>(sb[static_cast<std::size_t>(ib - b.vars.begin())]);
    size *= static_cast<std::size_t>(out.cards[k]);
  }

  out.values.resize(size);
  std::vector<int> idx(out.vars.size(), 0);
  std::size_t off_a = 0, off_b = 0;
  for (std::size_t flat = 0; flat < size; ++flat) {
    out.values[flat] = a.values[off_a] * b.values[off_b];
    for (int k = static_cast<int>(idx.size()) - 1; k >= 0; --k) {
      const auto uk = static_cast<std::size_t>(k);
      if (++idx[uk] < out.cards[uk]) {
        off_a += static_cast<std::size_t>(stride_a[uk]);
        off_b += static_cast<std::size_t>(stride_b[uk]);
        break;
      }
      off_a -= static_cast<std::size_t>(stride_a[uk]) * static_cast<std::size_t>(out.cards[uk] - 1);
      off_b -= static_cast<std::size_t>(stride_b[uk]) * static_cast<std::size_t>(out.cards[uk] - 1);
      idx[uk] = 0;
    }
  }
  return out;
}

Factor factor_marginalize(const Factor& f, int var) {
  const auto pos_it = std::find(f.vars.begin(), f.vars.end(), var);
  const auto pos = static_cast<std::size_t>(pos_it - f.vars.begin());
  Factor out;
  out.vars = f.vars;
  out.vars.erase(out.vars.begin() + static_cast<std::ptrdiff_t>(pos));
  out.cards = f.cards;
  out.cards.erase(out.cards.begin() + static_cast<std::ptrdiff_t>(pos));
  std::size_t outer = 1, inner = 1;
  for (std::size_t k = 0; k < pos; ++k) outer *= static_cast<std::size_t>(f.cards[k]);
  for (std::size_t k = pos + 1; k < f.cards.size(); ++k)
    inner *= static_cast<std::size_t>(f.cards[k]);
  const auto card = static_cast<std::size_t>(f.cards[pos]);
  out.values.assign(outer * inner, 0.0);
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t s = 0; s < card; ++s)
      for (std::size_t i = 0; i < inner; ++i)
        out.values[o * inner + i] += f.values[(o * card + s) * inner + i];
  return out;
}

}  // namespace

Distribution posterior_enumeration(const Network& net, std::string_view query,
                                   const Evidence& evidence) {
  const QueryContext ctx = validate_query(net, query, evidence);
  const int n = net.size();

  std::vector<int> hidden;
  for (int i = 0; i < n; ++i)
    if (i != ctx.query && ctx.evidence_state[static_cast<std::size_t>(i)] < 0) hidden.push_back(i);

  std::vector<int> assignment(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i)
    if (ctx.evidence_state[static_cast<std::size_t>(i)] >= 0)
      assignment[static_cast<std::size_t>(i)] = ctx.evidence_state[static_cast<std::size_t>(i)];

  const int qcard = net.variable(ctx.query).cardinality();
  std::vector<double> mass(static_cast<std::size_t>(qcard), 0.0);
  for (int y = 0; y < qcard; ++y) {
    assignment[static_cast<std::size_t>(ctx.query)] = y;
    for (int h : hidden) assignment[static_cast<std::size_t>(h)] = 0;
    // odometer over hidden completions
    while (true) {
      mass[static_cast<std::size_t>(y)] += joint_probability(net, assignment);
      int k = static_cast<int>(hidden.size()) - 1;
      for (; k >= 0; --k) {
        const int h = hidden[static_cast<std::size_t>(k)];
        if (++assignment[static_cast<std::size_t>(h)] < net.variable(h).cardinality()) break;
        assignment[static_cast<std::size_t>(h)] = 0;
      }
      if (k < 0) break;
    }
  }
  return normalize_posterior(net, ctx.query, std::move(mass));
}

Distribution posterior_ve(const Network& net, std::string_view query, const Evidence& evidence,
                          const VeOptions& options) {
  const QueryContext ctx = validate_query(net, query, evidence);
  const int n = net.size();

  std::vector<Factor> factors;
  factors.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) factors.push_back(factor_from_cpt(net, i, ctx.evidence_state));

  std::vector<bool> hidden(static_cast<std::size_t>(n), false);
  for (int i = 0; i < n; ++i)
    hidden[static_cast<std::size_t>(i)] =
        i != ctx.query && ctx.evidence_state[static_cast<std::size_t>(i)] < 0;

  std::vector<int> order;
  std::vector<bool> ordered(static_cast<std::size_t>(n), false);
  for (const auto& name : options.elimination_order) {
    const int v = net.index_of(name);
    if (!hidden[static_cast<std::size_t>(v)])
      throw Error(ErrorCode::invalid_argument,
                  name + " is not a hidden variable of this query");
    if (ordered[static_cast<std::size_t>(v)])
      throw Error(ErrorCode::invalid_argument, name + " listed twice in elimination order");
    ordered[static_cast<std::size_t>(v)] = true;
    order.push_back(v);
  }

  // Min-degree completion: repeatedly pick the remaining hidden variable with
  // the fewest distinct neighbors in the current factor scopes.
  std::vector<int> remaining;
  for (int i = 0; i < n; ++i)
    if (hidden[static_cast<std::size_t>(i)] && !ordered[static_cast<std::size_t>(i)])
      remaining.push_back(i);

  auto eliminate = [&factors](int var) {
    Factor joined;
    bool have = false;
    std::vector<Factor> rest;
    for (auto& f : factors) {
      if (std::find(f.vars.begin(), f.vars.end(), var) != f.vars.end()) {
        joined = have ? factor_product(joined, f) : std::move(f);
        have = true;
      } else {
        rest.push_back(std::move(f));
      }
    }
    if (have) rest.push_back(factor_marginalize(joined, var));
    factors = std::move(rest);
  };

  for (int v : order) eliminate(v);

  while (!remaining.empty()) {
    int best = -1;
    std::size_t best_degree = 0;
    for (int v : remaining) {
      std::set<int> neighbors;
      for (const auto& f : factors)
        if (std::find(f.vars.begin(), f.vars.end(), v) != f.vars.end())
          neighbors.insert(f.vars.begin(), f.vars.end());
      neighbors.erase(v);
      if (best < 0 || neighbors.size() < best_degree) {
        best = v;
        best_degree = neighbors.size();
      }
    }
    remaining.erase(std::find(remaining.begin(), remaining.end(), best));
    eliminate(best);
  }

  // all remaining scopes are {} or {query}
  const int qcard = net.variable(ctx.query).cardinality();
  std::vector<double> mass(static_cast<std::size_t>(qcard), 1.0);
  for (const auto& f : factors) {
    if (f.vars.empty()) {
      for (auto& m : mass) m *= f.values[0];
    } else {
      for (int y = 0; y < qcard; ++y)
        mass[static_cast<std::size_t>(y)] *= f.values[static_cast<std::size_t>(y)];
    }
  }
  return normalize_posterior(net, ctx.query, std::move(mass));
}

Network prune_barren(const Network& net, std::string_view query, const Evidence& evidence) {
  const int q = net.index_of(query);
  std::vector<bool> keep(static_cast<std::size_t>(net.size()), false);
  std::vector<int> stack{q};
  for (const auto& [name, state] : evidence) {
    (void)state;
    stack.push_back(net.index_of(name));
  }
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    if (keep[static_cast<std::size_t>(v)]) continue;
    keep[static_cast<std::size_t>(v)] = true;
    for (int p : net.parents(v)) stack.push_back(p);
  }

  std::vector<Variable> vars;
  std::vector<Cpt> cpts;
  for (int i = 0; i < net.size(); ++i)
    if (keep[static_cast<std::size_t>(i)]) {
      vars.push_back(net.variable(i));
      cpts.push_back(net.cpt(i));
    }
  return Network::build(std::move(vars), std::move(cpts));
}

}  // namespace frictionnet::bn
