// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string_view>
#include <vector>

#include "frictionnet/network.hpp"

namespace frictionnet::bn {

// Posterior P(query | evidence) by brute-force summation over every hidden
// completion. Exponential; kept as the reference oracle for posterior_ve.
Distribution posterior_enumeration(const Network& net, std::string_view query,
                                   const Evidence& evidence);

struct VeOptions {
  // Explicit elimination order over hidden variable names. Empty selects the
  // min-degree heuristic. Hidden variables missing from an explicit order are
  // appended min-degree; listed non-hidden names are an error.
  std::vector<std::string> elimination_order;
};

// Same posterior via factor-based variable elimination.
Distribution posterior_ve(const Network& net, std::string_view query, const Evidence& evidence,
                          const VeOptions& options = {});

// Iteratively removes leaves that are neither query nor evidence (equivalent
// to keeping the ancestral closure of {query} ∪ evidence). Posteriors over the
// pruned network equal posteriors over the original.
Network prune_barren(const Network& net, std::string_view query, const Evidence& evidence);

}  // namespace frictionnet::bn
