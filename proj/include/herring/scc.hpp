#pragma once

#include <cstdint>
#include <vector>

namespace herring {

using Adjacency = std::vector<std::vector<std::uint32_t>>;

/// Strongly connected components in canonical topological order of the
/// condensation: among SCCs whose predecessors are all placed, the one with
/// the smallest member index comes first. Members are sorted ascending.
/// Vertices are expected to be indexed in ascending digest order, which makes
/// the result independent of adjacency iteration order.
std::vector<std::vector<std::uint32_t>> tarjan_scc(const Adjacency& adj);

/// Component id per vertex, as produced by an iterative Tarjan pass. Ids are
/// in reverse topological order of discovery.
std::vector<std::uint32_t> tarjan_components(const Adjacency& adj, std::uint32_t* count);

}  // namespace herring
