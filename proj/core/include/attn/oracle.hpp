#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "attn/ingest.hpp"
#include "attn/motifs.hpp"

// Deliberately naive reference implementations. They share no code with the
// production algorithms and exist to generate ground truth and check it.
namespace attn::oracle {

// Connected components (size >= 2) of one group's reply graph by
// union-find over resolved reply edges. Members are sorted message ids;
// components are ordered by their smallest member id.
std::vector<std::vector<std::string>> reply_components(std::span<const Message> group_messages);

// Hop distance from the component's root (the member without a reply target)
// by breadth-first search over child lists.
std::map<std::string, int> bfs_depths(std::span<const Message> group_messages, const std::vector<std::string>& members);

// Mean shortest-path distance over all unordered vertex pairs of an
// undirected tree given by a parent array (-1 for the root), by one BFS per
// vertex.
double all_pairs_virality(std::span<const int> parent);

// Motif presence by enumerating every injective vertex map from each
// template (built here, independently) into the graph. Edges may include
// self-loops. Exponential; intended for graphs of a handful of vertices.
MotifPresenceSet brute_force_motifs(int order, std::span<const std::pair<int, int>> edges, int max_n = 0,
                                    StarLoopSemantics star_loop = StarLoopSemantics::induced);

}  // namespace attn::oracle
