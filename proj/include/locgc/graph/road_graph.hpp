// Copyright 2026 The locgc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LOCGC_GRAPH_ROAD_GRAPH_HPP
#define LOCGC_GRAPH_ROAD_GRAPH_HPP

#include <string>
#include <utility>
#include <vector>

#include "locgc/core.hpp"

namespace locgc {

using AdjacencyMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Directed road network over N sections.
///
/// adjacency(i, j) == 1 means section j feeds section i (j is upstream of i),
/// so row i of any support built from the graph gathers the data of i's
/// upstream sections. The diagonal is always zero; self-loops are added by
/// the support builders.
class RoadGraph {
 public:
  explicit RoadGraph(AdjacencyMatrix adjacency);

  /// Graph from (upstream, downstream) pairs.
  static RoadGraph from_edges(Index node_count, const std::vector<std::pair<Index, Index>>& edges);

  static RoadGraph isolated(Index node_count) {
    return RoadGraph(AdjacencyMatrix::Zero(node_count, node_count));
  }

  Index node_count() const { return adjacency_.rows(); }
  const AdjacencyMatrix& adjacency() const { return adjacency_; }
  bool feeds(Index upstream, Index downstream) const { return adjacency_(downstream, upstream) != 0; }
  Index edge_count() const { return adjacency_.sum(); }

  /// A + E as a real matrix.
  template <typename Scalar>
  Matrix<Scalar> with_self_loops() const {
    Matrix<Scalar> m = adjacency_.cast<Scalar>();
    m.diagonal().setOnes();
    return m;
  }

  bool operator==(const RoadGraph& other) const { return adjacency_ == other.adjacency_; }

 private:
  AdjacencyMatrix adjacency_;
};

enum class AdjacencyOrientation {
  kIn,   // file row i lists the sections that feed i
  kOut,  // file row i lists the sections that i feeds
};

AdjacencyOrientation parse_orientation(const std::string& text);

/// Reads either an edge list with header `src,dst` or a dense 0/1 matrix.
/// Both describe a file matrix M (an edge sets M(src, dst) = 1). With kOut
/// (the default) M(i, j) = 1 reads "i feeds j" and is transposed on ingest;
/// with kIn M is taken as the internal adjacency. When `expected_nodes` is
/// positive every node id must be below it and a dense matrix must have
/// exactly that size. Self-loops are rejected.
RoadGraph read_adjacency_csv(const std::string& path, Index expected_nodes = 0,
                             AdjacencyOrientation orientation = AdjacencyOrientation::kOut);

void write_adjacency_edges(const std::string& path, const RoadGraph& graph);

}  // namespace locgc

#endif  // LOCGC_GRAPH_ROAD_GRAPH_HPP
