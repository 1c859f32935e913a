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

#include "locgc/graph/location_gcn.hpp"
#include "locgc/graph/road_graph.hpp"

#include <fstream>

#include "csv_util.hpp"

namespace locgc {

RoadGraph::RoadGraph(AdjacencyMatrix adjacency) : adjacency_(std::move(adjacency)) {
  if (adjacency_.rows() != adjacency_.cols() || adjacency_.rows() == 0) {
    throw ValidationError("adjacency must be a non-empty square matrix, got " + shape_string(adjacency_));
  }
  for (Index i = 0; i < adjacency_.rows(); ++i) {
    if (adjacency_(i, i) != 0) throw ValidationError("adjacency: self-loop at node " + std::to_string(i));
    for (Index j = 0; j < adjacency_.cols(); ++j) {
      const int v = adjacency_(i, j);
      if (v != 0 && v != 1) {
        throw ValidationError("adjacency: entry (" + std::to_string(i) + "," + std::to_string(j) +
                              ") is not 0/1");
      }
    }
  }
}

RoadGraph RoadGraph::from_edges(Index node_count, const std::vector<std::pair<Index, Index>>& edges) {
  if (node_count <= 0) throw ValidationError("graph needs at least one node");
  AdjacencyMatrix a = AdjacencyMatrix::Zero(node_count, node_count);
  for (const auto& [up, down] : edges) {
    if (up < 0 || up >= node_count || down < 0 || down >= node_count) {
      throw ValidationError("edge (" + std::to_string(up) + "," + std::to_string(down) +
                            ") references a node outside [0, " + std::to_string(node_count) + ")");
    }
    if (up == down) throw ValidationError("adjacency: self-loop at node " + std::to_string(up));
    a(down, up) = 1;
  }
  return RoadGraph(std::move(a));
}

AdjacencyOrientation parse_orientation(const std::string& text) {
  if (text == "in") return AdjacencyOrientation::kIn;
  if (text == "out") return AdjacencyOrientation::kOut;
  throw ValidationError("adjacency orientation must be 'in' or 'out', got '" + text + "'");
}

RoadGraph read_adjacency_csv(const std::string& path, Index expected_nodes,
                             AdjacencyOrientation orientation) {
  std::ifstream in = csv::open(path);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::vector<int>> dense;
  std::vector<std::pair<Index, Index>> edges;
  bool edge_list = false;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    const auto fields = csv::split(line);
    if (first) {
      first = false;
      if (fields.size() == 2 && fields[0] == "src" && fields[1] == "dst") {
        edge_list = true;
        continue;
      }
    }
    if (edge_list) {
      std::int64_t src = 0, dst = 0;
      if (fields.size() != 2 || !csv::parse_int(fields[0], src) || !csv::parse_int(fields[1], dst)) {
        throw ParseError(path + ": malformed edge row", line_no);
      }
      if (src == dst) throw ParseError(path + ": self-loop on node " + std::to_string(src), line_no);
      if (src < 0 || dst < 0 || (expected_nodes > 0 && (src >= expected_nodes || dst >= expected_nodes))) {
        throw ParseError(path + ": node id outside the flow data's range", line_no);
      }
      edges.emplace_back(src, dst);
    } else {
      std::vector<int> row;
      for (auto f : fields) {
        std::int64_t v = 0;
        if (!csv::parse_int(f, v) || (v != 0 && v != 1)) throw ParseError(path + ": expected 0/1 entry", line_no);
        row.push_back(static_cast<int>(v));
      }
      dense.push_back(std::move(row));
    }
  }

  AdjacencyMatrix file;
  if (edge_list) {
    Index n = expected_nodes;
    for (const auto& [s, d] : edges) n = std::max<Index>(n, std::max(s, d) + 1);
    if (n == 0) throw ValidationError(path + ": empty edge list and no node count");
    file = AdjacencyMatrix::Zero(n, n);
    for (const auto& [s, d] : edges) file(s, d) = 1;
  } else {
    const Index n = static_cast<Index>(dense.size());
    if (n == 0) throw ValidationError(path + ": empty adjacency file");
    if (expected_nodes > 0 && n != expected_nodes) {
      throw ValidationError(path + ": adjacency has " + std::to_string(n) + " nodes, flow data has " +
                            std::to_string(expected_nodes));
    }
    file.resize(n, n);
    for (Index i = 0; i < n; ++i) {
      if (static_cast<Index>(dense[i].size()) != n) {
        throw ValidationError(path + ": adjacency row " + std::to_string(i) + " has wrong length");
      }
      for (Index j = 0; j < n; ++j) file(i, j) = dense[i][j];
      if (file(i, i) != 0) throw ValidationError(path + ": self-loop on node " + std::to_string(i));
    }
  }
  if (orientation == AdjacencyOrientation::kOut) return RoadGraph(file.transpose());
  return RoadGraph(std::move(file));
}

void write_adjacency_edges(const std::string& path, const RoadGraph& graph) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << "src,dst\n";
  const auto& a = graph.adjacency();
  for (Index up = 0; up < a.cols(); ++up) {
    for (Index down = 0; down < a.rows(); ++down) {
      if (a(down, up)) out << up << "," << down << "\n";
    }
  }
}

Normalization parse_normalization(const std::string& text) {
  if (text == "dynamic") return Normalization::kDynamic;
  if (text == "static") return Normalization::kStatic;
  throw ValidationError("normalization must be 'dynamic' or 'static', got '" + text + "'");
}

std::string to_string(Normalization mode) {
  return mode == Normalization::kDynamic ? "dynamic" : "static";
}

}  // namespace locgc
