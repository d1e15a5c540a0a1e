#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace deepnews {

struct EntityNode {
  std::string id;
  std::string role;

  bool operator==(const EntityNode&) const = default;
};

struct TransmissionEdge {
  std::string from;
  std::string to;
  std::string channel;
  double amplification = 1.0;
  std::optional<std::string> mechanism;  // e.g. "Information Asymmetry"

  bool operator==(const TransmissionEdge&) const = default;
};

/// Inter-entity transmission graph. Construction rejects self-loops, negative
/// amplification and edges to undeclared nodes; cycles are only detected when
/// propagating.
class TransmissionGraph {
 public:
  TransmissionGraph() = default;
  TransmissionGraph(std::vector<EntityNode> nodes, std::vector<TransmissionEdge> edges);

  static TransmissionGraph from_json(const nlohmann::json& j);
  nlohmann::ordered_json to_json() const;

  const std::vector<EntityNode>& nodes() const { return nodes_; }
  const std::vector<TransmissionEdge>& edges() const { return edges_; }
  bool has_node(std::string_view id) const;

 private:
  std::vector<EntityNode> nodes_;
  std::vector<TransmissionEdge> edges_;
};

enum class PathClass { Linear, NonLinearAmplified };

std::string_view to_string(PathClass c);

struct PathImpact {
  std::vector<std::string> nodes;  // source first
  double impact = 0.0;
  PathClass classification = PathClass::Linear;
};

struct ImpactReport {
  std::map<std::string, double> impact;  // every node; 0 when unreachable
  std::vector<PathImpact> paths;         // every path leaving the source, DFS order
  bool paths_truncated = false;
};

inline constexpr std::size_t kMaxEnumeratedPaths = 10'000;

/// Node impact = sum over paths from `source` of initial_impact times the
/// product of edge amplifications. A path is NonLinearAmplified iff one of its
/// edges amplifies (> 1) through a declared mechanism.
ImpactReport propagate_causal_chain(const TransmissionGraph& graph, std::string_view source, double initial_impact);

}  // namespace deepnews
