#include "deepnews/causal_chain.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "deepnews/error.hpp"

namespace deepnews {

std::string_view to_string(PathClass c) {
  return c == PathClass::Linear ? "Linear" : "NonLinearAmplified";
}

TransmissionGraph::TransmissionGraph(std::vector<EntityNode> nodes, std::vector<TransmissionEdge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
  std::set<std::string> ids;
  for (const auto& n : nodes_) {
    if (!ids.insert(n.id).second) fail(ErrorKind::Validation, "duplicate node id " + n.id);
  }
  for (const auto& e : edges_) {
    if (e.from == e.to) fail(ErrorKind::Validation, "self-loop on " + e.from);
    if (!(e.amplification >= 0.0)) fail(ErrorKind::Validation, "negative amplification on " + e.from + "->" + e.to);
    if (!ids.count(e.from) || !ids.count(e.to)) {
      fail(ErrorKind::Validation, "edge " + e.from + "->" + e.to + " references an undeclared node");
    }
  }
}

TransmissionGraph TransmissionGraph::from_json(const nlohmann::json& j) {
  std::vector<EntityNode> nodes;
  std::vector<TransmissionEdge> edges;
  try {
    for (const auto& n : j.at("nodes")) nodes.push_back({n.at("id").get<std::string>(), n.value("role", "")});
    for (const auto& e : j.at("edges")) {
      TransmissionEdge edge;
      edge.from = e.at("from").get<std::string>();
      edge.to = e.at("to").get<std::string>();
      edge.channel = e.value("channel", "");
      edge.amplification = e.value("amplification", 1.0);
      if (e.contains("mechanism") && e["mechanism"].is_string()) edge.mechanism = e["mechanism"].get<std::string>();
      edges.push_back(std::move(edge));
    }
  } catch (const nlohmann::json::exception& ex) {
    fail(ErrorKind::Parse, std::string("transmission graph: ") + ex.what());
  }
  return TransmissionGraph(std::move(nodes), std::move(edges));
}

nlohmann::ordered_json TransmissionGraph::to_json() const {
  nlohmann::ordered_json j;
  j["nodes"] = nlohmann::ordered_json::array();
  for (const auto& n : nodes_) j["nodes"].push_back({{"id", n.id}, {"role", n.role}});
  j["edges"] = nlohmann::ordered_json::array();
  for (const auto& e : edges_) {
    nlohmann::ordered_json je = {{"from", e.from}, {"to", e.to}, {"channel", e.channel},
                                 {"amplification", e.amplification}};
    je["mechanism"] = e.mechanism ? nlohmann::ordered_json(*e.mechanism) : nlohmann::ordered_json(nullptr);
    j["edges"].push_back(std::move(je));
  }
  return j;
}

bool TransmissionGraph::has_node(std::string_view id) const {
  return std::any_of(nodes_.begin(), nodes_.end(), [&](const auto& n) { return n.id == id; });
}

namespace {

// Kahn's algorithm; on failure, reports one edge that lies on a cycle.
std::vector<std::size_t> topo_order(const TransmissionGraph& g) {
  const auto& nodes = g.nodes();
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < nodes.size(); ++i) index[nodes[i].id] = i;
  std::vector<std::vector<std::size_t>> out(nodes.size());
  std::vector<std::size_t> indeg(nodes.size(), 0);
  for (const auto& e : g.edges()) {
    out[index[e.from]].push_back(index[e.to]);
    ++indeg[index[e.to]];
  }
  std::vector<std::size_t> order;
  std::vector<std::size_t> ready;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (indeg[i] == 0) ready.push_back(i);
  }
  while (!ready.empty()) {
    const auto v = ready.front();
    ready.erase(ready.begin());
    order.push_back(v);
    for (auto w : out[v]) {
      if (--indeg[w] == 0) ready.push_back(w);
    }
  }
  if (order.size() == nodes.size()) return order;

  // every remaining node has an unprocessed predecessor; walk backwards until a
  // node repeats, then report the edge that closes the loop
  std::vector<std::vector<std::size_t>> in(nodes.size());
  for (const auto& e : g.edges()) {
    if (indeg[index[e.to]] > 0 && indeg[index[e.from]] > 0) in[index[e.to]].push_back(index[e.from]);
  }
  std::size_t v = 0;
  while (indeg[v] == 0) ++v;
  std::vector<int> seen(nodes.size(), -1);
  int step = 0;
  while (seen[v] < 0) {
    seen[v] = step++;
    v = in[v].front();
  }
  const auto to = v;
  const auto from = in[v].front();
  fail(ErrorKind::Cycle, "cycle detected at edge " + nodes[from].id + " -> " + nodes[to].id);
}

}  // namespace

ImpactReport propagate_causal_chain(const TransmissionGraph& graph, std::string_view source, double initial_impact) {
  if (!graph.has_node(source)) fail(ErrorKind::NotFound, "unknown source entity " + std::string(source));
  if (!(initial_impact >= 0.0)) fail(ErrorKind::Domain, "initial impact must be >= 0");
  const auto order = topo_order(graph);
  const auto& nodes = graph.nodes();

  ImpactReport report;
  for (const auto& n : nodes) report.impact[n.id] = 0.0;
  report.impact[std::string(source)] = initial_impact;
  for (auto v : order) {
    const auto& id = nodes[v].id;
    if (id == source) continue;
    double sum = 0.0;
    for (const auto& e : graph.edges()) {
      if (e.to == id) sum += report.impact[e.from] * e.amplification;
    }
    report.impact[id] = sum;
  }

  std::vector<std::string> path{std::string(source)};
  std::function<void(const std::string&, double, bool)> dfs = [&](const std::string& at, double value, bool amplified) {
    for (const auto& e : graph.edges()) {
      if (e.from != at) continue;
      if (report.paths.size() >= kMaxEnumeratedPaths) {
        report.paths_truncated = true;
        return;
      }
      const bool amp = amplified || (e.amplification > 1.0 && e.mechanism && !e.mechanism->empty());
      path.push_back(e.to);
      const double v = value * e.amplification;
      report.paths.push_back({path, v, amp ? PathClass::NonLinearAmplified : PathClass::Linear});
      dfs(e.to, v, amp);
      path.pop_back();
    }
  };
  dfs(std::string(source), initial_impact, false);
  return report;
}

}  // namespace deepnews
