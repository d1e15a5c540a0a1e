#include <chrono>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <thread>

#include "deepnews/error.hpp"
#include "deepnews/orchestrator.hpp"

namespace deepnews {

std::string_view to_string(NodeKind k) {
  switch (k) {
    case NodeKind::Ingest: return "Ingest";
    case NodeKind::Clean: return "Clean";
    case NodeKind::Plan: return "Plan";
    case NodeKind::Write: return "Write";
    case NodeKind::Assemble: return "Assemble";
    case NodeKind::Metrics: return "Metrics";
    case NodeKind::Report: return "Report";
  }
  return "Ingest";
}

namespace {

std::optional<NodeKind> parse_node_kind(std::string_view s) {
  for (auto k : {NodeKind::Ingest, NodeKind::Clean, NodeKind::Plan, NodeKind::Write, NodeKind::Assemble,
                 NodeKind::Metrics, NodeKind::Report}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

std::optional<NodeStatus> parse_node_status(std::string_view s) {
  for (auto k : {NodeStatus::Pending, NodeStatus::Running, NodeStatus::Done, NodeStatus::Failed}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(NodeStatus s) {
  switch (s) {
    case NodeStatus::Pending: return "Pending";
    case NodeStatus::Running: return "Running";
    case NodeStatus::Done: return "Done";
    case NodeStatus::Failed: return "Failed";
  }
  return "Pending";
}

std::size_t PipelineDag::write_count() const {
  std::size_t n = 0;
  for (const auto& node : nodes) n += node.kind == NodeKind::Write;
  return n;
}

std::optional<std::size_t> PipelineDag::find(std::string_view id) const {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].id == id) return i;
  }
  return std::nullopt;
}

std::vector<std::size_t> PipelineDag::topological_order() const {
  const auto n = nodes.size();
  std::vector<std::size_t> indegree(n, 0);
  std::vector<std::vector<std::size_t>> dependents(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto d : nodes[i].deps) {
      if (d >= n) fail(ErrorKind::Validation, "node " + nodes[i].id + " depends on unknown node " + std::to_string(d));
      ++indegree[i];
      dependents[d].push_back(i);
    }
  }
  std::vector<std::size_t> order;
  std::vector<bool> emitted(n, false);
  while (order.size() < n) {
    std::optional<std::size_t> next;
    for (std::size_t i = 0; i < n && !next; ++i) {
      if (!emitted[i] && indegree[i] == 0) next = i;
    }
    if (!next) {
      std::string stuck;
      for (std::size_t i = 0; i < n; ++i) {
        if (!emitted[i]) stuck += (stuck.empty() ? "" : ", ") + nodes[i].id;
      }
      fail(ErrorKind::Cycle, "pipeline graph has a cycle through: " + stuck);
    }
    emitted[*next] = true;
    order.push_back(*next);
    for (auto d : dependents[*next]) --indegree[d];
  }
  return order;
}

void PipelineDag::check() const {
  std::set<std::string> ids;
  for (const auto& node : nodes) {
    if (!ids.insert(node.id).second) fail(ErrorKind::Validation, "duplicate node id " + node.id);
  }
  topological_order();
  std::vector<std::size_t> writes;
  std::optional<std::size_t> plan;
  std::size_t assembles = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].kind == NodeKind::Write) writes.push_back(i);
    if (nodes[i].kind == NodeKind::Plan) plan = i;
    assembles += nodes[i].kind == NodeKind::Assemble;
  }
  if (writes.empty() && assembles == 0) return;
  if (assembles != 1) fail(ErrorKind::Validation, "pipeline needs exactly one Assemble node");
  if (!plan) fail(ErrorKind::Validation, "pipeline has Write nodes but no Plan node");
  for (const auto& node : nodes) {
    auto has = [&](std::size_t d) { return std::find(node.deps.begin(), node.deps.end(), d) != node.deps.end(); };
    if (node.kind == NodeKind::Write && !has(*plan)) fail(ErrorKind::Validation, node.id + " must depend on Plan");
    if (node.kind == NodeKind::Assemble) {
      for (auto w : writes) {
        if (!has(w)) fail(ErrorKind::Validation, "Assemble must depend on " + nodes[w].id);
      }
    }
  }
}

PipelineDag build_plan_dag() {
  PipelineDag dag;
  dag.nodes.push_back({"ingest", NodeKind::Ingest, 0, {}});
  dag.nodes.push_back({"clean", NodeKind::Clean, 0, {0}});
  dag.nodes.push_back({"plan", NodeKind::Plan, 0, {1}});
  return dag;
}

PipelineDag build_dag(std::size_t sections) {
  if (sections == 0) fail(ErrorKind::Validation, "a pipeline needs at least one section");
  auto dag = build_plan_dag();
  std::vector<std::size_t> writes;
  for (std::size_t k = 0; k < sections; ++k) {
    writes.push_back(dag.nodes.size());
    dag.nodes.push_back({"write_" + std::to_string(k + 1), NodeKind::Write, k, {2}});
  }
  const auto assemble = dag.nodes.size();
  dag.nodes.push_back({"assemble", NodeKind::Assemble, 0, writes});
  dag.nodes.push_back({"metrics", NodeKind::Metrics, 0, {assemble}});
  dag.nodes.push_back({"report", NodeKind::Report, 0, {assemble + 1}});
  dag.check();
  return dag;
}

PipelineDag build_dag(const Outline& outline, const RunConfig& config) {
  config.validate();
  return build_dag(outline.sections.size());
}

NodeRecord* RunRecord::find(std::string_view id) {
  for (auto& n : nodes) {
    if (n.id == id) return &n;
  }
  return nullptr;
}

const NodeRecord* RunRecord::find(std::string_view id) const {
  return const_cast<RunRecord*>(this)->find(id);
}

bool RunRecord::complete() const {
  return !nodes.empty() && std::all_of(nodes.begin(), nodes.end(), [](const auto& n) { return n.status == NodeStatus::Done; });
}

bool RunRecord::failed() const {
  return std::any_of(nodes.begin(), nodes.end(), [](const auto& n) { return n.status == NodeStatus::Failed; });
}

TokenUsage RunRecord::usage() const {
  TokenUsage u;
  for (const auto& n : nodes) u += n.usage;
  return u;
}

double RunRecord::cost() const {
  double c = 0.0;
  for (const auto& n : nodes) c += n.cost;
  return c;
}

std::vector<std::string> RunRecord::artifacts() const {
  std::vector<std::string> out;
  for (const auto& n : nodes) out.insert(out.end(), n.artifacts.begin(), n.artifacts.end());
  return out;
}

nlohmann::ordered_json to_json(const RunRecord& r) {
  nlohmann::ordered_json j;
  j["run_id"] = r.run_id;
  j["status"] = r.complete() ? "Done" : r.failed() ? "Failed" : "Pending";
  j["config"] = r.config;
  j["nodes"] = nlohmann::ordered_json::array();
  for (const auto& n : r.nodes) {
    nlohmann::ordered_json node;
    node["id"] = n.id;
    node["kind"] = std::string(to_string(n.kind));
    if (n.kind == NodeKind::Write) node["section"] = n.section;
    node["deps"] = n.deps;
    node["status"] = std::string(to_string(n.status));
    if (n.status == NodeStatus::Failed) {
      node["reason"] = n.reason;
      node["error_kind"] = n.error_kind;
    }
    node["started_ms"] = n.started_ms;
    node["finished_ms"] = n.finished_ms;
    node["executions"] = n.executions;
    node["token_usage"] = {{"prompt_tokens", n.usage.prompt_tokens}, {"completion_tokens", n.usage.completion_tokens}};
    node["cost"] = n.cost;
    node["artifacts"] = n.artifacts;
    j["nodes"].push_back(std::move(node));
  }
  const auto u = r.usage();
  j["token_usage"] = {{"prompt_tokens", u.prompt_tokens}, {"completion_tokens", u.completion_tokens},
                      {"total_tokens", u.total()}};
  j["cost"] = r.cost();
  j["currency"] = r.currency;
  j["wall_ms"] = r.wall_ms;
  j["artifacts"] = r.artifacts();
  return j;
}

RunRecord record_from_json(const nlohmann::json& j) {
  RunRecord r;
  try {
    r.run_id = j.at("run_id").get<std::string>();
    r.config = j.at("config");
    r.currency = j.value("currency", "");
    r.wall_ms = j.value("wall_ms", 0.0);
    for (const auto& node : j.at("nodes")) {
      NodeRecord n;
      n.id = node.at("id").get<std::string>();
      const auto kind = parse_node_kind(node.at("kind").get<std::string>());
      const auto status = parse_node_status(node.at("status").get<std::string>());
      if (!kind || !status) fail(ErrorKind::Parse, "run record: bad kind or status on node " + n.id);
      n.kind = *kind;
      n.status = *status;
      n.section = node.value("section", std::size_t{0});
      n.deps = node.at("deps").get<std::vector<std::string>>();
      n.reason = node.value("reason", "");
      n.error_kind = node.value("error_kind", "");
      n.started_ms = node.value("started_ms", 0.0);
      n.finished_ms = node.value("finished_ms", 0.0);
      n.executions = node.value("executions", std::size_t{0});
      n.usage.prompt_tokens = node.at("token_usage").at("prompt_tokens").get<long long>();
      n.usage.completion_tokens = node.at("token_usage").at("completion_tokens").get<long long>();
      n.cost = node.value("cost", 0.0);
      n.artifacts = node.value("artifacts", std::vector<std::string>{});
      r.nodes.push_back(std::move(n));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Parse, std::string("run record: ") + e.what());
  }
  return r;
}

void execute(const PipelineDag& dag, const NodeBody& body, std::size_t parallelism, RunRecord& record,
             const RecordSink& sink) {
  dag.check();
  parallelism = std::max<std::size_t>(1, parallelism);
  const auto n = dag.nodes.size();

  std::vector<NodeRecord*> recs(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& node = dag.nodes[i];
    if (!record.find(node.id)) {
      NodeRecord nr;
      nr.id = node.id;
      nr.kind = node.kind;
      nr.section = node.section;
      for (auto d : node.deps) nr.deps.push_back(dag.nodes[d].id);
      record.nodes.push_back(std::move(nr));
    }
  }
  for (std::size_t i = 0; i < n; ++i) recs[i] = record.find(dag.nodes[i].id);
  // a node stays Done only while everything upstream is Done
  for (auto i : dag.topological_order()) {
    auto& r = *recs[i];
    const bool deps_done = std::all_of(dag.nodes[i].deps.begin(), dag.nodes[i].deps.end(),
                                       [&](std::size_t d) { return recs[d]->status == NodeStatus::Done; });
    if (r.status != NodeStatus::Done || !deps_done) {
      r.status = NodeStatus::Pending;
      r.reason.clear();
      r.error_kind.clear();
    }
  }

  struct Message {
    std::size_t index;
    std::optional<NodeOutput> output;
    std::string reason;
    std::string kind;
    double finished_ms;
  };
  std::mutex mu;
  std::condition_variable cv;
  std::deque<Message> inbox;
  std::vector<std::thread> workers;

  const auto base_ms = record.wall_ms;
  const auto t0 = std::chrono::steady_clock::now();
  auto now_ms = [&] {
    return base_ms + std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  };
  auto publish = [&] {
    record.wall_ms = now_ms();
    if (sink) sink(record);
  };

  std::size_t running = 0;
  while (true) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = 0; i < n; ++i) {
        if (recs[i]->status != NodeStatus::Pending) continue;
        for (auto d : dag.nodes[i].deps) {
          if (recs[d]->status == NodeStatus::Failed) {
            recs[i]->status = NodeStatus::Failed;
            recs[i]->reason = "skipped: dependency " + dag.nodes[d].id + " failed";
            recs[i]->error_kind = "Skipped";
            changed = true;
            break;
          }
        }
      }
    }
    for (std::size_t i = 0; i < n && running < parallelism; ++i) {
      auto& r = *recs[i];
      if (r.status != NodeStatus::Pending) continue;
      const bool ready = std::all_of(dag.nodes[i].deps.begin(), dag.nodes[i].deps.end(),
                                     [&](std::size_t d) { return recs[d]->status == NodeStatus::Done; });
      if (!ready) continue;
      r.status = NodeStatus::Running;
      r.started_ms = now_ms();
      r.finished_ms = 0.0;
      ++r.executions;
      ++running;
      publish();
      workers.emplace_back([&, i, snapshot = record] {
        Message m{i, std::nullopt, {}, {}, 0.0};
        try {
          m.output = body(dag.nodes[i], snapshot);
        } catch (const GateFailure& e) {
          m.reason = e.what();
          m.kind = "Gate";
        } catch (const Error& e) {
          m.reason = e.what();
          m.kind = std::string(name(e.kind()));
        } catch (const std::exception& e) {
          m.reason = e.what();
          m.kind = "Internal";
        }
        m.finished_ms = now_ms();
        std::lock_guard lock(mu);
        inbox.push_back(std::move(m));
        cv.notify_one();
      });
    }
    if (running == 0) break;

    Message m;
    {
      std::unique_lock lock(mu);
      cv.wait(lock, [&] { return !inbox.empty(); });
      m = std::move(inbox.front());
      inbox.pop_front();
    }
    --running;
    auto& r = *recs[m.index];
    r.finished_ms = m.finished_ms;
    if (m.output) {
      r.status = NodeStatus::Done;
      r.usage = m.output->usage;
      r.cost = m.output->cost;
      r.artifacts = m.output->artifacts;
    } else {
      r.status = NodeStatus::Failed;
      r.reason = m.reason;
      r.error_kind = m.kind;
      r.usage = {};
      r.cost = 0.0;
      r.artifacts.clear();
    }
    publish();
  }
  for (auto& w : workers) w.join();
  publish();
}

int exit_code_for(const RunRecord& record) {
  if (record.complete()) return 0;
  bool config = false;
  for (const auto& n : record.nodes) {
    if (n.status != NodeStatus::Failed) continue;
    if (n.error_kind == "Gate") return 3;
    config = config || n.error_kind == name(ErrorKind::Config);
  }
  return config ? 2 : 4;
}

}  // namespace deepnews
