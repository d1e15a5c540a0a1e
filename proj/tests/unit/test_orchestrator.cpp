#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <thread>

#include "deepnews/error.hpp"
#include "deepnews/orchestrator.hpp"
#include "support.hpp"

using namespace deepnews;

namespace {

NodeOutput sleeping_body(const DagNode& node, int ms) {
  if (node.kind == NodeKind::Write) std::this_thread::sleep_for(std::chrono::milliseconds(ms));
  NodeOutput out;
  out.usage = {10, 5};
  out.cost = 0.001;
  return out;
}

std::vector<const NodeRecord*> writes(const RunRecord& r) {
  std::vector<const NodeRecord*> out;
  for (const auto& n : r.nodes) {
    if (n.kind == NodeKind::Write) out.push_back(&n);
  }
  return out;
}

ErrorKind check_kind(const PipelineDag& dag) {
  try {
    dag.check();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("check passed");
  return ErrorKind::Io;
}

}  // namespace

TEST_SUITE("orchestrator") {
  TEST_CASE("five sections give five write nodes behind plan and ahead of one assemble") {
    const auto dag = build_dag(5);
    CHECK(dag.write_count() == 5);
    CHECK_NOTHROW(dag.check());
    const auto assemble = dag.find("assemble");
    const auto plan = dag.find("plan");
    REQUIRE(assemble);
    REQUIRE(plan);
    std::size_t assembles = 0;
    for (const auto& n : dag.nodes) {
      assembles += n.kind == NodeKind::Assemble;
      if (n.kind == NodeKind::Write) {
        CHECK(n.deps == std::vector<std::size_t>{*plan});
        const auto& ad = dag.nodes[*assemble].deps;
        CHECK(std::find(ad.begin(), ad.end(), *dag.find(n.id)) != ad.end());
      }
    }
    CHECK(assembles == 1);
    const auto order = dag.topological_order();
    std::vector<std::size_t> pos(dag.nodes.size());
    for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
    for (std::size_t i = 0; i < dag.nodes.size(); ++i) {
      for (auto d : dag.nodes[i].deps) CHECK(pos[d] < pos[i]);
    }
    CHECK(dag.nodes.front().id == "ingest");
    CHECK(dag.nodes.back().id == "report");
    CHECK(build_plan_dag().nodes.size() == 3);
    CHECK_NOTHROW(build_plan_dag().check());
  }

  TEST_CASE("malformed graphs are rejected") {
    auto cyclic = build_dag(2);
    cyclic.nodes[*cyclic.find("ingest")].deps.push_back(*cyclic.find("report"));
    CHECK(check_kind(cyclic) == ErrorKind::Cycle);
    CHECK_THROWS_AS(cyclic.topological_order(), Error);

    auto loose = build_dag(2);
    loose.nodes[*loose.find("assemble")].deps = {*loose.find("write_1")};
    CHECK(check_kind(loose) == ErrorKind::Validation);

    auto orphan = build_dag(2);
    orphan.nodes[*orphan.find("write_2")].deps.clear();
    CHECK(check_kind(orphan) == ErrorKind::Validation);

    auto twice = build_dag(2);
    auto extra = twice.nodes[*twice.find("assemble")];
    extra.id = "assemble_2";
    twice.nodes.push_back(extra);
    CHECK(check_kind(twice) == ErrorKind::Validation);
  }

  TEST_CASE("writers overlap at full parallelism") {
    const auto dag = build_dag(5);
    RunRecord record;
    execute(dag, [](const DagNode& n, const RunRecord&) { return sleeping_body(n, 150); }, 5, record);
    REQUIRE(record.complete());
    const auto w = writes(record);
    REQUIRE(w.size() == 5);
    double latest_start = 0, earliest_finish = 1e18;
    for (const auto* n : w) {
      latest_start = std::max(latest_start, n->started_ms);
      earliest_finish = std::min(earliest_finish, n->finished_ms);
    }
    CHECK(latest_start < earliest_finish);
  }

  TEST_CASE("parallelism one runs strictly serially") {
    const auto dag = build_dag(4);
    RunRecord record;
    execute(dag, [](const DagNode& n, const RunRecord&) { return sleeping_body(n, 20); }, 1, record);
    REQUIRE(record.complete());
    std::vector<std::pair<double, double>> spans;
    for (const auto& n : record.nodes) spans.emplace_back(n.started_ms, n.finished_ms);
    std::sort(spans.begin(), spans.end());
    for (std::size_t i = 1; i < spans.size(); ++i) CHECK(spans[i].first >= spans[i - 1].second);
  }

  TEST_CASE("totals are sums over nodes") {
    const auto dag = build_dag(3);
    RunRecord record;
    execute(dag, [](const DagNode& n, const RunRecord&) { return sleeping_body(n, 0); }, 3, record);
    CHECK(record.cost() == doctest::Approx(0.001 * static_cast<double>(dag.nodes.size())));
    CHECK(record.usage().total() == 15 * static_cast<long long>(dag.nodes.size()));
    const auto back = record_from_json(nlohmann::json::parse(to_json(record).dump()));
    CHECK(to_json(back).dump() == to_json(record).dump());
  }

  TEST_CASE("a failed writer skips its dependents and resume reruns only them") {
    const auto dag = build_dag(5);
    RunRecord record;
    int sink_calls = 0;
    execute(
        dag,
        [](const DagNode& n, const RunRecord&) -> NodeOutput {
          if (n.id == "write_3") fail(ErrorKind::Generation, "backend down");
          return sleeping_body(n, 0);
        },
        5, record, [&](const RunRecord&) { ++sink_calls; });
    CHECK(sink_calls > 0);
    CHECK(record.failed());
    CHECK(exit_code_for(record) == 4);
    const auto* w3 = record.find("write_3");
    REQUIRE(w3);
    CHECK(w3->status == NodeStatus::Failed);
    CHECK(w3->error_kind == "Generation");
    CHECK(w3->reason.find("backend down") != std::string::npos);
    for (const char* id : {"assemble", "metrics", "report"}) {
      const auto* n = record.find(id);
      REQUIRE(n);
      CHECK(n->status == NodeStatus::Failed);
      CHECK(n->error_kind == "Skipped");
      CHECK(n->reason.rfind("skipped", 0) == 0);
      CHECK(n->executions == 0);
    }
    for (const char* id : {"write_1", "write_2", "write_4", "write_5"}) CHECK(record.find(id)->status == NodeStatus::Done);

    std::vector<std::string> ran;
    execute(
        dag,
        [&](const DagNode& n, const RunRecord&) {
          ran.push_back(n.id);
          return sleeping_body(n, 0);
        },
        1, record);
    CHECK(record.complete());
    CHECK(ran == std::vector<std::string>{"write_3", "assemble", "metrics", "report"});
    CHECK(record.find("write_1")->executions == 1);
    CHECK(record.find("write_3")->executions == 2);
    CHECK(exit_code_for(record) == 0);
  }

  TEST_CASE("gate and config failures map to their exit codes") {
    const auto dag = build_plan_dag();
    RunRecord gate;
    execute(
        dag,
        [](const DagNode& n, const RunRecord&) -> NodeOutput {
          if (n.kind == NodeKind::Clean) throw GateFailure("too small");
          return {};
        },
        1, gate);
    CHECK(gate.find("clean")->error_kind == "Gate");
    CHECK(exit_code_for(gate) == 3);
    RunRecord config;
    execute(
        dag,
        [](const DagNode& n, const RunRecord&) -> NodeOutput {
          if (n.kind == NodeKind::Ingest) fail(ErrorKind::Config, "bad");
          return {};
        },
        1, config);
    CHECK(exit_code_for(config) == 2);
  }

  TEST_CASE("report formats cost, acceptance and ecpa") {
    RunRecord record;
    record.run_id = "r";
    record.currency = "CNY";
    NodeRecord n;
    n.id = "write_1";
    n.kind = NodeKind::Write;
    n.status = NodeStatus::Done;
    n.cost = 0.0991;
    record.nodes.push_back(n);
    MetricsReport m;
    const auto plain = run_report(record, m);
    CHECK(plain.text.find("Avg. Cost per Article   0.0991 CNY") != std::string::npos);
    CHECK(plain.text.find("ECPA") == std::string::npos);
    CHECK_FALSE(plain.json.contains("ecpa"));
    CHECK(plain.json["cost"].get<double>() == 0.0991);

    const auto zero = run_report(record, m, {}, 0.0);
    CHECK(zero.text.find("infinite") != std::string::npos);
    CHECK(zero.json["ecpa"] == "infinite");

    const auto quarter = run_report(record, m, {}, 0.25);
    CHECK(quarter.json["ecpa"].get<double>() == doctest::Approx(0.3964));
    CHECK(quarter.text.find("0.3964 CNY") != std::string::npos);
    CHECK_THROWS_AS(run_report(record, m, {}, 1.5), Error);
  }
}

TEST_SUITE("orchestrator") {
  TEST_CASE("full mock run writes every artifact") {
    testsupport::TempDir dir("run");
    auto config = testsupport::vgame_config(dir.path());
    const auto result = run_pipeline(config);
    REQUIRE(result.exit_code == 0);
    CHECK(result.record.complete());
    CHECK(result.run_dir == dir.path() / config.derived_run_id());
    for (const char* f : {"record.json", "ingest.json", "bundle.json", "gate.json", "outline.json", "article.json",
                          "article.md", "metrics.json", "report.json", "report.txt"}) {
      CHECK_MESSAGE(std::filesystem::exists(result.run_dir / f), f);
    }
    const auto outline = read_json_file(result.run_dir / "outline.json");
    const auto sections = outline["sections"].size();
    CHECK(result.record.nodes.size() == 6 + sections);
    for (std::size_t k = 1; k <= sections; ++k) {
      CHECK(std::filesystem::exists(result.run_dir / "sections" / ("section_" + std::to_string(k) + ".json")));
    }
    const auto saved = record_from_json(read_json_file(result.run_dir / "record.json"));
    CHECK(saved.complete());
    double sum = 0;
    for (const auto& n : saved.nodes) sum += n.cost;
    CHECK(saved.cost() == doctest::Approx(sum));
    CHECK(saved.cost() > 0);
  }

  TEST_CASE("small corpus is stopped by the gate") {
    testsupport::TempDir dir("gate");
    std::string small;
    std::istringstream in(testsupport::slurp(testsupport::fixture("vgame_corpus.jsonl")));
    std::string line;
    for (int i = 0; i < 3 && std::getline(in, line); ++i) small += line + "\n";
    testsupport::write_file(dir / "small.jsonl", small);
    auto config = testsupport::vgame_config(dir / "runs");
    config.corpus = dir / "small.jsonl";
    const auto result = run_pipeline(config);
    CHECK(result.exit_code == 3);
    CHECK(result.record.find("clean")->error_kind == "Gate");
    CHECK(std::filesystem::exists(result.run_dir / "gate.json"));
    CHECK_FALSE(std::filesystem::exists(result.run_dir / "article.json"));

    config.zone.gate_mode = GateMode::Warn;
    config.run_id = "warned";
    const auto warned = run_pipeline(config);
    CHECK(warned.record.find("clean")->status == NodeStatus::Done);
  }

  TEST_CASE("failed section skips assembly and resume finishes the run") {
    testsupport::TempDir dir("resume");
    auto config = testsupport::vgame_config(dir.path());
    config.run_id = "r1";
    config.mock.fail_sections = {"Simulating New Variables"};
    const auto failed = run_pipeline(config);
    CHECK(failed.exit_code == 4);
    const auto* assemble = failed.record.find("assemble");
    REQUIRE(assemble);
    CHECK(assemble->status == NodeStatus::Failed);
    CHECK(assemble->error_kind == "Skipped");
    CHECK(failed.record.find("write_3")->error_kind == "Generation");

    config.mock.fail_sections.clear();
    const auto resumed = run_pipeline(config, true);
    CHECK(resumed.exit_code == 0);
    for (const auto& n : resumed.record.nodes) {
      CHECK_MESSAGE(n.status == NodeStatus::Done, n.id);
      CHECK_MESSAGE(n.executions == (n.id == "write_3" ? 2u : 1u), n.id);
    }

    auto missing = config;
    missing.run_id = "never-ran";
    CHECK_THROWS_AS(run_pipeline(missing, true), Error);
  }

  TEST_CASE("effective parallelism defaults to the section count") {
    RunConfig c;
    CHECK(c.effective_parallelism(5) == 5);
    c.parallelism = 2;
    CHECK(c.effective_parallelism(5) == 2);
    c.parallelism = 0;
    CHECK(c.effective_parallelism(0) == 1);
  }
}
