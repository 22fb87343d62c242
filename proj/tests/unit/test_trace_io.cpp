#include <doctest.h>

#include <sstream>

#include "rbocoop/config.hpp"
#include "rbocoop/error.hpp"
#include "rbocoop/trace_io.hpp"

using namespace rbocoop;

namespace {

ReplicationResult small_run() {
  auto cfg = load_preset("single-change-demo");
  auto c = cfg.run_config(PolicyKind::RBOCoopUCB);
  c.replications = 2;
  return replicate(c, 2);
}

}  // namespace

TEST_CASE("trace csv parses back exactly") {
  const auto res = small_run();
  std::ostringstream out;
  write_trace_csv(out, res.traces);
  std::istringstream in(out.str());
  const auto rows = read_trace_csv(in);
  const auto& tr = res.traces[1];
  const std::size_t cells = static_cast<std::size_t>(tr.horizon * tr.agents);
  REQUIRE(rows.size() == 2 * cells);
  for (std::size_t i = 0; i < cells; ++i) {
    const auto& r = rows[cells + i];
    const std::size_t ts = i / 3;
    CHECK(r.replication == 2);
    CHECK(r.t == static_cast<std::int64_t>(ts + 1));
    CHECK(r.agent == static_cast<int>(i % 3) + 1);
    CHECK(r.arm == tr.actions[i] + 1);
    CHECK(r.reward == tr.rewards[i]);
    CHECK(r.chosen_mean == tr.chosen_means[i]);
    CHECK(r.oracle_mean == tr.oracle_means[ts]);
    CHECK(r.cum_group_regret == tr.cum_regret[ts]);
  }
  const auto fin = final_regrets(rows);
  CHECK(fin.at(1) == res.traces[0].final_regret());
  CHECK(fin.at(2) == res.traces[1].final_regret());
}

TEST_CASE("events csv") {
  const auto res = small_run();
  std::ostringstream out;
  write_events_csv(out, res.traces);
  std::istringstream in(out.str());
  const auto rows = read_events_csv(in);
  std::size_t det = 0, rst = 0;
  for (const auto& r : res.traces) {
    det += r.detections.size();
    rst += r.restarts.size();
  }
  std::size_t got_det = 0, got_rst = 0;
  for (const auto& r : rows) {
    if (r.kind == "detection") {
      ++got_det;
      CHECK(r.arm >= 1);
      CHECK(r.obs_index >= 1);
    } else {
      ++got_rst;
      CHECK(r.arm == 0);
    }
  }
  CHECK(got_det == det);
  CHECK(got_rst == rst);
  CHECK(rst > 0);
  CHECK(out.str().find(",restart,,\n") != std::string::npos);
}

TEST_CASE("regret csv") {
  const auto res = small_run();
  std::ostringstream out;
  write_regret_csv(out, res);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,mean,std");
  std::size_t n = 0;
  while (std::getline(in, line)) ++n;
  CHECK(n == res.mean_regret.size());
}

TEST_CASE("malformed csv reports the line") {
  std::istringstream bad("replication,t,agent,arm,reward,oracle_mean,chosen_mean,cum_group_regret\n1,1,1,1,0,0.5,0.5,0\n1,2,x,1,0,0.5,0.5,0\n");
  try {
    read_trace_csv(bad);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  std::istringstream short_row("replication,t,agent,kind,arm,obs_index\n1,2,3\n");
  CHECK_THROWS_AS(read_events_csv(short_row), ParseError);
  std::istringstream empty("");
  CHECK_THROWS_AS(read_trace_csv(empty), ParseError);
  std::istringstream header("a,b\n");
  CHECK_THROWS_AS(read_trace_csv(header), ParseError);
}

TEST_CASE("summary json") {
  const auto res = small_run();
  const auto j = summary_json({res}, nlohmann::json{{"seed", 1}});
  CHECK(j["schema_version"] == kTraceSchemaVersion);
  const auto& p = j["policies"]["rbo-coop-ucb"];
  CHECK(p["replications"] == 2);
  CHECK(p["final_regrets"].size() == 2);
  CHECK(p["final_regret_mean"].get<double>() == res.final_mean);
  CHECK(p["restart_metrics"]["correct"] == res.restarts.correct);
  CHECK(j["config"]["seed"] == 1);
}

TEST_CASE("fnv1a64") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}
