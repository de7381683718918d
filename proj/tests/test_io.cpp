#include <doctest.h>

#include <sstream>

#include "netcoh/errors.hpp"
#include "netcoh/io.hpp"

using namespace netcoh;

TEST_CASE("edge list parsing") {
  std::istringstream in(
      "# toy network\n"
      "0\t1\t2.5\n"
      "1,2\n"
      "\n"
      "  2 3 0.5  \n"
      "3,0,1e-1\r\n");
  const std::vector<Edge> rows = read_edge_rows(in);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].w == 2.5);
  CHECK(rows[1].w == 1.0);
  CHECK(rows[2].u == 2);
  CHECK(rows[2].w == 0.5);
  CHECK(rows[3].w == doctest::Approx(0.1));

  for (const char* bad : {"0\n", "0 1 2 3\n", "a b\n", "-1 2\n", "0 1 heavy\n", "1.5 2\n"}) {
    std::istringstream s(bad);
    CHECK_THROWS_AS(read_edge_rows(s), InvalidInput);
  }
  std::istringstream where("0 1\n# c\n0 x\n");
  try {
    read_edge_rows(where);
    FAIL("no exception");
  } catch (const InvalidInput& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("edge list output reads back") {
  const std::vector<Edge> edges = {{0, 1, 0.1}, {1, 3, 1.0 / 3.0}};
  const Graph g = from_edge_list(edges, 4);
  std::ostringstream out;
  write_edge_list(out, g);
  std::istringstream in(out.str());
  const auto rows = read_edge_rows(in);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].w == 1.0 / 3.0);
}

TEST_CASE("csv tables") {
  std::istringstream in("id,x1,time,event\n0,1.5,2,1\n1,-2,3.25,0\n\n");
  const Table t = read_csv(in);
  CHECK(t.rows() == 2);
  CHECK(t.column("time") == 2);
  CHECK(t.has("x1"));
  CHECK_FALSE(t.has("y"));
  CHECK_THROWS_AS(t.column("y"), InvalidInput);
  const Table x = t.without({"id", "time", "event"});
  REQUIRE(x.columns.size() == 1);
  CHECK(x.values(1, 0) == -2.0);

  const SurvivalData s = survival_from(t);
  CHECK(s.time[1] == 3.25);
  CHECK(s.event[1] == 0);

  std::ostringstream out;
  write_csv(out, x);
  CHECK(out.str() == "x1\n1.5\n-2\n");

  for (const char* bad : {"", "a,b\n1\n", "a,b\n1,zz\n", "a,,b\n1,2,3\n"}) {
    std::istringstream s2(bad);
    CHECK_THROWS_AS(read_csv(s2), InvalidInput);
  }
  std::istringstream badevent("time,event\n1,2\n");
  CHECK_THROWS_AS(survival_from(read_csv(badevent)), InvalidInput);
}

TEST_CASE("model documents") {
  FitCore fit;
  fit.family = Family::logistic;
  fit.lambda = 0.25;
  fit.gamma = 0.01;
  fit.alpha_hat = Eigen::Vector3d(0.1, -0.2, 0.3);
  fit.beta_hat = Eigen::Vector2d(1.0, -4.0);
  fit.standardization.center = Eigen::Vector2d(5.0, 0.0);
  fit.standardization.scale = Eigen::Vector2d(2.0, 4.0);
  const nlohmann::json doc = model_to_json(fit, {"age", "score"});
  CHECK(doc["family"] == "logistic");
  CHECK(doc["beta_original_scale"][1].get<double>() == -1.0);

  std::vector<std::string> names;
  const FitCore back = model_from_json(nlohmann::json::parse(doc.dump()), &names);
  CHECK(names == std::vector<std::string>{"age", "score"});
  CHECK(back.family == Family::logistic);
  CHECK(back.alpha_hat == fit.alpha_hat);
  CHECK(back.standardization.scale == fit.standardization.scale);

  CHECK_THROWS_AS(model_to_json(fit, {"age"}), InvalidInput);
  nlohmann::json broken = doc;
  broken.erase("alpha");
  CHECK_THROWS_AS(model_from_json(broken), InvalidInput);
  broken = doc;
  broken["family"] = "poisson";
  CHECK_THROWS_AS(model_from_json(broken), InvalidInput);
  broken = doc;
  broken["scale"] = {1.0};
  CHECK_THROWS_AS(model_from_json(broken), InvalidInput);
}
