#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "coadapt/environment.hpp"

using namespace coadapt;
namespace fs = std::filesystem;

namespace {
Topology two_nodes() {
  Topology t;
  t.nodes = {{.id = 0, .capacity = 10.0, .sector = ""}, {.id = 1, .capacity = 10.0, .sector = ""}};
  t.assignment = {0, 1, 1};
  return t;
}
}  // namespace

TEST_CASE("loads accumulate by node") {
  const Topology t = two_nodes();
  const LoadState s = compute_loads(t, {1.0, 2.0, 3.0});
  CHECK(s.node_load == std::vector<double>{1.0, 5.0});
  CHECK(s.aggregate == 6.0);
  CHECK_THROWS_AS(compute_loads(t, {1.0}), DimensionMismatch);
}

TEST_CASE("congestion is zero at the threshold and linear above") {
  LoadState s;
  s.node_load = {9.0, 12.0};
  const std::vector<double> caps = {10.0, 10.0};
  const auto c = congestion_signal(s, caps, 0.9, 2.0);
  CHECK(c[0] == 0.0);  // 9/10 == tau exactly
  CHECK(c[1] == Catch::Approx(2.0 * (1.2 - 0.9)).epsilon(1e-14));
  const auto c2 = congestion_signal(s, caps, 1.3, 2.0);
  CHECK(c2[1] == 0.0);
  CHECK_THROWS_AS(congestion_signal(s, {10.0}, 1.0, 1.0), DimensionMismatch);
  CHECK_THROWS_AS(congestion_signal(s, {10.0, 0.0}, 1.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(congestion_signal(s, caps, 1.0, -1.0), InvalidArgument);
}

TEST_CASE("overload is severity for one node, fraction for many") {
  LoadState one;
  one.node_load = {12.0};
  CHECK(overload_metric(one, std::vector<double>{10.0}) == Catch::Approx(0.2).epsilon(1e-14));
  one.node_load = {10.0};
  CHECK(overload_metric(one, std::vector<double>{10.0}) == 0.0);

  LoadState many;
  many.node_load = {11.0, 9.0, 12.0};
  CHECK(overload_metric(many, std::vector<double>{10.0, 10.0, 10.0}) ==
        Catch::Approx(2.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("single-node assignment consumes no randomness") {
  Rng a(4), b(4);
  const auto z = assign_agents_random(5, 1, a);
  CHECK(z == std::vector<int>(5, 0));
  CHECK(a.next_u64() == b.next_u64());

  Rng c(4);
  const auto m = assign_agents_random(1000, 3, c);
  for (int v : m) REQUIRE((v >= 0 && v < 3));
  Rng d(4);
  CHECK(m == assign_agents_random(1000, 3, d));
}

TEST_CASE("topology validation catches broken shapes") {
  Topology t = two_nodes();
  CHECK_NOTHROW(validate_topology(t));
  t.assignment[0] = 7;
  CHECK_THROWS_AS(validate_topology(t), OutOfBounds);
  t = two_nodes();
  t.nodes[1].capacity = 0.0;
  CHECK_THROWS_AS(validate_topology(t), InvalidArgument);
  t = two_nodes();
  t.edges.push_back({0, 5});
  CHECK_THROWS_AS(validate_topology(t), OutOfBounds);
}

TEST_CASE("topology and edge files load by node id") {
  const fs::path tp = fs::temp_directory_path() / "coadapt_topo.csv";
  const fs::path ep = fs::temp_directory_path() / "coadapt_edges.csv";
  {
    std::ofstream out(tp, std::ios::binary);
    out << "node_id,capacity,sector\n100,5.5,res\n200,7.5,ind\n";
  }
  {
    std::ofstream out(ep, std::ios::binary);
    out << "from,to\n100,200\n";
  }
  const auto nodes = load_topology_csv(tp);
  REQUIRE(nodes.size() == 2);
  CHECK(nodes[0].id == 100);
  CHECK(nodes[1].capacity == 7.5);
  CHECK(nodes[0].sector == "res");
  const auto edges = load_edges_csv(ep, nodes);
  REQUIRE(edges.size() == 1);
  CHECK(edges[0] == std::pair<int, int>(0, 1));
  {
    std::ofstream out(ep, std::ios::binary);
    out << "from,to\n100,999\n";
  }
  CHECK_THROWS_AS(load_edges_csv(ep, nodes), DataError);
  fs::remove(tp);
  fs::remove(ep);
}
