#include <random>

#include "doctest.h"
#include "util.hpp"
#include "vergm/error.hpp"
#include "vergm/network.hpp"

using namespace vergm;

TEST_SUITE("netcore") {
  TEST_CASE("karate edge list has 78 edges on 34 nodes") {
    const Network net = testutil::karate();
    CHECK(net.size() == 34);
    CHECK(net.edge_count() == 78);
    CHECK(net.dyad_count() == 561);
  }

  TEST_CASE("empty file and duplicate edges") {
    const auto dir = testutil::scratch("netcore-load");
    const Network empty = load_network(testutil::write_file(dir / "empty.txt", ""), 5);
    CHECK(empty.edge_count() == 0);
    const Network dup = load_network(testutil::write_file(dir / "dup.txt", "1 2\n2 1\n# comment\n\n"), 3);
    CHECK(dup.edge_count() == 1);
    CHECK(dup.has_edge(0, 1));
    CHECK(dup.has_edge(1, 0));
  }

  TEST_CASE("malformed input reports the line") {
    const auto dir = testutil::scratch("netcore-bad");
    try {
      load_network(testutil::write_file(dir / "bad.txt", "1 2\n1 x\n"), 3);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(load_network(testutil::write_file(dir / "range.txt", "1 4\n"), 3), ParseError);
    CHECK_THROWS_AS(load_network(testutil::write_file(dir / "three.txt", "1 2 3\n"), 3), ParseError);
    CHECK_THROWS_AS(load_network(dir / "missing.txt", 3), IoError);
  }

  TEST_CASE("edge counts of small graphs") {
    Network k4(4);
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) k4.set_edge(i, j, true);
    CHECK(k4.edge_count() == 6);
    Network one(2);
    one.toggle(0, 1);
    CHECK(one.edge_count() == 1);
  }

  TEST_CASE("toggle is a symmetric involution") {
    Network net(3);
    net.toggle(0, 1);
    CHECK(net.edge_count() == 1);
    Network other(3);
    other.toggle(1, 0);
    CHECK(net == other);
    net.toggle(0, 1);
    CHECK(net == Network(3));
    CHECK_THROWS_AS(net.toggle(1, 1), InvalidDyad);
    CHECK_THROWS_AS(net.toggle(0, 3), InvalidDyad);
  }

  TEST_CASE("random toggles keep adjacency symmetric and counts consistent") {
    std::mt19937 gen(7);
    for (int n : {2, 5, 63, 64, 65, 130}) {
      Network net(n);
      std::uniform_int_distribution<int> pick(0, n - 1);
      for (int t = 0; t < 2000; ++t) {
        int i = pick(gen), j = pick(gen);
        if (i == j) continue;
        net.toggle(i, j);
      }
      long edges = 0;
      for (int i = 0; i < n; ++i) {
        CHECK_FALSE(net.has_edge(i, i));
        int deg = 0;
        for (int j = 0; j < n; ++j) {
          CHECK(net.has_edge(i, j) == net.has_edge(j, i));
          deg += net.has_edge(i, j);
        }
        CHECK(deg == net.degree(i));
        edges += deg;
      }
      CHECK(edges / 2 == net.edge_count());
      for (int i = 0; i < std::min(n, 10); ++i)
        for (int j = i + 1; j < std::min(n, 10); ++j) {
          int c = 0;
          for (int k = 0; k < n; ++k) c += net.has_edge(i, k) && net.has_edge(j, k);
          CHECK(c == net.common_neighbors(i, j));
        }
    }
  }

  TEST_CASE("save and load round trip") {
    const auto dir = testutil::scratch("netcore-roundtrip");
    const Network net = testutil::random_graph(40, 0.1, 3);
    save_edge_list(net, dir / "g.txt");
    const Network back = load_network(dir / "g.txt", 40);
    CHECK(back == net);
    CHECK(back.hash() == net.hash());
    Network moved = net;
    moved.toggle(0, 1);
    CHECK(moved.hash() != net.hash());
  }

  TEST_CASE("dyad enumeration") {
    const auto d = dyads(5);
    CHECK(d.size() == 10);
    for (std::size_t k = 0; k < d.size(); ++k) {
      CHECK(d[k].i < d[k].j);
      CHECK(dyad_index(5, d[k].i, d[k].j) == static_cast<long>(k));
    }
  }

  TEST_CASE("attributes are coded by first appearance") {
    const auto dir = testutil::scratch("netcore-attr");
    testutil::write_file(dir / "a.txt", "smoker\nno\nsmoker\nno\n");
    const Network net = load_network(testutil::write_file(dir / "e.txt", "1 2\n"), 4, {{"smoke", dir / "a.txt"}});
    const Attribute& a = net.attribute("smoke");
    CHECK(a.codes == std::vector<int>{0, 1, 0, 1});
    CHECK(a.labels == std::vector<std::string>{"smoker", "no"});
    CHECK_THROWS_AS(net.attribute("drugs"), ConfigError);
    testutil::write_file(dir / "short.txt", "1\n2\n");
    CHECK_THROWS_AS(load_attribute(dir / "short.txt", 4), ParseError);
  }
}
