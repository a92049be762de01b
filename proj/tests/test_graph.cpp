#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "netdiff/dataset_io.hpp"
#include "netdiff/errors.hpp"
#include "netdiff/graph.hpp"
#include "test_util.hpp"

using namespace netdiff;

namespace {

Adjacency from_edges(int v, std::initializer_list<std::pair<int, int>> edges) {
  Adjacency a = Adjacency::Zero(v, v);
  for (auto [i, j] : edges) a(i - 1, j - 1) = a(j - 1, i - 1) = 1;
  return a;
}

// All-pairs distances by Floyd-Warshall, -1 when unreachable.
Eigen::MatrixXi distances(const Adjacency& a) {
  const int v = static_cast<int>(a.rows());
  const int inf = 1 << 20;
  Eigen::MatrixXi d = Eigen::MatrixXi::Constant(v, v, inf);
  for (int i = 0; i < v; ++i) {
    d(i, i) = 0;
    for (int j = 0; j < v; ++j) {
      if (a(i, j)) d(i, j) = 1;
    }
  }
  for (int k = 0; k < v; ++k)
    for (int i = 0; i < v; ++i)
      for (int j = 0; j < v; ++j) d(i, j) = std::min(d(i, j), d(i, k) + d(k, j));
  return d.unaryExpr([inf](int x) { return x >= inf ? -1 : x; });
}

double oracle_path_length(const Adjacency& a) {
  const auto d = distances(a);
  const int v = static_cast<int>(a.rows());
  int longest = 0;
  for (int i = 0; i < v; ++i)
    for (int j = 0; j < v; ++j) longest = std::max(longest, d(i, j));
  double sum = 0.0;
  for (int i = 0; i < v; ++i)
    for (int j = 0; j < v; ++j) {
      if (i != j) sum += d(i, j) < 0 ? longest : d(i, j);
    }
  return sum / (v * (v - 1.0));  // ordered pairs
}

double oracle_transitivity(const Adjacency& a) {
  const int v = static_cast<int>(a.rows());
  double closed = 0, connected = 0;
  for (int c = 0; c < v; ++c)
    for (int i = 0; i < v; ++i)
      for (int j = 0; j < v; ++j) {
        if (i == j || i == c || j == c || !a(c, i) || !a(c, j)) continue;
        connected += 1;
        closed += a(i, j);
      }
  return connected > 0 ? closed / connected : 0.0;
}

}  // namespace

TEST_CASE("edge index follows column-major lower-triangular order") {
  EdgeIndex idx(4);
  REQUIRE(idx.size() == 6);
  const std::vector<std::pair<int, int>> expected{{1, 0}, {2, 0}, {3, 0}, {2, 1}, {3, 1}, {3, 2}};
  for (std::size_t l = 0; l < 6; ++l) {
    CHECK(idx.pair(l).row == expected[l].first);
    CHECK(idx.pair(l).col == expected[l].second);
    CHECK(idx.index(expected[l].first, expected[l].second) == l);
    CHECK(idx.index(expected[l].second, expected[l].first) == l);
  }
  for (int node = 0; node < 4; ++node) {
    for (const auto& inc : idx.incident(node)) {
      const auto p = idx.pair(inc.edge);
      CHECK(((p.row == node && p.col == inc.other) || (p.col == node && p.row == inc.other)));
    }
  }
  CHECK(nodes_for_length(190) == 20);
  CHECK(nodes_for_length(7) == -1);
}

TEST_CASE("vectorize small graphs") {
  const auto e = vectorize(from_edges(3, {{1, 2}, {2, 3}}));
  CHECK(std::vector<std::uint8_t>(e.bits().begin(), e.bits().end()) == std::vector<std::uint8_t>{1, 0, 1});
  CHECK(vectorize(Adjacency::Zero(5, 5)).edge_total() == 0);
  Adjacency k4 = Adjacency::Ones(4, 4);
  k4.diagonal().setZero();
  CHECK(vectorize(k4).edge_total() == 6);
}

TEST_CASE("devectorize inverts vectorize") {
  const std::vector<std::uint8_t> bits{1, 0, 1};
  CHECK(devectorize(std::span<const std::uint8_t>(bits)) == from_edges(3, {{1, 2}, {2, 3}}));
  CHECK(devectorize(EdgeVector::empty(5)) == Adjacency::Zero(5, 5));
  Rng rng = make_rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int v = 2 + trial % 11;
    const auto e = testutil::random_edges(v, 0.4, rng);
    const auto a = devectorize(e);
    CHECK(a == a.transpose());
    CHECK(a.diagonal().sum() == 0);
    CHECK(vectorize(a) == e);
  }
}

TEST_CASE("malformed inputs are format errors") {
  Adjacency asym = Adjacency::Zero(3, 3);
  asym(1, 0) = 1;
  CHECK_THROWS_AS(vectorize(asym), FormatError);
  Adjacency two = from_edges(3, {{1, 2}});
  two(0, 1) = two(1, 0) = 2;
  CHECK_THROWS_AS(vectorize(two), FormatError);
  Adjacency loop = Adjacency::Zero(3, 3);
  loop(0, 0) = 1;
  CHECK_THROWS_AS(vectorize(loop), FormatError);
  const std::vector<std::uint8_t> four(4, 0);
  CHECK_THROWS_AS(devectorize(std::span<const std::uint8_t>(four)), FormatError);
  CHECK_THROWS_AS(EdgeVector(3, {1, 0}), FormatError);
  CHECK_THROWS_AS(EdgeVector(3, {1, 0, 2}), FormatError);
}

TEST_CASE("summary statistics on hand-checkable graphs") {
  const auto tri = summary_stats(vectorize(from_edges(3, {{1, 2}, {2, 3}, {1, 3}})));
  CHECK(tri.density == 1.0);
  CHECK(tri.transitivity == 1.0);
  CHECK(tri.avg_path_length == 1.0);

  const auto path = summary_stats(vectorize(from_edges(3, {{1, 2}, {2, 3}})));
  CHECK(path.transitivity == 0.0);
  CHECK(path.avg_path_length == doctest::Approx(4.0 / 3.0).epsilon(1e-15));

  const auto disjoint = summary_stats(vectorize(from_edges(4, {{1, 2}, {3, 4}})));
  CHECK(disjoint.avg_path_length == 1.0);

  const auto empty = summary_stats(EdgeVector::empty(5), std::vector<int>{0, 0, 1, 1, 1});
  CHECK(empty.density == 0.0);
  CHECK(empty.transitivity == 0.0);
  CHECK(empty.avg_path_length == 0.0);
  CHECK_FALSE(empty.assortativity.has_value());
}

TEST_CASE("summary statistics match brute-force oracles on random graphs") {
  Rng rng = make_rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const int v = 3 + trial % 10;
    const auto e = testutil::random_edges(v, 0.1 + 0.08 * (trial % 8), rng);
    const auto a = devectorize(e);
    const auto s = summary_stats(e);
    CHECK(s.transitivity == doctest::Approx(oracle_transitivity(a)).epsilon(1e-12));
    CHECK(s.avg_path_length == doctest::Approx(oracle_path_length(a)).epsilon(1e-12));
    const double scaled = s.density * static_cast<double>(e.size());
    CHECK(scaled == doctest::Approx(std::round(scaled)).epsilon(1e-12));
  }
}

TEST_CASE("block assortativity extremes and the between-block count") {
  const std::vector<int> blocks{0, 0, 1, 1};
  const auto within = vectorize(from_edges(4, {{1, 2}, {3, 4}}));
  CHECK(*summary_stats(within, blocks).assortativity == doctest::Approx(1.0));
  const auto across = vectorize(from_edges(4, {{1, 3}, {2, 4}}));
  CHECK(*summary_stats(across, blocks).assortativity == doctest::Approx(-1.0));
  CHECK(between_block_edges(across, blocks) == 2);
  CHECK(between_block_edges(within, blocks) == 0);
}

TEST_CASE("summary statistics are invariant under block-preserving relabelling") {
  Rng rng = make_rng(9);
  const std::vector<int> blocks{0, 0, 0, 0, 1, 1, 1, 1};
  for (int trial = 0; trial < 30; ++trial) {
    const auto e = testutil::random_edges(8, 0.35, rng);
    std::vector<int> perm{0, 1, 2, 3, 4, 5, 6, 7};
    std::shuffle(perm.begin(), perm.begin() + 4, rng);
    std::shuffle(perm.begin() + 4, perm.end(), rng);
    const auto a = devectorize(e);
    Adjacency b(8, 8);
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) b(perm[i], perm[j]) = a(i, j);
    const auto s1 = summary_stats(e, blocks);
    const auto s2 = summary_stats(vectorize(b), blocks);
    CHECK(s1.density == doctest::Approx(s2.density));
    CHECK(s1.transitivity == doctest::Approx(s2.transitivity));
    CHECK(s1.avg_path_length == doctest::Approx(s2.avg_path_length));
    REQUIRE(s1.assortativity.has_value() == s2.assortativity.has_value());
    if (s1.assortativity) CHECK(*s1.assortativity == doctest::Approx(*s2.assortativity));
  }
}

TEST_CASE("connected graphs use the plain mean shortest path") {
  // cycle on 6 nodes: distances 1,1,2,2,3 from each node
  const auto e = vectorize(from_edges(6, {{1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {6, 1}}));
  CHECK(summary_stats(e).avg_path_length == doctest::Approx(9.0 / 5.0));
}

TEST_CASE("dataset loading") {
  testutil::TempDir dir;
  testutil::write_text(dir / "net.csv", "1,0,1\n0,1,1\n");
  testutil::write_text(dir / "groups.csv", "1\n2\n");
  const auto data = load_dataset(dir / "net.csv", dir / "groups.csv");
  CHECK(data.size() == 2);
  CHECK(data.v == 3);
  CHECK(data.groups == std::vector<int>{1, 2});

  SUBCASE("header rows are skipped") {
    testutil::write_text(dir / "h.csv", "a,b,c\n1,0,1\n0,1,1\n");
    testutil::write_text(dir / "hg.csv", "group\n1\n2\n");
    CHECK(load_dataset(dir / "h.csv", dir / "hg.csv").networks == data.networks);
  }
  SUBCASE("label outside {1,2} names the row") {
    testutil::write_text(dir / "bad.csv", "1\n3\n");
    try {
      load_dataset(dir / "net.csv", dir / "bad.csv");
      FAIL("expected a load error");
    } catch (const LoadError& e) {
      CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    }
  }
  SUBCASE("ragged and non-binary rows") {
    testutil::write_text(dir / "ragged.csv", "1,0,1\n0,1\n");
    CHECK_THROWS_AS(load_dataset(dir / "ragged.csv", dir / "groups.csv"), LoadError);
    testutil::write_text(dir / "nb.csv", "1,0,1\n0,2,1\n");
    CHECK_THROWS_AS(load_dataset(dir / "nb.csv", dir / "groups.csv"), LoadError);
    testutil::write_text(dir / "len.csv", "1,0,1,1\n0,1,1,1\n");
    CHECK_THROWS_AS(load_dataset(dir / "len.csv", dir / "groups.csv"), LoadError);
    testutil::write_text(dir / "short.csv", "1\n");
    CHECK_THROWS_AS(load_dataset(dir / "net.csv", dir / "short.csv"), LoadError);
  }
}

TEST_CASE("dataset save/load round trip and adjacency directories") {
  testutil::TempDir dir;
  Rng rng = make_rng(4);
  NetworkDataset data;
  data.v = 7;
  for (int i = 0; i < 12; ++i) {
    data.networks.push_back(testutil::random_edges(7, 0.3, rng));
    data.groups.push_back(1 + i % 2);
  }
  data.blocks = std::vector<int>{0, 0, 0, 1, 1, 1, 1};
  save_dataset(data, dir / "n.csv", dir / "g.csv", dir / "b.csv");
  const auto back = load_dataset(dir / "n.csv", dir / "g.csv", NetworkFormat::csv, dir / "b.csv");
  CHECK(back.networks == data.networks);
  CHECK(back.groups == data.groups);
  CHECK(back.blocks == data.blocks);

  std::filesystem::create_directories(dir / "adj");
  for (int i = 0; i < 12; ++i) {
    std::ofstream out(dir / "adj" / ("net_" + std::string(i < 10 ? "0" : "") + std::to_string(i) + ".txt"));
    out << devectorize(data.networks[i]) << '\n';
  }
  const auto adj = load_dataset(dir / "adj", dir / "g.csv", NetworkFormat::adjacency_dir);
  CHECK(adj.networks == data.networks);
  CHECK(parse_network_format("adjacency-dir") == NetworkFormat::adjacency_dir);
  CHECK_THROWS_AS(parse_network_format("xml"), ContractError);
}
