#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "hcoseg/slice_tree.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace hcoseg;

TEST_CASE("slice splits by position and preserves order") {
  auto [even, odd] = slice({0, 1, 2, 3, 4});
  CHECK(even == std::vector<int>{0, 2, 4});
  CHECK(odd == std::vector<int>{1, 3});

  auto [se, so] = slice({7});
  CHECK(se == std::vector<int>{7});
  CHECK(so.empty());

  // Second-level slice works on positions, not original-index parity.
  auto [ee, eo] = slice({0, 2, 4, 6});
  CHECK(ee == std::vector<int>{0, 4});
  CHECK(eo == std::vector<int>{2, 6});

  CHECK_THROWS_AS(slice({}), Error);
}

TEST_CASE("build_tree produces the forced leaf layout") {
  SliceTree t8 = build_tree(8, 2);
  CHECK(t8.depth == 2);
  REQUIRE(t8.leaves.size() == 4);
  CHECK(t8.leaves[0] == std::vector<int>{0, 4});
  CHECK(t8.leaves[1] == std::vector<int>{2, 6});
  CHECK(t8.leaves[2] == std::vector<int>{1, 5});
  CHECK(t8.leaves[3] == std::vector<int>{3, 7});
  CHECK(t8.residues == std::vector<int>{0, 2, 1, 3});

  SliceTree t5 = build_tree(5, 10);
  CHECK(t5.depth == 2);  // clamped to floor(log2 5)
  REQUIRE(t5.leaves.size() == 4);
  CHECK(t5.leaves[0] == std::vector<int>{0, 4});
  CHECK(t5.leaves[1] == std::vector<int>{2});
  CHECK(t5.leaves[2] == std::vector<int>{1});
  CHECK(t5.leaves[3] == std::vector<int>{3});

  CHECK_THROWS_AS(build_tree(0, 2), Error);
  CHECK_THROWS_AS(build_tree(8, -1), Error);
}

TEST_CASE("181-frame tree at depth 5 splits into 6/5-sized residues") {
  SliceTree tree = build_tree(181, 5);
  REQUIRE(tree.leaves.size() == 32);
  for (std::size_t k = 0; k < tree.leaves.size(); ++k) {
    int r = tree.residues[k];
    std::size_t expected = r <= 20 ? 6 : 5;
    CHECK(tree.leaves[k].size() == expected);
    for (int i : tree.leaves[k]) CHECK(i % 32 == r);
  }
  // Residues are a permutation of 0..31.
  std::vector<int> rs = tree.residues;
  std::sort(rs.begin(), rs.end());
  for (int r = 0; r < 32; ++r) CHECK(rs[r] == r);
}

TEST_CASE("sibling_pairs pairs consecutive leaves under one parent") {
  SliceTree t8 = build_tree(8, 2);
  auto pairs = sibling_pairs(t8);
  REQUIRE(pairs.size() == 2);
  CHECK(t8.leaves[pairs[0].first] == std::vector<int>{0, 4});
  CHECK(t8.leaves[pairs[0].second] == std::vector<int>{2, 6});
  CHECK(t8.leaves[pairs[1].first] == std::vector<int>{1, 5});
  CHECK(t8.leaves[pairs[1].second] == std::vector<int>{3, 7});

  SliceTree t4 = build_tree(4, 1);
  auto p4 = sibling_pairs(t4);
  REQUIRE(p4.size() == 1);
  CHECK(t4.leaves[p4[0].first] == std::vector<int>{0, 2});
  CHECK(t4.leaves[p4[0].second] == std::vector<int>{1, 3});

  CHECK(sibling_pairs(build_tree(181, 5)).size() == 16);
  CHECK_THROWS_AS(sibling_pairs(build_tree(1, 0)), Error);
}

TEST_CASE("coseg_call_count matches enumeration and the documented values") {
  CHECK(coseg_call_count(8, 2) == 8);
  CHECK(coseg_call_count(181, 5) == 510);

  // Strict decrease across depths for the 181-frame case.
  long long prev = coseg_call_count(181, 2);
  for (int d = 3; d <= 6; ++d) {
    long long cur = coseg_call_count(181, d);
    CHECK(cur < prev);
    prev = cur;
  }

  CHECK_THROWS_AS(coseg_call_count(8, 0), Error);
  CHECK_THROWS_AS(coseg_call_count(8, 4), Error);  // floor(log2 8) = 3
}

TEST_CASE("closed traversal equals materialized sibling products") {
  fixture::Lcg rng(23);
  for (int round = 0; round < 60; ++round) {
    int length = rng.next_int(2, 700);
    int depth = rng.next_int(1, max_depth(length));
    CHECK(coseg_call_count(length, depth) ==
          oracle::pair_count_by_enumeration(length, depth));
  }
}

TEST_CASE("leaves partition the index range with the residue property") {
  fixture::Lcg rng(31);
  for (int round = 0; round < 100; ++round) {
    int length = rng.next_int(1, 1000);
    int depth = rng.next_int(0, max_depth(length));
    SliceTree tree = build_tree(length, depth);
    REQUIRE(tree.leaves.size() == (1u << depth));

    std::vector<int> all;
    for (std::size_t k = 0; k < tree.leaves.size(); ++k) {
      const auto& leaf = tree.leaves[k];
      REQUIRE(!leaf.empty());
      CHECK(std::is_sorted(leaf.begin(), leaf.end()));
      for (int i : leaf) CHECK(i % (1 << depth) == tree.residues[k]);
      all.insert(all.end(), leaf.begin(), leaf.end());
    }
    std::sort(all.begin(), all.end());
    REQUIRE(static_cast<int>(all.size()) == length);
    for (int i = 0; i < length; ++i) CHECK(all[i] == i);
  }
}

TEST_CASE("merging any node's children by index restores the parent") {
  fixture::Lcg rng(41);
  for (int round = 0; round < 40; ++round) {
    int length = rng.next_int(2, 400);
    int depth = rng.next_int(1, max_depth(length));
    SliceTree tree = build_tree(length, depth);
    for (auto [a, b] : sibling_pairs(tree)) {
      std::vector<int> merged;
      std::merge(tree.leaves[a].begin(), tree.leaves[a].end(),
                 tree.leaves[b].begin(), tree.leaves[b].end(),
                 std::back_inserter(merged));
      // The parent at depth-1 holds exactly these indices, ascending.
      auto parents = oracle::enumerate_leaves(length, depth - 1);
      std::size_t parent_pos = a / 2;
      std::vector<int> parent = parents[parent_pos];
      std::sort(parent.begin(), parent.end());
      CHECK(merged == parent);
    }
  }
}

TEST_CASE("to_text lists one leaf per line with residues") {
  std::string text = to_text(build_tree(8, 2));
  CHECK(text == "residue 0: 0 4\nresidue 2: 2 6\nresidue 1: 1 5\n"
                "residue 3: 3 7\n");
}
