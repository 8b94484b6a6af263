#include "hcoseg/slice_tree.hpp"

#include <sstream>

#include "hcoseg/error.hpp"

namespace hcoseg {

namespace {

// Frames with index == residue (mod modulus) among 0..length-1.
long long class_size(long long length, long long residue, long long modulus) {
  if (residue >= length) return 0;
  return (length - 1 - residue) / modulus + 1;
}

void collect_leaves(std::vector<int> indices, int remaining,
                    std::vector<std::vector<int>>& leaves) {
  if (remaining == 0) {
    leaves.push_back(std::move(indices));
    return;
  }
  auto [even, odd] = slice(indices);
  collect_leaves(std::move(even), remaining - 1, leaves);
  collect_leaves(std::move(odd), remaining - 1, leaves);
}

// Sum of |even child| * |odd child| over the leaf-level sibling pairs of
// the subtree rooted at residue class (residue mod modulus), visited in
// even-first order. Sizes come from the closed-form class_size.
long long pair_products(long long length, long long residue,
                        long long modulus, int remaining) {
  if (remaining == 1)
    return class_size(length, residue, 2 * modulus) *
           class_size(length, residue + modulus, 2 * modulus);
  return pair_products(length, residue, 2 * modulus, remaining - 1) +
         pair_products(length, residue + modulus, 2 * modulus, remaining - 1);
}

}  // namespace

std::pair<std::vector<int>, std::vector<int>> slice(
    const std::vector<int>& indices) {
  if (indices.empty())
    raise(Errc::validation, "cannot slice an empty index list");
  std::vector<int> even, odd;
  even.reserve((indices.size() + 1) / 2);
  odd.reserve(indices.size() / 2);
  for (std::size_t p = 0; p < indices.size(); ++p)
    (p % 2 == 0 ? even : odd).push_back(indices[p]);
  return {std::move(even), std::move(odd)};
}

int max_depth(int length) {
  if (length < 1) raise(Errc::validation, "sequence length must be >= 1");
  int d = 0;
  while ((1LL << (d + 1)) <= length) ++d;
  return d;
}

SliceTree build_tree(int length, int requested_depth) {
  if (length < 1) raise(Errc::validation, "sequence length must be >= 1");
  if (requested_depth < 0)
    raise(Errc::validation, "requested depth must be >= 0");

  SliceTree tree;
  tree.length = length;
  tree.depth = std::min(requested_depth, max_depth(length));
  tree.min_duration = 1 << tree.depth;

  std::vector<int> root(length);
  for (int i = 0; i < length; ++i) root[i] = i;
  collect_leaves(std::move(root), tree.depth, tree.leaves);

  tree.residues.reserve(tree.leaves.size());
  for (const auto& leaf : tree.leaves)
    tree.residues.push_back(leaf.front() % tree.min_duration);
  return tree;
}

std::vector<std::pair<std::size_t, std::size_t>> sibling_pairs(
    const SliceTree& tree) {
  if (tree.depth < 1)
    raise(Errc::validation, "a depth-0 tree has no sibling leaf pairs");
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(tree.leaves.size() / 2);
  for (std::size_t i = 0; i + 1 < tree.leaves.size(); i += 2)
    pairs.emplace_back(i, i + 1);
  return pairs;
}

long long coseg_call_count(int length, int depth) {
  if (length < 1) raise(Errc::validation, "sequence length must be >= 1");
  if (depth < 1 || depth > max_depth(length))
    raise(Errc::validation,
          "depth " + std::to_string(depth) + " out of range [1, " +
              std::to_string(max_depth(length)) + "] for length " +
              std::to_string(length));
  return pair_products(length, 0, 1, depth);
}

std::string to_text(const SliceTree& tree) {
  std::ostringstream out;
  for (std::size_t k = 0; k < tree.leaves.size(); ++k) {
    out << "residue " << tree.residues[k] << ":";
    for (int i : tree.leaves[k]) out << ' ' << i;
    out << '\n';
  }
  return out.str();
}

}  // namespace hcoseg
