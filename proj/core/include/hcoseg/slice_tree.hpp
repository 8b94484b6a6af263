#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace hcoseg {

/// Binary hierarchy produced by repeated odd-even slicing of 0..L-1.
/// Leaves are listed depth-first, even child before odd child, so the two
/// children of any internal node sit at positions 2i and 2i+1. Leaf k holds
/// exactly the indices congruent to its residue modulo 2^depth.
struct SliceTree {
  int depth = 0;
  int length = 0;
  int min_duration = 1;  // 2^depth: the persistence assumption the tree encodes
  std::vector<std::vector<int>> leaves;
  std::vector<int> residues;  // residue of each leaf mod 2^depth
};

/// Splits a position-ordered index list into (positions 0,2,4,...) and
/// (positions 1,3,5,...). Errc::validation on empty input.
std::pair<std::vector<int>, std::vector<int>> slice(
    const std::vector<int>& indices);

/// Largest valid slicing depth for a sequence of the given length.
int max_depth(int length);

/// Builds the tree over 0..length-1 at depth min(requested, floor(log2 L)).
SliceTree build_tree(int length, int requested_depth);

/// Pairs of leaf positions that share a parent, in tree order.
/// Errc::validation when depth is 0.
std::vector<std::pair<std::size_t, std::size_t>> sibling_pairs(
    const SliceTree& tree);

/// Number of frame-pair co-segmentations implied by leaf-level sibling
/// pairing: sum of |A|*|B| over sibling leaf pairs. Computed by a closed
/// traversal over residue classes, without materializing index lists.
/// Errc::validation unless 1 <= depth <= max_depth(length).
long long coseg_call_count(int length, int depth);

/// One leaf per line: "residue <r>: i0 i1 ...".
std::string to_text(const SliceTree& tree);

}  // namespace hcoseg
