#pragma once

#include "uiminer/noise/type_index.hpp"
#include "uiminer/vh/view_tree.hpp"

#include <string>

namespace uiminer::noise {

// "<node_index>_<type_index>" for every node in pre-order, joined with ';'.
std::string structural_repr(const vh::ViewTree& tree, const TypeIndexTable& table = TypeIndexTable::standard());

// 32-char lowercase hex MD5 of structural_repr.
std::string structural_hash(const vh::ViewTree& tree, const TypeIndexTable& table = TypeIndexTable::standard());

}  // namespace uiminer::noise
