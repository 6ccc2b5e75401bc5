#include "uiminer/noise/structural_hash.hpp"

#include "uiminer/util/md5.hpp"

namespace uiminer::noise {

std::string structural_repr(const vh::ViewTree& tree, const TypeIndexTable& table) {
    std::string repr;
    int node_index = 0;
    vh::for_each_preorder(tree, [&](const vh::ViewNode& node, int) {
        if (node_index > 0) repr.push_back(';');
        repr += std::to_string(node_index++);
        repr.push_back('_');
        repr += std::to_string(table.index_of(node.widget_class));
    });
    return repr;
}

std::string structural_hash(const vh::ViewTree& tree, const TypeIndexTable& table) {
    return util::md5_hex(structural_repr(tree, table));
}

}  // namespace uiminer::noise
