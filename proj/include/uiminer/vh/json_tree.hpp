#pragma once

#include "uiminer/vh/view_tree.hpp"

#include "json.hpp"

namespace uiminer::vh {

// Compact JSON form of a node used by SimApp fixtures:
//   {"class": "android.widget.Button", "id": "agree", "text": "Agree",
//    "desc": "", "bounds": [l, t, r, b], "clickable": true,
//    "long_clickable": false, "scrollable": false, "enabled": true,
//    "children": [...]}
// Unlike dumps, "enabled" defaults to true here; fixtures are hand-written.
ViewNode node_from_json(const nlohmann::json& j);
nlohmann::json node_to_json(const ViewNode& node);

ViewTree tree_from_json(const nlohmann::json& j, int screen_w, int screen_h);

}  // namespace uiminer::vh
