#include "uiminer/noise/type_index.hpp"

#include "uiminer/error.hpp"
#include "uiminer/vh/view_tree.hpp"

#include "json.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <set>
#include <vector>

namespace uiminer::noise {

namespace {

// Stock android.widget / android.view / android.webkit class names.
constexpr std::array kStockWidgets = {
    "AbsListView", "AbsSeekBar", "AbsSpinner", "AbsoluteLayout", "ActionMenuView", "AdapterView",
    "AdapterViewAnimator", "AdapterViewFlipper", "AnalogClock", "AutoCompleteTextView", "CalendarView",
    "CheckBox", "CheckedTextView", "Chronometer", "CompoundButton", "DatePicker", "DialerFilter",
    "DigitalClock", "EditText", "ExpandableListView", "FrameLayout", "Gallery", "GridLayout", "GridView",
    "HorizontalScrollView", "ImageButton", "ImageSwitcher", "ImageView", "LinearLayout", "ListView",
    "MediaController", "MultiAutoCompleteTextView", "NumberPicker", "ProgressBar", "QuickContactBadge",
    "RadioButton", "RadioGroup", "RelativeLayout", "ScrollView", "SearchView", "SeekBar", "SlidingDrawer",
    "Space", "Spinner", "StackView", "Switch", "TabHost", "TabWidget", "TableLayout", "TableRow",
    "TextClock", "TextSwitcher", "TimePicker", "ToggleButton", "Toolbar", "TwoLineListItem", "VideoView",
    "View", "ViewAnimator", "ViewFlipper", "ViewGroup", "ViewStub", "ViewSwitcher", "WebView", "ZoomButton",
    "ZoomControls",
};

TypeIndexTable build_standard() {
    std::vector<std::string> names(kStockWidgets.begin(), kStockWidgets.end());
    std::sort(names.begin(), names.end());
    std::map<std::string, int> entries = {{"Button", 0}, {"TextView", 1}, {"RatingBar", 2}};
    int next = 3;
    for (const auto& name : names) entries.emplace(name, next++);
    return TypeIndexTable::from_map(std::move(entries));
}

}  // namespace

const TypeIndexTable& TypeIndexTable::standard() {
    static const TypeIndexTable table = build_standard();
    return table;
}

TypeIndexTable TypeIndexTable::from_map(std::map<std::string, int> entries, int unknown_index) {
    const std::array<std::pair<const char*, int>, 3> fixed = {{{"Button", 0}, {"TextView", 1}, {"RatingBar", 2}}};
    for (const auto& [name, index] : fixed) {
        const auto it = entries.find(name);
        if (it == entries.end() || it->second != index) {
            throw Error(ErrorKind::InvalidArgument,
                        std::string("type index table must map ") + name + " to " + std::to_string(index));
        }
    }
    std::set<int> seen;
    for (const auto& [name, index] : entries) {
        if (index < 0) throw Error(ErrorKind::InvalidArgument, "negative type index for " + name);
        if (!seen.insert(index).second) {
            throw Error(ErrorKind::InvalidArgument, "type index " + std::to_string(index) + " assigned twice");
        }
    }
    if (seen.count(unknown_index)) {
        throw Error(ErrorKind::InvalidArgument, "unknown index collides with a named type");
    }
    TypeIndexTable table;
    table.entries_.insert(entries.begin(), entries.end());
    table.unknown_ = unknown_index;
    return table;
}

TypeIndexTable TypeIndexTable::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::NotFound, "type index file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidArgument, "type index file " + path + ": " + e.what());
    }
    std::map<std::string, int> entries;
    for (const auto& [name, index] : j.at("types").items()) entries.emplace(name, index.get<int>());
    return from_map(std::move(entries), j.value("unknown", kDefaultUnknown));
}

int TypeIndexTable::index_of(std::string_view widget_class) const {
    const auto it = entries_.find(vh::simple_name(widget_class));
    return it == entries_.end() ? unknown_ : it->second;
}

}  // namespace uiminer::noise
