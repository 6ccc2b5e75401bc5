#pragma once

#include <map>
#include <string>
#include <string_view>

namespace uiminer::noise {

// Maps widget simple names ("Button") to the integer used in structural
// hashing. Button=0, TextView=1 and RatingBar=2 are fixed; the remaining
// stock Android widgets are numbered from 3 in lexicographic order. Names the
// table does not know map to unknown_index().
class TypeIndexTable {
public:
    static constexpr int kDefaultUnknown = 999;

    static const TypeIndexTable& standard();

    // Loads {"types": {"Button": 0, ...}, "unknown": 999} and validates
    // injectivity plus the three fixed entries.
    static TypeIndexTable from_file(const std::string& path);
    static TypeIndexTable from_map(std::map<std::string, int> entries, int unknown_index = kDefaultUnknown);

    // Accepts either a simple name or a fully qualified class name.
    int index_of(std::string_view widget_class) const;
    int unknown_index() const { return unknown_; }
    const std::map<std::string, int, std::less<>>& entries() const { return entries_; }

private:
    std::map<std::string, int, std::less<>> entries_;
    int unknown_ = kDefaultUnknown;
};

}  // namespace uiminer::noise
