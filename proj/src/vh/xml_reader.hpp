#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace uiminer::vh::detail {

// Minimal non-validating XML element tree. Text content, comments,
// processing instructions and DOCTYPE are skipped.
struct XmlElement {
    std::string name;
    std::vector<std::pair<std::string, std::string>> attributes;
    std::vector<XmlElement> children;

    const std::string* attribute(std::string_view key) const;
};

// Throws Error(MalformedXml) with the byte offset of the failure.
XmlElement parse_xml(std::string_view text);

std::string escape_attribute(std::string_view value);

}  // namespace uiminer::vh::detail
