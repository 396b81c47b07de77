#pragma once

// Minimal XML reader/writer for the storyboard dialects.
//
// The strict mode accepts well-formed XML only. The lenient mode additionally
// recovers from the defects found in hand-written storyboard files: bare '&'
// and '<' inside attribute values, unterminated comments, and stray
// characters between attributes. Every recovery is reported.

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sgforge {

struct XmlElement {
    std::string name;
    std::vector<std::pair<std::string, std::string>> attributes;
    std::vector<XmlElement> children;
    std::string text;
    /// 1-based source line; not part of equality.
    std::size_t line = 0;

    const std::string* attribute(std::string_view key) const;
    friend bool operator==(const XmlElement& a, const XmlElement& b);
};

struct XmlRecovery {
    std::size_t line;
    std::string what;
};

struct XmlDocument {
    XmlElement root;
    std::vector<XmlRecovery> recoveries;
};

struct XmlReadOptions {
    bool lenient = false;
};

/// Throws ParseError on malformed input; never crashes on arbitrary bytes.
XmlDocument parse_xml(std::string_view bytes, XmlReadOptions options = {});

/// Deterministic rendering: XML declaration, two-space indentation, LF line
/// endings, attributes in stored order.
std::string write_xml(const XmlElement& root);

std::string escape_xml_attribute(std::string_view text);
std::string escape_xml_text(std::string_view text);

}  // namespace sgforge
