#include "sgforge/xml.hpp"

#include <algorithm>
#include <cstdint>

#include "sgforge/errors.hpp"

namespace sgforge {

const std::string* XmlElement::attribute(std::string_view key) const {
    for (const auto& [k, v] : attributes) {
        if (k == key) return &v;
    }
    return nullptr;
}

bool operator==(const XmlElement& a, const XmlElement& b) {
    return a.name == b.name && a.attributes == b.attributes && a.text == b.text && a.children == b.children;
}

namespace {

constexpr int kMaxDepth = 512;

// Returns the offset of the first invalid byte, or npos.
std::size_t find_invalid_utf8(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size()) {
        const auto c = static_cast<unsigned char>(s[i]);
        std::size_t len = 0;
        std::uint32_t cp = 0;
        if (c < 0x80) {
            ++i;
            continue;
        } else if ((c & 0xE0) == 0xC0) {
            len = 2;
            cp = c & 0x1F;
        } else if ((c & 0xF0) == 0xE0) {
            len = 3;
            cp = c & 0x0F;
        } else if ((c & 0xF8) == 0xF0) {
            len = 4;
            cp = c & 0x07;
        } else {
            return i;
        }
        if (i + len > s.size()) return i;
        for (std::size_t k = 1; k < len; ++k) {
            const auto cc = static_cast<unsigned char>(s[i + k]);
            if ((cc & 0xC0) != 0x80) return i;
            cp = (cp << 6) | (cc & 0x3F);
        }
        const bool overlong = (len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000);
        if (overlong || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return i;
        i += len;
    }
    return std::string_view::npos;
}

void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

bool is_name_start(char c) {
    const auto u = static_cast<unsigned char>(c);
    return (u >= 'a' && u <= 'z') || (u >= 'A' && u <= 'Z') || c == '_' || c == ':' || u >= 0x80;
}

bool is_name_char(char c) {
    const auto u = static_cast<unsigned char>(c);
    return is_name_start(c) || (u >= '0' && u <= '9') || c == '-' || c == '.';
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

void trim(std::string& s) {
    std::size_t b = 0;
    while (b < s.size() && is_space(s[b])) ++b;
    std::size_t e = s.size();
    while (e > b && is_space(s[e - 1])) --e;
    s = s.substr(b, e - b);
}

class XmlReader {
public:
    XmlReader(std::string_view input, XmlReadOptions options) : in_(input), options_(options) {
        for (std::size_t i = 0; i < in_.size(); ++i) {
            if (in_[i] == '\n') newlines_.push_back(i);
        }
    }

    XmlDocument read() {
        if (const auto bad = find_invalid_utf8(in_); bad != std::string_view::npos) {
            throw ParseError("", "invalid UTF-8 at byte " + std::to_string(bad));
        }
        if (in_.substr(0, 3) == "\xEF\xBB\xBF") pos_ = 3;
        skip_misc(true);
        if (at_end() || in_[pos_] != '<') fail("expected root element");
        XmlDocument doc;
        doc.root = read_element(0);
        skip_misc(false);
        if (!at_end()) fail("content after root element");
        doc.recoveries = std::move(recoveries_);
        return doc;
    }

private:
    bool at_end() const { return pos_ >= in_.size(); }
    bool starts_with(std::string_view s) const { return in_.substr(pos_, s.size()) == s; }

    std::size_t line_at(std::size_t offset) const {
        return static_cast<std::size_t>(std::lower_bound(newlines_.begin(), newlines_.end(), offset) -
                                        newlines_.begin()) +
               1;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError("", "line " + std::to_string(line_at(pos_)) + ": " + what);
    }

    void recover(std::size_t offset, std::string what) {
        if (!options_.lenient) {
            pos_ = offset;
            fail(what);
        }
        recoveries_.push_back({line_at(offset), std::move(what)});
    }

    void skip_space() {
        while (!at_end() && is_space(in_[pos_])) ++pos_;
    }

    // Whitespace, comments, processing instructions and (in the prolog) a DOCTYPE.
    void skip_misc(bool prolog) {
        while (true) {
            skip_space();
            if (starts_with("<!--")) {
                skip_comment();
            } else if (starts_with("<?")) {
                const auto end = in_.find("?>", pos_ + 2);
                if (end == std::string_view::npos) fail("unterminated processing instruction");
                pos_ = end + 2;
            } else if (prolog && starts_with("<!DOCTYPE")) {
                const auto bracket = in_.find('[', pos_);
                const auto close = in_.find('>', pos_);
                if (close == std::string_view::npos) fail("unterminated DOCTYPE");
                if (bracket != std::string_view::npos && bracket < close) {
                    const auto end = in_.find("]>", bracket);
                    if (end == std::string_view::npos) fail("unterminated DOCTYPE");
                    pos_ = end + 2;
                } else {
                    pos_ = close + 1;
                }
            } else {
                return;
            }
        }
    }

    void skip_comment() {
        const std::size_t start = pos_;
        const auto end = in_.find("-->", pos_ + 4);
        if (end != std::string_view::npos) {
            pos_ = end + 3;
            return;
        }
        // Recovery: the comment ends before the next line that opens with markup.
        for (std::size_t nl = in_.find('\n', start); nl != std::string_view::npos; nl = in_.find('\n', nl + 1)) {
            std::size_t k = nl + 1;
            while (k < in_.size() && (in_[k] == ' ' || in_[k] == '\t' || in_[k] == '\r')) ++k;
            if (k < in_.size() && in_[k] == '<') {
                recover(start, "unterminated comment closed at line " + std::to_string(line_at(k)));
                pos_ = k;
                return;
            }
        }
        pos_ = start;
        fail("unterminated comment");
    }

    std::string read_name() {
        const std::size_t start = pos_;
        if (at_end() || !is_name_start(in_[pos_])) fail("expected name");
        while (!at_end() && is_name_char(in_[pos_])) ++pos_;
        return std::string(in_.substr(start, pos_ - start));
    }

    // Decodes an entity reference at pos_ ('&'). Returns false if the text is
    // not a valid reference, leaving pos_ unchanged.
    bool read_reference(std::string& out) {
        const auto semi = in_.find(';', pos_);
        if (semi == std::string_view::npos || semi - pos_ > 12) return false;
        const std::string_view body = in_.substr(pos_ + 1, semi - pos_ - 1);
        if (body == "lt") out += '<';
        else if (body == "gt") out += '>';
        else if (body == "amp") out += '&';
        else if (body == "quot") out += '"';
        else if (body == "apos") out += '\'';
        else if (body.size() >= 2 && body[0] == '#') {
            const bool hex = body[1] == 'x';
            const std::string_view digits = body.substr(hex ? 2 : 1);
            if (digits.empty()) return false;
            std::uint32_t cp = 0;
            for (char c : digits) {
                int d;
                if (c >= '0' && c <= '9') d = c - '0';
                else if (hex && c >= 'a' && c <= 'f') d = c - 'a' + 10;
                else if (hex && c >= 'A' && c <= 'F') d = c - 'A' + 10;
                else return false;
                cp = cp * (hex ? 16 : 10) + static_cast<std::uint32_t>(d);
                if (cp > 0x10FFFF) return false;
            }
            if (cp == 0 || (cp >= 0xD800 && cp <= 0xDFFF)) return false;
            append_utf8(out, cp);
        } else {
            return false;
        }
        pos_ = semi + 1;
        return true;
    }

    std::string read_attribute_value() {
        if (at_end() || (in_[pos_] != '"' && in_[pos_] != '\'')) fail("expected quoted attribute value");
        const char quote = in_[pos_++];
        std::string value;
        while (true) {
            if (at_end()) fail("unterminated attribute value");
            const char c = in_[pos_];
            if (c == quote) {
                ++pos_;
                return value;
            }
            if (c == '&') {
                if (!read_reference(value)) {
                    recover(pos_, "bare '&' in attribute value");
                    value += '&';
                    ++pos_;
                }
            } else if (c == '<') {
                recover(pos_, "'<' in attribute value");
                value += '<';
                ++pos_;
            } else {
                value += c;
                ++pos_;
            }
        }
    }

    XmlElement read_element(int depth) {
        if (depth > kMaxDepth) fail("elements nested too deeply");
        XmlElement element;
        element.line = line_at(pos_);
        ++pos_;  // '<'
        element.name = read_name();

        while (true) {
            const std::size_t before = pos_;
            skip_space();
            if (at_end()) fail("unterminated start tag <" + element.name + ">");
            if (starts_with("/>")) {
                pos_ += 2;
                return element;
            }
            if (in_[pos_] == '>') {
                ++pos_;
                break;
            }
            if (!is_name_start(in_[pos_])) {
                recover(pos_, std::string("stray character '") + in_[pos_] + "' in <" + element.name + ">");
                ++pos_;
                continue;
            }
            if (pos_ == before) fail("expected whitespace before attribute");
            std::string key = read_name();
            skip_space();
            if (at_end() || in_[pos_] != '=') fail("expected '=' after attribute " + key);
            ++pos_;
            skip_space();
            std::string value = read_attribute_value();
            if (element.attribute(key) != nullptr) fail("duplicate attribute " + key + " on <" + element.name + ">");
            element.attributes.emplace_back(std::move(key), std::move(value));
        }

        while (true) {
            if (at_end()) fail("unterminated element <" + element.name + ">");
            if (starts_with("</")) {
                pos_ += 2;
                const std::string closing = read_name();
                if (closing != element.name) fail("mismatched closing tag </" + closing + "> for <" + element.name + ">");
                skip_space();
                if (at_end() || in_[pos_] != '>') fail("expected '>'");
                ++pos_;
                trim(element.text);
                return element;
            }
            if (starts_with("<!--")) {
                skip_comment();
            } else if (starts_with("<![CDATA[")) {
                const auto end = in_.find("]]>", pos_ + 9);
                if (end == std::string_view::npos) fail("unterminated CDATA section");
                element.text.append(in_.substr(pos_ + 9, end - pos_ - 9));
                pos_ = end + 3;
            } else if (starts_with("<?")) {
                const auto end = in_.find("?>", pos_ + 2);
                if (end == std::string_view::npos) fail("unterminated processing instruction");
                pos_ = end + 2;
            } else if (in_[pos_] == '<') {
                element.children.push_back(read_element(depth + 1));
            } else if (in_[pos_] == '&') {
                if (!read_reference(element.text)) {
                    recover(pos_, "bare '&' in text");
                    element.text += '&';
                    ++pos_;
                }
            } else {
                element.text += in_[pos_++];
            }
        }
    }

    std::string_view in_;
    XmlReadOptions options_;
    std::size_t pos_ = 0;
    std::vector<std::size_t> newlines_;
    std::vector<XmlRecovery> recoveries_;
};

bool blank(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](char c) { return is_space(c); });
}

void write_element(const XmlElement& e, int indent, std::string& out) {
    out.append(static_cast<std::size_t>(indent) * 2, ' ');
    out += '<';
    out += e.name;
    for (const auto& [k, v] : e.attributes) {
        out += ' ';
        out += k;
        out += "=\"";
        out += escape_xml_attribute(v);
        out += '"';
    }
    const bool has_text = !blank(e.text);
    if (e.children.empty() && !has_text) {
        out += "/>\n";
        return;
    }
    out += '>';
    if (e.children.empty()) {
        out += escape_xml_text(e.text);
    } else {
        out += '\n';
        if (has_text) {
            out.append(static_cast<std::size_t>(indent + 1) * 2, ' ');
            out += escape_xml_text(e.text);
            out += '\n';
        }
        for (const auto& child : e.children) write_element(child, indent + 1, out);
        out.append(static_cast<std::size_t>(indent) * 2, ' ');
    }
    out += "</";
    out += e.name;
    out += ">\n";
}

}  // namespace

XmlDocument parse_xml(std::string_view bytes, XmlReadOptions options) { return XmlReader(bytes, options).read(); }

std::string escape_xml_attribute(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\n': out += "&#10;"; break;
            case '\r': out += "&#13;"; break;
            case '\t': out += "&#9;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string escape_xml_text(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '\r': out += "&#13;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string write_xml(const XmlElement& root) {
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    write_element(root, 0, out);
    return out;
}

}  // namespace sgforge
