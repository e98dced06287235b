#include "hextiles/config_text.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "hextiles/error.hpp"

namespace hextiles {

namespace {

using nlohmann::json;

class TomlReader {
public:
    TomlReader(std::string_view text, std::string_view source) : text_(text), source_(source) {}

    json parse()
    {
        json root = json::object();
        json* table = &root;
        while (true) {
            skip_blank_lines();
            if (at_end()) {
                break;
            }
            if (peek() == '[') {
                table = parse_header(root);
            } else {
                parse_key_value(*table);
            }
            expect_line_end();
        }
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const
    {
        throw ParseError(std::string(source_) + ":" + std::to_string(line_) + ": " + msg);
    }

    bool at_end() const { return pos_ >= text_.size(); }
    char peek() const { return at_end() ? '\0' : text_[pos_]; }

    char get()
    {
        const char c = text_[pos_++];
        if (c == '\n') {
            ++line_;
        }
        return c;
    }

    void skip_inline_space()
    {
        while (!at_end() && (peek() == ' ' || peek() == '\t')) {
            ++pos_;
        }
    }

    void skip_comment()
    {
        if (peek() == '#') {
            while (!at_end() && peek() != '\n') {
                ++pos_;
            }
        }
    }

    void skip_blank_lines()
    {
        while (!at_end()) {
            skip_inline_space();
            skip_comment();
            if (peek() == '\n' || peek() == '\r') {
                get();
            } else {
                return;
            }
        }
    }

    // Whitespace, newlines and comments, as allowed inside arrays.
    void skip_all_space()
    {
        while (!at_end()) {
            skip_inline_space();
            skip_comment();
            if (peek() == '\n' || peek() == '\r') {
                get();
            } else {
                return;
            }
        }
    }

    void expect_line_end()
    {
        skip_inline_space();
        skip_comment();
        if (at_end()) {
            return;
        }
        if (peek() == '\r') {
            ++pos_;
        }
        if (peek() != '\n') {
            fail("unexpected trailing characters");
        }
        get();
    }

    static bool bare_key_char(char c)
    {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
    }

    std::string parse_simple_key()
    {
        skip_inline_space();
        if (peek() == '"') {
            return parse_basic_string();
        }
        if (peek() == '\'') {
            return parse_literal_string();
        }
        const std::size_t start = pos_;
        while (!at_end() && bare_key_char(peek())) {
            ++pos_;
        }
        if (start == pos_) {
            fail("expected a key");
        }
        return std::string(text_.substr(start, pos_ - start));
    }

    std::vector<std::string> parse_dotted_key()
    {
        std::vector<std::string> parts{parse_simple_key()};
        skip_inline_space();
        while (peek() == '.') {
            ++pos_;
            parts.push_back(parse_simple_key());
            skip_inline_space();
        }
        return parts;
    }

    json* descend(json& root, const std::vector<std::string>& path, std::size_t count)
    {
        json* node = &root;
        for (std::size_t i = 0; i < count; ++i) {
            json& child = (*node)[path[i]];
            if (child.is_null()) {
                child = json::object();
            }
            if (child.is_array() && !child.empty() && child.back().is_object()) {
                node = &child.back();
            } else if (child.is_object()) {
                node = &child;
            } else {
                fail("key '" + path[i] + "' is not a table");
            }
        }
        return node;
    }

    json* parse_header(json& root)
    {
        ++pos_;
        const bool array_table = peek() == '[';
        if (array_table) {
            ++pos_;
        }
        const auto path = parse_dotted_key();
        for (int i = 0; i < (array_table ? 2 : 1); ++i) {
            if (peek() != ']') {
                fail("unterminated table header");
            }
            ++pos_;
        }
        json* parent = descend(root, path, path.size() - 1);
        json& slot = (*parent)[path.back()];
        if (array_table) {
            if (slot.is_null()) {
                slot = json::array();
            }
            if (!slot.is_array()) {
                fail("'" + path.back() + "' already defined as a non-array");
            }
            slot.push_back(json::object());
            return &slot.back();
        }
        if (slot.is_null()) {
            slot = json::object();
        } else if (!slot.is_object()) {
            fail("'" + path.back() + "' already defined as a value");
        }
        return &slot;
    }

    void parse_key_value(json& table)
    {
        const auto path = parse_dotted_key();
        skip_inline_space();
        if (get() != '=') {
            fail("expected '=' after key");
        }
        skip_inline_space();
        json value = parse_value();
        json* target = descend(table, path, path.size() - 1);
        if (target->contains(path.back())) {
            fail("duplicate key '" + path.back() + "'");
        }
        (*target)[path.back()] = std::move(value);
    }

    json parse_value()
    {
        const char c = peek();
        if (c == '"') {
            return parse_basic_string();
        }
        if (c == '\'') {
            return parse_literal_string();
        }
        if (c == '[') {
            return parse_array();
        }
        if (c == '{') {
            return parse_inline_table();
        }
        if (text_.substr(pos_, 4) == "true") {
            pos_ += 4;
            return true;
        }
        if (text_.substr(pos_, 5) == "false") {
            pos_ += 5;
            return false;
        }
        return parse_number();
    }

    std::string parse_basic_string()
    {
        ++pos_;
        std::string out;
        while (true) {
            if (at_end() || peek() == '\n') {
                fail("unterminated string");
            }
            const char c = get();
            if (c == '"') {
                return out;
            }
            if (c != '\\') {
                out.push_back(c);
                continue;
            }
            if (at_end()) {
                fail("unterminated escape");
            }
            switch (get()) {
            case 'n': out.push_back('\n'); break;
            case 't': out.push_back('\t'); break;
            case 'r': out.push_back('\r'); break;
            case '"': out.push_back('"'); break;
            case '\\': out.push_back('\\'); break;
            default: fail("unsupported escape sequence");
            }
        }
    }

    std::string parse_literal_string()
    {
        ++pos_;
        const std::size_t start = pos_;
        while (!at_end() && peek() != '\'' && peek() != '\n') {
            ++pos_;
        }
        if (peek() != '\'') {
            fail("unterminated string");
        }
        std::string out(text_.substr(start, pos_ - start));
        ++pos_;
        return out;
    }

    json parse_array()
    {
        ++pos_;
        json arr = json::array();
        while (true) {
            skip_all_space();
            if (peek() == ']') {
                ++pos_;
                return arr;
            }
            arr.push_back(parse_value());
            skip_all_space();
            if (peek() == ',') {
                ++pos_;
            } else if (peek() != ']') {
                fail("expected ',' or ']' in array");
            }
        }
    }

    json parse_inline_table()
    {
        ++pos_;
        json table = json::object();
        skip_inline_space();
        if (peek() == '}') {
            ++pos_;
            return table;
        }
        while (true) {
            parse_key_value(table);
            skip_inline_space();
            const char c = at_end() ? '\0' : get();
            if (c == '}') {
                return table;
            }
            if (c != ',') {
                fail("expected ',' or '}' in inline table");
            }
        }
    }

    json parse_number()
    {
        const std::size_t start = pos_;
        while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '+' ||
                             peek() == '-' || peek() == '.' || peek() == '_')) {
            ++pos_;
        }
        std::string token;
        for (char c : text_.substr(start, pos_ - start)) {
            if (c != '_') {
                token.push_back(c);
            }
        }
        if (token.empty()) {
            fail("expected a value");
        }
        const char* first = token.data();
        const char* last = token.data() + token.size();
        if (*first == '+') {
            ++first;
        }
        const bool is_float = token.find_first_of(".eE") != std::string::npos;
        if (!is_float) {
            std::int64_t v = 0;
            const auto res = std::from_chars(first, last, v);
            if (res.ec == std::errc{} && res.ptr == last) {
                return v;
            }
        } else {
            double v = 0.0;
            const auto res = std::from_chars(first, last, v);
            if (res.ec == std::errc{} && res.ptr == last) {
                return v;
            }
        }
        fail("invalid value '" + token + "'");
    }

    std::string_view text_;
    std::string_view source_;
    std::size_t pos_ = 0;
    int line_ = 1;
};

}  // namespace

nlohmann::json parse_config_text(std::string_view text, std::string_view source)
{
    return TomlReader(text, source).parse();
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot read '" + path.string() + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

nlohmann::json read_config_file(const std::filesystem::path& path)
{
    return parse_config_text(read_text_file(path), path.string());
}

}  // namespace hextiles
