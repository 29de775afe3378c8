#pragma once

#include <cctype>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace torres::toml {

/// Minimal TOML reader covering the subset the experiment configs use:
/// bare keys, [table] headers, strings in double quotes, integers,
/// floats, booleans, homogeneous-by-use arrays, inline tables, and '#'
/// comments. No dotted keys, no multi-line strings, no dates.
class Value;
using Table = std::map<std::string, Value>;
using Array = std::vector<Value>;

class Value {
public:
    std::variant<std::string, double, std::int64_t, bool, Array, Table> v;

    bool is_table() const { return std::holds_alternative<Table>(v); }
    bool is_array() const { return std::holds_alternative<Array>(v); }
    bool is_string() const { return std::holds_alternative<std::string>(v); }
    bool is_number() const {
        return std::holds_alternative<double>(v) || std::holds_alternative<std::int64_t>(v);
    }
    bool is_bool() const { return std::holds_alternative<bool>(v); }

    double as_number() const {
        if (std::holds_alternative<double>(v)) return std::get<double>(v);
        if (std::holds_alternative<std::int64_t>(v))
            return static_cast<double>(std::get<std::int64_t>(v));
        throw std::runtime_error("toml: expected a number");
    }
    std::int64_t as_integer() const {
        if (std::holds_alternative<std::int64_t>(v)) return std::get<std::int64_t>(v);
        throw std::runtime_error("toml: expected an integer");
    }
    const std::string& as_string() const {
        if (!is_string()) throw std::runtime_error("toml: expected a string");
        return std::get<std::string>(v);
    }
    bool as_bool() const {
        if (!is_bool()) throw std::runtime_error("toml: expected a boolean");
        return std::get<bool>(v);
    }
    const Array& as_array() const {
        if (!is_array()) throw std::runtime_error("toml: expected an array");
        return std::get<Array>(v);
    }
    const Table& as_table() const {
        if (!is_table()) throw std::runtime_error("toml: expected a table");
        return std::get<Table>(v);
    }
};

namespace detail {

struct Cursor {
    std::string_view s;
    size_t pos = 0;
    int line = 1;

    [[noreturn]] void fail(const std::string& what) const {
        throw std::runtime_error("toml: " + what + " (line " + std::to_string(line) + ")");
    }
    bool done() const { return pos >= s.size(); }
    char peek() const { return s[pos]; }
    char take() {
        char c = s[pos++];
        if (c == '\n') ++line;
        return c;
    }
    void skip_inline_ws() {
        while (!done() && (peek() == ' ' || peek() == '\t')) ++pos;
    }
    void skip_ws_and_comments() {
        for (;;) {
            skip_inline_ws();
            if (done()) return;
            if (peek() == '#') {
                while (!done() && peek() != '\n') ++pos;
                continue;
            }
            if (peek() == '\n' || peek() == '\r') {
                take();
                continue;
            }
            return;
        }
    }
};

inline std::string parse_key(Cursor& c) {
    c.skip_inline_ws();
    size_t start = c.pos;
    while (!c.done() && (std::isalnum(static_cast<unsigned char>(c.peek())) || c.peek() == '_' ||
                         c.peek() == '-'))
        ++c.pos;
    if (c.pos == start) c.fail("expected a key");
    return std::string(c.s.substr(start, c.pos - start));
}

Value parse_value(Cursor& c);

inline Value parse_string(Cursor& c) {
    c.take();  // opening quote
    std::string out;
    while (!c.done() && c.peek() != '"') {
        char ch = c.take();
        if (ch == '\\' && !c.done()) {
            char esc = c.take();
            switch (esc) {
                case 'n': out.push_back('\n'); break;
                case 't': out.push_back('\t'); break;
                case '"': out.push_back('"'); break;
                case '\\': out.push_back('\\'); break;
                default: c.fail("unsupported escape");
            }
        } else {
            out.push_back(ch);
        }
    }
    if (c.done()) c.fail("unterminated string");
    c.take();
    return Value{out};
}

inline Value parse_number_or_bool(Cursor& c) {
    size_t start = c.pos;
    while (!c.done() && (std::isalnum(static_cast<unsigned char>(c.peek())) || c.peek() == '+' ||
                         c.peek() == '-' || c.peek() == '.'))
        ++c.pos;
    std::string tok(c.s.substr(start, c.pos - start));
    if (tok == "true") return Value{true};
    if (tok == "false") return Value{false};
    const bool is_float = tok.find_first_of(".eE") != std::string::npos;
    try {
        size_t used = 0;
        if (is_float) {
            double d = std::stod(tok, &used);
            if (used != tok.size()) c.fail("malformed number '" + tok + "'");
            return Value{d};
        }
        std::int64_t i = std::stoll(tok, &used);
        if (used != tok.size()) c.fail("malformed number '" + tok + "'");
        return Value{i};
    } catch (const std::exception&) {
        c.fail("malformed value '" + tok + "'");
    }
}

inline Value parse_array(Cursor& c) {
    c.take();  // '['
    Array arr;
    for (;;) {
        c.skip_ws_and_comments();
        if (c.done()) c.fail("unterminated array");
        if (c.peek() == ']') {
            c.take();
            return Value{arr};
        }
        arr.push_back(parse_value(c));
        c.skip_ws_and_comments();
        if (!c.done() && c.peek() == ',') c.take();
    }
}

inline Value parse_inline_table(Cursor& c) {
    c.take();  // '{'
    Table t;
    c.skip_inline_ws();
    if (!c.done() && c.peek() == '}') {
        c.take();
        return Value{t};
    }
    for (;;) {
        std::string key = parse_key(c);
        c.skip_inline_ws();
        if (c.done() || c.take() != '=') c.fail("expected '=' in inline table");
        c.skip_inline_ws();
        t[key] = parse_value(c);
        c.skip_inline_ws();
        if (c.done()) c.fail("unterminated inline table");
        char ch = c.take();
        if (ch == '}') return Value{t};
        if (ch != ',') c.fail("expected ',' or '}' in inline table");
        c.skip_inline_ws();
    }
}

inline Value parse_value(Cursor& c) {
    c.skip_inline_ws();
    if (c.done()) c.fail("expected a value");
    char ch = c.peek();
    if (ch == '"') return parse_string(c);
    if (ch == '[') return parse_array(c);
    if (ch == '{') return parse_inline_table(c);
    return parse_number_or_bool(c);
}

}  // namespace detail

inline Table parse(std::string_view text) {
    detail::Cursor c{text};
    Table root;
    Table* current = &root;
    for (;;) {
        c.skip_ws_and_comments();
        if (c.done()) return root;
        if (c.peek() == '[') {
            c.take();
            std::string name = detail::parse_key(c);
            c.skip_inline_ws();
            if (c.done() || c.take() != ']') c.fail("expected ']'");
            auto [it, fresh] = root.emplace(name, Value{Table{}});
            if (!fresh && !it->second.is_table()) c.fail("key '" + name + "' redefined as table");
            if (fresh) it->second = Value{Table{}};
            current = &std::get<Table>(it->second.v);
            continue;
        }
        std::string key = detail::parse_key(c);
        c.skip_inline_ws();
        if (c.done() || c.take() != '=') c.fail("expected '=' after key '" + key + "'");
        Value v = detail::parse_value(c);
        if (current->count(key)) c.fail("duplicate key '" + key + "'");
        (*current)[key] = std::move(v);
        c.skip_inline_ws();
        if (!c.done() && c.peek() == '#') {
            while (!c.done() && c.peek() != '\n') ++c.pos;
        }
        if (!c.done() && c.peek() != '\n' && c.peek() != '\r') c.fail("trailing input after value");
    }
}

}  // namespace torres::toml
