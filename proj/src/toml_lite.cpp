#include "converter/toml_lite.hpp"

#include <cctype>
#include <sstream>

#include "converter/errors.hpp"
#include "converter/util.hpp"

namespace converter::toml {

std::int64_t Value::as_int() const {
    if (std::holds_alternative<std::int64_t>(data)) return std::get<std::int64_t>(data);
    throw ParseError("toml: value is not an integer");
}

double Value::as_double() const {
    if (std::holds_alternative<double>(data)) return std::get<double>(data);
    if (std::holds_alternative<std::int64_t>(data))
        return static_cast<double>(std::get<std::int64_t>(data));
    throw ParseError("toml: value is not a number");
}

const Value* Table::find(const std::string& key) const {
    auto it = values.find(key);
    return it == values.end() ? nullptr : &it->second;
}

std::optional<std::string> Table::get_string(const std::string& key) const {
    const auto* v = find(key);
    if (!v) return std::nullopt;
    if (!v->is_string()) throw ParseError("toml: key '" + key + "' is not a string");
    return v->as_string();
}

std::optional<std::int64_t> Table::get_int(const std::string& key) const {
    const auto* v = find(key);
    if (!v) return std::nullopt;
    return v->as_int();
}

std::optional<double> Table::get_double(const std::string& key) const {
    const auto* v = find(key);
    if (!v) return std::nullopt;
    return v->as_double();
}

std::optional<bool> Table::get_bool(const std::string& key) const {
    const auto* v = find(key);
    if (!v) return std::nullopt;
    if (!std::holds_alternative<bool>(v->data))
        throw ParseError("toml: key '" + key + "' is not a boolean");
    return v->as_bool();
}

namespace {

std::string strip_comment(const std::string& line) {
    bool in_string = false;
    for (size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (c == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
        if (c == '#' && !in_string) return line.substr(0, i);
    }
    return line;
}

std::string parse_basic_string(const std::string& raw, int line_no) {
    if (raw.size() < 2 || raw.front() != '"' || raw.back() != '"')
        throw ParseError("toml line " + std::to_string(line_no) + ": unterminated string");
    std::string out;
    for (size_t i = 1; i + 1 < raw.size(); ++i) {
        char c = raw[i];
        if (c != '\\') {
            out.push_back(c);
            continue;
        }
        if (i + 2 >= raw.size() + 1)
            throw ParseError("toml line " + std::to_string(line_no) + ": dangling escape");
        char e = raw[++i];
        switch (e) {
            case 'n': out.push_back('\n'); break;
            case 't': out.push_back('\t'); break;
            case 'r': out.push_back('\r'); break;
            case '"': out.push_back('"'); break;
            case '\\': out.push_back('\\'); break;
            default:
                throw ParseError("toml line " + std::to_string(line_no) + ": bad escape \\" + e);
        }
    }
    return out;
}

Value parse_value(const std::string& raw, int line_no) {
    std::string v = util::trim(raw);
    if (v.empty()) throw ParseError("toml line " + std::to_string(line_no) + ": missing value");
    if (v.front() == '"') return Value{parse_basic_string(v, line_no)};
    if (v == "true") return Value{true};
    if (v == "false") return Value{false};
    bool is_float = v.find('.') != std::string::npos || v.find('e') != std::string::npos ||
                    v.find('E') != std::string::npos;
    try {
        size_t used = 0;
        if (is_float) {
            double d = std::stod(v, &used);
            if (used != v.size()) throw std::invalid_argument(v);
            return Value{d};
        }
        std::int64_t i = std::stoll(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return Value{i};
    } catch (const std::exception&) {
        throw ParseError("toml line " + std::to_string(line_no) + ": cannot parse value '" + v +
                         "'");
    }
}

std::vector<std::string> parse_key_path(const std::string& raw, int line_no) {
    auto parts = util::split(raw, '.');
    for (auto& p : parts) {
        p = util::trim(p);
        if (p.empty())
            throw ParseError("toml line " + std::to_string(line_no) + ": empty key segment");
        for (unsigned char c : p)
            if (!std::isalnum(c) && c != '_' && c != '-')
                throw ParseError("toml line " + std::to_string(line_no) + ": bad key '" + raw +
                                 "'");
    }
    if (parts.empty())
        throw ParseError("toml line " + std::to_string(line_no) + ": empty key");
    return parts;
}

}  // namespace

Table parse(const std::string& text) {
    Table root;
    Table* current = &root;
    int line_no = 0;
    std::istringstream stream(text);
    std::string raw_line;

    while (std::getline(stream, raw_line)) {
        ++line_no;
        std::string line = util::trim(strip_comment(raw_line));
        if (line.empty()) continue;

        if (line.front() == '[') {
            bool is_array = line.size() > 1 && line[1] == '[';
            std::string close = is_array ? "]]" : "]";
            if (line.size() < close.size() + (is_array ? 2 : 1) ||
                line.substr(line.size() - close.size()) != close)
                throw ParseError("toml line " + std::to_string(line_no) +
                                 ": malformed table header");
            std::string inner = line.substr(is_array ? 2 : 1,
                                            line.size() - (is_array ? 4 : 2));
            auto path = parse_key_path(inner, line_no);
            Table* t = &root;
            for (size_t i = 0; i < path.size(); ++i) {
                bool last = i + 1 == path.size();
                if (last && is_array) {
                    t->table_arrays[path[i]].emplace_back();
                    t = &t->table_arrays[path[i]].back();
                } else if (!last && t->table_arrays.count(path[i])) {
                    // dotted path through the latest element of an array
                    t = &t->table_arrays[path[i]].back();
                } else {
                    t = &t->tables[path[i]];
                }
            }
            current = t;
            continue;
        }

        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("toml line " + std::to_string(line_no) + ": expected key = value");
        auto path = parse_key_path(line.substr(0, eq), line_no);
        Value value = parse_value(line.substr(eq + 1), line_no);
        Table* t = current;
        for (size_t i = 0; i + 1 < path.size(); ++i) t = &t->tables[path[i]];
        if (t->values.count(path.back()))
            throw ParseError("toml line " + std::to_string(line_no) + ": duplicate key '" +
                             path.back() + "'");
        t->values[path.back()] = std::move(value);
    }
    return root;
}

}  // namespace converter::toml
