#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace converter::toml {

/// Minimal TOML subset: [tables], [[arrays of tables]], dotted table
/// headers, and basic string / integer / float / boolean values with
/// comments. Covers the pipeline config format.
struct Value {
    std::variant<std::string, std::int64_t, double, bool> data;

    bool is_string() const { return std::holds_alternative<std::string>(data); }
    const std::string& as_string() const { return std::get<std::string>(data); }
    std::int64_t as_int() const;
    double as_double() const;
    bool as_bool() const { return std::get<bool>(data); }
};

struct Table {
    std::map<std::string, Value> values;
    std::map<std::string, Table> tables;
    std::map<std::string, std::vector<Table>> table_arrays;

    const Value* find(const std::string& key) const;
    std::optional<std::string> get_string(const std::string& key) const;
    std::optional<std::int64_t> get_int(const std::string& key) const;
    std::optional<double> get_double(const std::string& key) const;
    std::optional<bool> get_bool(const std::string& key) const;
};

/// Throws ParseError on malformed input.
Table parse(const std::string& text);

}  // namespace converter::toml
