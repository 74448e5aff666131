#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "evalgate/errors.hpp"

namespace evalgate {

using Json = nlohmann::json;

inline const Json& require_field(const Json& j, const std::string& key) {
    auto it = j.find(key);
    if (it == j.end()) {
        throw EvalError(ErrorKind::missing_field, key);
    }
    return *it;
}

inline std::string require_nonempty_string(const Json& j, const std::string& key) {
    const Json& v = require_field(j, key);
    if (!v.is_string() || v.get<std::string>().empty()) {
        throw EvalError(ErrorKind::missing_field, key);
    }
    return v.get<std::string>();
}

inline std::uint64_t require_uint(const Json& j, const std::string& key) {
    const Json& v = require_field(j, key);
    if (!v.is_number_unsigned()) {
        throw EvalError(ErrorKind::parse_error, key + " must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

inline double require_number(const Json& j, const std::string& key) {
    const Json& v = require_field(j, key);
    if (!v.is_number()) {
        throw EvalError(ErrorKind::parse_error, key + " must be a number");
    }
    return v.get<double>();
}

inline bool require_bool(const Json& j, const std::string& key) {
    const Json& v = require_field(j, key);
    if (!v.is_boolean()) {
        throw EvalError(ErrorKind::parse_error, key + " must be a boolean");
    }
    return v.get<bool>();
}

inline Json parse_json(std::string_view text) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw EvalError(ErrorKind::parse_error, std::string("byte ") + std::to_string(e.byte));
    }
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw EvalError(ErrorKind::io_error, "cannot open " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

inline void write_text_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw EvalError(ErrorKind::io_error, "cannot write " + path.string());
    }
    out << content;
}

}  // namespace evalgate
