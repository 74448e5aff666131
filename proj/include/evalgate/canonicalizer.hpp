#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "evalgate/errors.hpp"

namespace evalgate {

enum class AnswerKind { number, date, list, text, number_with_unit };

inline const char* to_string(AnswerKind kind) {
    switch (kind) {
        case AnswerKind::number: return "number";
        case AnswerKind::date: return "date";
        case AnswerKind::list: return "list";
        case AnswerKind::text: return "string";
        case AnswerKind::number_with_unit: return "number_with_unit";
    }
    return "unknown";
}

inline AnswerKind answer_kind_from_string(const std::string& name) {
    if (name == "number") return AnswerKind::number;
    if (name == "date") return AnswerKind::date;
    if (name == "list") return AnswerKind::list;
    if (name == "string") return AnswerKind::text;
    if (name == "number_with_unit") return AnswerKind::number_with_unit;
    throw EvalError(ErrorKind::invalid_config, "unknown answer shape: " + name);
}

struct AnswerShape {
    AnswerKind kind = AnswerKind::text;
    bool list_order_significant = true;
};

// Comparison is exact on canonical decimals; tolerances belong to scorers,
// not here.
struct CanonicalAnswer {
    AnswerShape shape;
    std::string canonical_text;
    std::optional<std::string> numeric_value;
    std::optional<std::string> unit;
};

// Unit symbols are normalized through a fixed table; magnitudes are not
// converted ("5000 g" and "5 kg" stay distinct).
using UnitTable = std::map<std::string, std::string>;

inline const UnitTable& default_unit_table() {
    static const UnitTable table = {
        {"%", "%"},          {"percent", "%"},     {"pct", "%"},
        {"mg", "mg"},        {"milligram", "mg"},  {"milligrams", "mg"},
        {"g", "g"},          {"gram", "g"},        {"grams", "g"},
        {"kg", "kg"},        {"kilogram", "kg"},   {"kilograms", "kg"},
        {"mm", "mm"},        {"millimeter", "mm"}, {"millimeters", "mm"},
        {"millimetre", "mm"},{"millimetres", "mm"},
        {"cm", "cm"},        {"centimeter", "cm"}, {"centimeters", "cm"},
        {"centimetre", "cm"},{"centimetres", "cm"},
        {"m", "m"},          {"meter", "m"},       {"meters", "m"},
        {"metre", "m"},      {"metres", "m"},
        {"km", "km"},        {"kilometer", "km"},  {"kilometers", "km"},
        {"kilometre", "km"}, {"kilometres", "km"},
        {"s", "s"},          {"sec", "s"},         {"secs", "s"},
        {"second", "s"},     {"seconds", "s"},
        {"min", "min"},      {"mins", "min"},      {"minute", "min"},
        {"minutes", "min"},
        {"h", "h"},          {"hr", "h"},          {"hrs", "h"},
        {"hour", "h"},       {"hours", "h"},
        {"$", "USD"},        {"usd", "USD"},       {"dollar", "USD"},
        {"dollars", "USD"},
        {"\xE2\x82\xAC", "EUR"}, {"eur", "EUR"},   {"euro", "EUR"},
        {"euros", "EUR"},
        {"\xC2\xA3", "GBP"}, {"gbp", "GBP"},       {"pound", "GBP"},
        {"pounds", "GBP"},
        {"\xC2\xA5", "JPY"}, {"jpy", "JPY"},       {"yen", "JPY"},
    };
    return table;
}

namespace canon_detail {

inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

inline std::string trim(std::string_view s) {
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end && is_space(s[begin])) ++begin;
    while (end > begin && is_space(s[end - 1])) --end;
    return std::string(s.substr(begin, end - begin));
}

inline std::string ascii_lower(std::string s) {
    for (char& c : s) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return s;
}

inline std::string collapse_whitespace(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool in_run = false;
    for (char c : s) {
        if (is_space(c)) {
            in_run = true;
            continue;
        }
        if (in_run && !out.empty()) out.push_back(' ');
        in_run = false;
        out.push_back(c);
    }
    return out;
}

// Multi-byte currency markers are matched as raw UTF-8 sequences.
inline const std::array<std::pair<std::string_view, std::string_view>, 4>& currency_symbols() {
    static const std::array<std::pair<std::string_view, std::string_view>, 4> symbols = {{
        {"$", "USD"},
        {"\xE2\x82\xAC", "EUR"},
        {"\xC2\xA3", "GBP"},
        {"\xC2\xA5", "JPY"},
    }};
    return symbols;
}

// Exact decimal normalization by string manipulation; no floating point.
// Accepts [+-]digits[.digits][(e|E)[+-]digits], yields a plain decimal with
// no trailing fraction zeros, no leading integer zeros, and no exponent.
inline std::string normalize_decimal(std::string_view s) {
    auto unparseable = [&] {
        return EvalError(ErrorKind::unparseable_answer, "not a number: " + std::string(s));
    };
    std::size_t i = 0;
    bool negative = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
        negative = s[i] == '-';
        ++i;
    }
    std::string digits;
    long point = 0;
    bool seen_digit = false;
    bool seen_dot = false;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (c >= '0' && c <= '9') {
            digits.push_back(c);
            if (!seen_dot) ++point;
            seen_digit = true;
        } else if (c == '.') {
            if (seen_dot) throw unparseable();
            seen_dot = true;
        } else if (c == 'e' || c == 'E') {
            break;
        } else {
            throw unparseable();
        }
    }
    if (!seen_digit) throw unparseable();
    if (i < s.size()) {  // exponent
        ++i;
        bool exp_negative = false;
        if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
            exp_negative = s[i] == '-';
            ++i;
        }
        if (i >= s.size()) throw unparseable();
        long exponent = 0;
        for (; i < s.size(); ++i) {
            if (s[i] < '0' || s[i] > '9') throw unparseable();
            exponent = exponent * 10 + (s[i] - '0');
            if (exponent > 10000) throw unparseable();
        }
        point += exp_negative ? -exponent : exponent;
    }
    if (digits.size() > 200) throw unparseable();

    // Value is 0.digits x 10^point; strip zeros that carry no information.
    std::size_t lead = 0;
    while (lead < digits.size() && digits[lead] == '0') {
        ++lead;
        --point;
    }
    digits.erase(0, lead);
    while (!digits.empty() && digits.back() == '0') digits.pop_back();
    if (digits.empty()) return "0";

    std::string out;
    if (negative) out.push_back('-');
    long n = static_cast<long>(digits.size());
    if (point >= n) {
        out += digits;
        out.append(static_cast<std::size_t>(point - n), '0');
    } else if (point > 0) {
        out += digits.substr(0, static_cast<std::size_t>(point));
        out.push_back('.');
        out += digits.substr(static_cast<std::size_t>(point));
    } else {
        out += "0.";
        out.append(static_cast<std::size_t>(-point), '0');
        out += digits;
    }
    return out;
}

// Strips currency symbols, a trailing percent sign, thousands separators,
// and a leading plus before exact-decimal parsing.
inline std::string normalize_number_text(std::string_view raw) {
    std::string t = trim(raw);
    for (const auto& [symbol, name] : currency_symbols()) {
        if (t.size() >= symbol.size() && std::string_view(t).substr(0, symbol.size()) == symbol) {
            t = trim(t.substr(symbol.size()));
            break;
        }
        if (t.size() >= symbol.size() &&
            std::string_view(t).substr(t.size() - symbol.size()) == symbol) {
            t = trim(std::string_view(t).substr(0, t.size() - symbol.size()));
            break;
        }
    }
    if (!t.empty() && t.back() == '%') {
        t = trim(std::string_view(t).substr(0, t.size() - 1));
    }
    std::string stripped;
    stripped.reserve(t.size());
    for (char c : t) {
        if (c == ',') continue;  // thousands separator
        stripped.push_back(c);
    }
    if (stripped.empty()) {
        throw EvalError(ErrorKind::unparseable_answer, "empty number");
    }
    return normalize_decimal(stripped);
}

struct MonthTable {
    std::map<std::string, int> by_name;
    MonthTable() {
        const char* names[12] = {"january", "february", "march",     "april",   "may",
                                 "june",    "july",     "august",    "september", "october",
                                 "november", "december"};
        for (int m = 0; m < 12; ++m) {
            std::string full = names[m];
            by_name[full] = m + 1;
            by_name[full.substr(0, 3)] = m + 1;
        }
        by_name["sept"] = 9;
    }
};

inline std::optional<int> month_from_name(const std::string& name) {
    static const MonthTable table;
    auto it = table.by_name.find(name);
    if (it == table.by_name.end()) return std::nullopt;
    return it->second;
}

inline bool is_leap_year(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

inline int days_in_month(int y, int m) {
    static const int days[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap_year(y)) return 29;
    return days[m - 1];
}

inline std::string format_iso_date(int y, int m, int d, std::string_view raw) {
    if (y < 1 || y > 9999 || m < 1 || m > 12 || d < 1 || d > days_in_month(y, m)) {
        throw EvalError(ErrorKind::unparseable_answer, "not a real date: " + std::string(raw));
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, m, d);
    return buf;
}

inline std::string normalize_date_text(std::string_view raw) {
    std::string t = ascii_lower(collapse_whitespace(trim(raw)));
    while (!t.empty() && t.back() == '.') t.pop_back();
    if (t.empty()) {
        throw EvalError(ErrorKind::unparseable_answer, "empty date");
    }

    static const std::regex year_first(R"(^(\d{4})[-/.](\d{1,2})[-/.](\d{1,2})$)");
    static const std::regex year_last(R"(^(\d{1,2})[-/.](\d{1,2})[-/.](\d{4})$)");
    static const std::regex month_name_first(
        R"(^([a-z]+)\.? (\d{1,2})(?:st|nd|rd|th)?,? (\d{4})$)");
    static const std::regex day_first(
        R"(^(\d{1,2})(?:st|nd|rd|th)?(?: of)? ([a-z]+),? (\d{4})$)");

    std::smatch m;
    if (std::regex_match(t, m, year_first)) {
        return format_iso_date(std::stoi(m[1]), std::stoi(m[2]), std::stoi(m[3]), raw);
    }
    if (std::regex_match(t, m, year_last)) {
        int a = std::stoi(m[1]);
        int b = std::stoi(m[2]);
        int y = std::stoi(m[3]);
        if (a > 12 && b <= 12) return format_iso_date(y, b, a, raw);
        if (b > 12 && a <= 12) return format_iso_date(y, a, b, raw);
        if (a == b) return format_iso_date(y, a, b, raw);
        if (a <= 12 && b <= 12) {
            // Day and month cannot be told apart; guessing silently is the
            // regression mode this module exists to prevent.
            throw EvalError(ErrorKind::ambiguous_date, std::string(raw));
        }
        throw EvalError(ErrorKind::unparseable_answer, "not a real date: " + std::string(raw));
    }
    if (std::regex_match(t, m, month_name_first)) {
        if (auto month = month_from_name(m[1])) {
            return format_iso_date(std::stoi(m[3]), *month, std::stoi(m[2]), raw);
        }
        throw EvalError(ErrorKind::unparseable_answer, "unknown month: " + std::string(raw));
    }
    if (std::regex_match(t, m, day_first)) {
        if (auto month = month_from_name(m[2])) {
            return format_iso_date(std::stoi(m[3]), *month, std::stoi(m[1]), raw);
        }
        throw EvalError(ErrorKind::unparseable_answer, "unknown month: " + std::string(raw));
    }
    throw EvalError(ErrorKind::unparseable_answer, "not a date: " + std::string(raw));
}

inline std::vector<std::string> split_list_items(std::string_view raw) {
    std::vector<std::string> items;
    std::string current;
    for (char c : raw) {
        if (c == ',' || c == ';') {
            std::string item = ascii_lower(trim(current));
            if (!item.empty()) items.push_back(std::move(item));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    std::string item = ascii_lower(trim(current));
    if (!item.empty()) items.push_back(std::move(item));
    return items;
}

inline std::string normalize_text(std::string_view raw) {
    std::string t = ascii_lower(collapse_whitespace(trim(raw)));
    // Terminal periods go, along with any whitespace they expose.
    while (!t.empty() && (t.back() == '.' || t.back() == ' ')) t.pop_back();
    if (t.empty()) {
        throw EvalError(ErrorKind::unparseable_answer, "empty string answer");
    }
    return t;
}

}  // namespace canon_detail

inline CanonicalAnswer canonicalize(std::string_view raw, const AnswerShape& shape,
                                    const UnitTable& units = default_unit_table()) {
    using namespace canon_detail;
    if (trim(raw).empty()) {
        throw EvalError(ErrorKind::unparseable_answer, "empty answer");
    }
    CanonicalAnswer out;
    out.shape = shape;
    switch (shape.kind) {
        case AnswerKind::number: {
            out.canonical_text = normalize_number_text(raw);
            out.numeric_value = out.canonical_text;
            break;
        }
        case AnswerKind::date: {
            out.canonical_text = normalize_date_text(raw);
            break;
        }
        case AnswerKind::list: {
            auto items = split_list_items(raw);
            if (items.empty()) {
                throw EvalError(ErrorKind::unparseable_answer, "empty list");
            }
            if (!shape.list_order_significant) std::sort(items.begin(), items.end());
            std::string joined;
            for (const auto& item : items) {
                if (!joined.empty()) joined.push_back(';');
                joined += item;
            }
            out.canonical_text = joined;
            break;
        }
        case AnswerKind::text: {
            out.canonical_text = normalize_text(raw);
            break;
        }
        case AnswerKind::number_with_unit: {
            std::string t = trim(raw);
            std::optional<std::string> unit;
            for (const auto& [symbol, name] : currency_symbols()) {
                if (t.size() >= symbol.size() &&
                    std::string_view(t).substr(0, symbol.size()) == symbol) {
                    unit = std::string(name);
                    t = trim(t.substr(symbol.size()));
                    break;
                }
                if (t.size() >= symbol.size() &&
                    std::string_view(t).substr(t.size() - symbol.size()) == symbol) {
                    unit = std::string(name);
                    t = trim(std::string_view(t).substr(0, t.size() - symbol.size()));
                    break;
                }
            }
            if (!unit) {
                std::size_t end = t.size();
                std::size_t i = end;
                while (i > 0 && (std::isalpha(static_cast<unsigned char>(t[i - 1])) ||
                                 t[i - 1] == '%')) {
                    --i;
                }
                if (i < end) {
                    std::string token = ascii_lower(t.substr(i));
                    auto it = units.find(token);
                    if (it == units.end()) {
                        throw EvalError(ErrorKind::unparseable_answer, "unknown unit: " + token);
                    }
                    unit = it->second;
                    t = trim(std::string_view(t).substr(0, i));
                }
            }
            std::string number = normalize_number_text(t);
            out.numeric_value = number;
            out.unit = unit;
            out.canonical_text = unit ? number + " " + *unit : number;
            break;
        }
    }
    return out;
}

inline bool answers_match(std::string_view a, std::string_view b, const AnswerShape& shape,
                          const UnitTable& units = default_unit_table()) {
    CanonicalAnswer ca = canonicalize(a, shape, units);
    CanonicalAnswer cb = canonicalize(b, shape, units);
    return ca.canonical_text == cb.canonical_text && ca.unit == cb.unit;
}

}  // namespace evalgate
