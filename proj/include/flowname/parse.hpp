#pragma once

#include <charconv>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace flowname {

struct ParseError {
    std::size_t line = 0;
    std::string message;

    std::string toString() const {
        return "line " + std::to_string(line) + ": " + message;
    }
};

// Minimal result type for line parsers; C++23's std::expected is not
// available on this toolchain.
template <typename T>
class Parsed {
public:
    Parsed(T value) : data_(std::move(value)) {}
    Parsed(ParseError error) : data_(std::move(error)) {}

    bool ok() const { return std::holds_alternative<T>(data_); }
    explicit operator bool() const { return ok(); }

    const T& value() const { return std::get<T>(data_); }
    T& value() { return std::get<T>(data_); }
    const ParseError& error() const { return std::get<ParseError>(data_); }

private:
    std::variant<T, ParseError> data_;
};

inline std::vector<std::string_view> splitFields(std::string_view line, char sep = '\t') {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

inline std::optional<std::int64_t> parseI64(std::string_view text) {
    std::int64_t value = 0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || text.empty()) return std::nullopt;
    return value;
}

inline std::optional<std::uint64_t> parseU64(std::string_view text) {
    std::uint64_t value = 0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || text.empty()) return std::nullopt;
    return value;
}

inline std::optional<int> parseIntInRange(std::string_view text, int lo, int hi) {
    auto v = parseI64(text);
    if (!v || *v < lo || *v > hi) return std::nullopt;
    return static_cast<int>(*v);
}

}  // namespace flowname
