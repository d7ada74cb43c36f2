#pragma once

// Vector file formats.
//
//   text   whitespace separated decimal literals, written in shortest
//          round-trip form
//   f64le  raw little-endian IEEE-754 doubles, length taken from the size

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <istream>
#include <iterator>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace sparseproj {

enum class VectorFormat { Text, F64LE };

inline std::optional<VectorFormat> parse_format(std::string_view s) {
    if (s == "text") return VectorFormat::Text;
    if (s == "f64le") return VectorFormat::F64LE;
    return std::nullopt;
}

/// Malformed vector data.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::vector<double> parse_text_vector(std::string_view text) {
    std::vector<double> out;
    std::size_t i = 0;
    auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; };
    while (i < text.size()) {
        while (i < text.size() && is_space(text[i])) ++i;
        if (i == text.size()) break;
        std::size_t j = i;
        while (j < text.size() && !is_space(text[j])) ++j;
        std::string_view tok = text.substr(i, j - i);
        // from_chars rejects a leading '+'.
        if (tok.size() > 1 && tok[0] == '+') tok.remove_prefix(1);
        double x = 0.0;
        const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
        if (ec != std::errc{} || ptr != tok.data() + tok.size())
            throw FormatError("not a number: '" + std::string(text.substr(i, j - i)) + "'");
        out.push_back(x);
        i = j;
    }
    return out;
}

inline std::string format_shortest(double x) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    (void)ec;
    return std::string(buf, ptr);
}

inline std::string format_text_vector(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ' ';
        out += format_shortest(v[i]);
    }
    out += '\n';
    return out;
}

inline std::vector<double> parse_f64le(std::string_view bytes) {
    if (bytes.size() % 8 != 0) throw FormatError("f64le input size is not a multiple of 8 bytes");
    std::vector<double> out(bytes.size() / 8);
    for (std::size_t i = 0; i < out.size(); ++i) {
        std::uint64_t bits = 0;
        for (int b = 7; b >= 0; --b) bits = (bits << 8) | static_cast<unsigned char>(bytes[8 * i + b]);
        out[i] = std::bit_cast<double>(bits);
    }
    return out;
}

inline std::string format_f64le(const std::vector<double>& v) {
    std::string out(v.size() * 8, '\0');
    for (std::size_t i = 0; i < v.size(); ++i) {
        auto bits = std::bit_cast<std::uint64_t>(v[i]);
        for (int b = 0; b < 8; ++b) {
            out[8 * i + b] = static_cast<char>(bits & 0xff);
            bits >>= 8;
        }
    }
    return out;
}

inline std::vector<double> read_vector(std::istream& in, VectorFormat fmt) {
    const std::string data{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    if (in.bad()) throw FormatError("read failed");
    return fmt == VectorFormat::Text ? parse_text_vector(data) : parse_f64le(data);
}

inline void write_vector(std::ostream& out, const std::vector<double>& v, VectorFormat fmt) {
    const auto data = fmt == VectorFormat::Text ? format_text_vector(v) : format_f64le(v);
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
}

}  // namespace sparseproj
