#include "siopt/units.hpp"
#include "siopt/errors.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>

namespace siopt::units {

namespace {

bool iequal(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i]))) return false;
    }
    return true;
}

bool scale_for(std::string_view rest, double& scale, size_t& used) {
    if (rest.size() >= 3 && iequal(rest.substr(0, 3), "meg")) {
        scale = 1e6;
        used = 3;
        return true;
    }
    if (rest.empty()) return false;
    switch (std::tolower(static_cast<unsigned char>(rest[0]))) {
        case 'k': scale = 1e3;  used = 1; return true;
        case 'm': scale = 1e-3; used = 1; return true;
        case 'u': scale = 1e-6; used = 1; return true;
        case 'n': scale = 1e-9; used = 1; return true;
        case 'p': scale = 1e-12; used = 1; return true;
        case 'f': scale = 1e-15; used = 1; return true;
        default: return false;
    }
}

} // namespace

double suffix_scale(std::string_view suffix) {
    double scale;
    size_t used;
    if (!scale_for(suffix, scale, used) || used != suffix.size())
        throw ParseError("unknown unit suffix '" + std::string(suffix) + "'");
    return scale;
}

bool try_parse_number(std::string_view text, double& out) {
    if (text.empty()) return false;
    if (text.front() == '+') text.remove_prefix(1);  // from_chars rejects a leading '+'
    if (text.empty()) return false;
    const char* begin = text.data();
    const char* end = text.data() + text.size();

    double mantissa = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, mantissa);
    if (ec != std::errc() || ptr == begin) return false;

    std::string_view rest(ptr, static_cast<size_t>(end - ptr));
    double scale = 1.0;
    size_t used = 0;
    if (!rest.empty() && scale_for(rest, scale, used)) {
        rest.remove_prefix(used);
    } else {
        scale = 1.0;
    }
    // Remaining characters may only be unit letters ("s", "m", "hz", ...).
    for (char c : rest) {
        if (!std::isalpha(static_cast<unsigned char>(c))) return false;
    }
    out = mantissa * scale;
    return true;
}

double parse_number(std::string_view text) {
    double v;
    if (!try_parse_number(text, v))
        throw ParseError("malformed numeric literal '" + std::string(text) + "'");
    return v;
}

std::string render(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc()) throw Error("number render failed");
    return std::string(buf, ptr);
}

std::string render(double value, std::string_view suffix) {
    const double scale = suffix_scale(suffix);
    return render(value / scale) + std::string(suffix);
}

} // namespace siopt::units
