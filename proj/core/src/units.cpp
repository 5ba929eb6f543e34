#include "biphoton/units.hpp"

#include <array>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string_view>

#include "biphoton/errors.hpp"

namespace biphoton::units {
namespace {

struct Suffix {
    std::string_view name;
    int exp10;     // decimal exponent shift for power-of-ten units
    double factor; // residual multiplier (only deg is not a power of ten)
};

bool plain_decimal(std::string_view t) {
    std::size_t i = 0;
    if (i < t.size() && (t[i] == '+' || t[i] == '-')) ++i;
    bool digits = false;
    while (i < t.size() && t[i] >= '0' && t[i] <= '9') ++i, digits = true;
    if (i < t.size() && t[i] == '.') {
        ++i;
        while (i < t.size() && t[i] >= '0' && t[i] <= '9') ++i, digits = true;
    }
    if (!digits) return false;
    if (i < t.size() && (t[i] == 'e' || t[i] == 'E')) {
        ++i;
        if (i < t.size() && (t[i] == '+' || t[i] == '-')) ++i;
        if (i == t.size()) return false;
        while (i < t.size() && t[i] >= '0' && t[i] <= '9') ++i;
    }
    return i == t.size();
}

// Rescales by editing the decimal exponent in the text and parsing once, so
// "0.13 mm" and 1.3e-4 round to the identical double. Multiplying the parsed
// mantissa by a converted scale can differ from that by one ulp, which would
// break the config-digest invariance between unit spellings.
double parse_shifted(const std::string& number, int shift) {
    std::string respelled;
    const auto epos = number.find_first_of("eE");
    if (epos == std::string::npos) {
        respelled = number + "e" + std::to_string(shift);
    } else {
        const int old_exp = std::atoi(number.c_str() + epos + 1);
        respelled = number.substr(0, epos) + "e" + std::to_string(old_exp + shift);
    }
    return std::strtod(respelled.c_str(), nullptr);
}

double parse_with_suffixes(const std::string& text, const Suffix* table, std::size_t n,
                           const char* kind) {
    std::string_view sv(text);
    while (!sv.empty() && (sv.front() == ' ' || sv.front() == '\t')) sv.remove_prefix(1);
    while (!sv.empty() && (sv.back() == ' ' || sv.back() == '\t')) sv.remove_suffix(1);
    if (sv.empty()) throw InvalidParameter(std::string("empty ") + kind + " value");

    errno = 0;
    char* end = nullptr;
    std::string owned(sv);
    double v = std::strtod(owned.c_str(), &end);
    if (end == owned.c_str() || errno == ERANGE)
        throw InvalidParameter(std::string("cannot parse ") + kind + " '" + text + "'");

    std::string_view rest(end);
    while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
    if (rest.empty()) return v; // bare number, already SI

    const std::string number(owned.c_str(), static_cast<std::size_t>(end - owned.c_str()));
    for (std::size_t i = 0; i < n; ++i) {
        if (rest != table[i].name) continue;
        if (!plain_decimal(std::string_view(number)))
            throw InvalidParameter(std::string("cannot parse ") + kind + " '" + text + "'");
        const double shifted = parse_shifted(number, table[i].exp10);
        return table[i].factor == 1.0 ? shifted : shifted * table[i].factor;
    }
    throw InvalidParameter(std::string("unknown ") + kind + " unit '" + std::string(rest) +
                           "' in '" + text + "'");
}

} // namespace

double parse_length(const std::string& text) {
    static const std::array<Suffix, 6> table{{
        {"nm", -9, 1.0},
        {"um", -6, 1.0},
        {"mm", -3, 1.0},
        {"cm", -2, 1.0},
        {"m", 0, 1.0},
        {"km", 3, 1.0},
    }};
    return parse_with_suffixes(text, table.data(), table.size(), "length");
}

double parse_angle(const std::string& text) {
    static const std::array<Suffix, 4> table{{
        {"rad", 0, 1.0},
        {"mrad", -3, 1.0},
        {"urad", -6, 1.0},
        {"deg", 0, std::numbers::pi / 180.0},
    }};
    return parse_with_suffixes(text, table.data(), table.size(), "angle");
}

std::string format_double(double v) {
    std::array<char, 64> buf;
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc()) throw InvalidParameter("format_double failed");
    return std::string(buf.data(), ptr);
}

} // namespace biphoton::units
