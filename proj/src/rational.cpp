#include "appl/rational.hpp"

#include <cctype>
#include <functional>

namespace appl {

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

} // namespace

std::optional<Rational> parse_rational(std::string_view text) {
    bool negative = false;
    if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
        negative = text.front() == '-';
        text.remove_prefix(1);
    }
    Rational out;
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        auto num = text.substr(0, slash);
        auto den = text.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den)) return std::nullopt;
        mpz_class n(std::string(num), 10);
        mpz_class d(std::string(den), 10);
        if (d == 0) return std::nullopt;
        out = Rational(n, d);
    } else if (auto dot = text.find('.'); dot != std::string_view::npos) {
        auto whole = text.substr(0, dot);
        auto frac = text.substr(dot + 1);
        if (whole.empty() && frac.empty()) return std::nullopt;
        if ((!whole.empty() && !all_digits(whole)) || (!frac.empty() && !all_digits(frac)))
            return std::nullopt;
        std::string digits = std::string(whole) + std::string(frac);
        mpz_class n(digits.empty() ? std::string("0") : digits, 10);
        mpz_class d;
        mpz_ui_pow_ui(d.get_mpz_t(), 10, frac.size());
        out = Rational(n, d);
    } else {
        if (!all_digits(text)) return std::nullopt;
        out = Rational(mpz_class(std::string(text), 10));
    }
    out.canonicalize();
    if (negative) out = -out;
    return out;
}

std::string to_string(const Rational& q) { return q.get_str(10); }

std::size_t hash_value(const Rational& q) {
    std::size_t h = std::hash<std::string>{}(q.get_str(16));
    return h;
}

Rational from_double(double v) {
    Rational q(v);
    q.canonicalize();
    return q;
}

} // namespace appl
