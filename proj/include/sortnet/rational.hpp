#pragma once

#include <cstdint>
#include <numeric>
#include <string>

#include "errors.hpp"

namespace sortnet {

// Exact non-negative rational. Halver tolerances are kept as rationals so
// that count checks are integer comparisons, never float comparisons.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;

    Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
        if (den <= 0)
            throw argument_error("rational denominator must be positive");
        if (num < 0)
            throw argument_error("rational must be non-negative");
        const std::int64_t g = std::gcd(num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }

    // Accepts "3/4" or a bare integer "2". Anything else (in particular
    // decimal notation) is rejected.
    static Rational parse(const std::string& text) {
        const auto slash = text.find('/');
        try {
            std::size_t used = 0;
            if (slash == std::string::npos) {
                const std::int64_t n = std::stoll(text, &used);
                if (used != text.size())
                    throw argument_error("bad rational: '" + text + "'");
                return Rational(n, 1);
            }
            const std::string ns = text.substr(0, slash);
            const std::string ds = text.substr(slash + 1);
            const std::int64_t n = std::stoll(ns, &used);
            if (used != ns.size())
                throw argument_error("bad rational: '" + text + "'");
            const std::int64_t d = std::stoll(ds, &used);
            if (used != ds.size())
                throw argument_error("bad rational: '" + text + "'");
            return Rational(n, d);
        } catch (const std::invalid_argument&) {
            throw argument_error("bad rational: '" + text + "'");
        } catch (const std::out_of_range&) {
            throw argument_error("rational out of range: '" + text + "'");
        }
    }

    // floor(num * k / den) for k >= 0.
    std::int64_t floor_scaled(std::int64_t k) const {
        if (k < 0)
            throw argument_error("floor_scaled requires k >= 0");
        return (num * k) / den;
    }

    std::string str() const {
        return den == 1 ? std::to_string(num)
                        : std::to_string(num) + "/" + std::to_string(den);
    }

    friend bool operator==(const Rational&, const Rational&) = default;
};

} // namespace sortnet
