#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "rational.hpp"

namespace sortnet {

// Channel values over {0,1} are packed into an unsigned word: channel 1 is
// the least significant bit, channel n the most significant. All semantics
// below are defined on these packed vectors; the zero-one principle makes
// that sufficient for sorting claims.

// A comparator connects channels i < j (1-based) and routes the minimum of
// the two values to channel i, the maximum to channel j.
struct Comparator {
    int i = 0;
    int j = 0;

    friend bool operator==(const Comparator&, const Comparator&) = default;
    friend auto operator<=>(const Comparator&, const Comparator&) = default;
};

using Layer = std::vector<Comparator>;

namespace detail {

inline void check_channels(int n) {
    if (n < 1)
        throw argument_error("channel count must be >= 1");
}

inline void check_comparator(Comparator c, int n) {
    if (c.i < 1 || c.j <= c.i || c.j > n)
        throw argument_error("comparator (" + std::to_string(c.i) + "," +
                             std::to_string(c.j) + ") invalid on " +
                             std::to_string(n) + " channels");
}

inline void check_vector(std::uint32_t m, int n) {
    if (n > 31 || m >= (std::uint32_t{1} << n))
        throw argument_error("vector " + std::to_string(m) + " out of range for n=" +
                             std::to_string(n));
}

} // namespace detail

// A comparator network arranged as layers of channel-disjoint comparators.
// Size is the total comparator count, depth the number of layers. A
// sequential network is represented as one comparator per layer; empty
// networks (no layers) are legal values.
class LayeredNetwork {
public:
    explicit LayeredNetwork(int n) : n_(n) { detail::check_channels(n); }

    LayeredNetwork(int n, std::vector<Layer> layers) : n_(n), layers_(std::move(layers)) {
        detail::check_channels(n);
        for (const Layer& layer : layers_) {
            std::uint32_t used = 0;
            for (const Comparator c : layer) {
                detail::check_comparator(c, n_);
                const std::uint32_t touch =
                    (std::uint32_t{1} << (c.i - 1)) | (std::uint32_t{1} << (c.j - 1));
                if (used & touch)
                    throw argument_error("layer uses a channel twice");
                used |= touch;
            }
        }
    }

    static LayeredNetwork sequential(int n, std::span<const Comparator> comparators) {
        std::vector<Layer> layers;
        layers.reserve(comparators.size());
        for (const Comparator c : comparators)
            layers.push_back({c});
        return LayeredNetwork(n, std::move(layers));
    }

    int channels() const { return n_; }
    int depth() const { return static_cast<int>(layers_.size()); }

    int size() const {
        int s = 0;
        for (const Layer& layer : layers_)
            s += static_cast<int>(layer.size());
        return s;
    }

    const std::vector<Layer>& layers() const { return layers_; }

    friend bool operator==(const LayeredNetwork&, const LayeredNetwork&) = default;

private:
    int n_;
    std::vector<Layer> layers_;
};

// Applies one comparator to a packed vector: bits i-1 and j-1 are swapped
// exactly when channel i carries 1 and channel j carries 0. Idempotent.
inline std::uint32_t apply_comparator(std::uint32_t m, Comparator c, int n) {
    detail::check_channels(n);
    detail::check_comparator(c, n);
    detail::check_vector(m, n);
    const std::uint32_t bi = (m >> (c.i - 1)) & 1u;
    const std::uint32_t bj = (m >> (c.j - 1)) & 1u;
    if (bi == 1u && bj == 0u)
        m ^= (std::uint32_t{1} << (c.i - 1)) | (std::uint32_t{1} << (c.j - 1));
    return m;
}

// The sorted version of m: popcount(m) ones in the top channels.
inline std::uint32_t sorted_value(std::uint32_t m, int n) {
    detail::check_channels(n);
    detail::check_vector(m, n);
    const int p = std::popcount(m);
    if (p == 0)
        return 0;
    return ((std::uint32_t{1} << p) - 1u) << (n - p);
}

// Propagates a packed vector through every layer in order. Comparators
// within a layer act on disjoint channels, so intra-layer order is
// irrelevant.
inline std::uint32_t evaluate(const LayeredNetwork& net, std::uint32_t m) {
    detail::check_vector(m, net.channels());
    for (const Layer& layer : net.layers()) {
        for (const Comparator c : layer) {
            const std::uint32_t bi = (m >> (c.i - 1)) & 1u;
            const std::uint32_t bj = (m >> (c.j - 1)) & 1u;
            if (bi == 1u && bj == 0u)
                m ^= (std::uint32_t{1} << (c.i - 1)) | (std::uint32_t{1} << (c.j - 1));
        }
    }
    return m;
}

// Subset of {0 .. 2^n-1} stored as a flat occupancy bitmap. The hard n cap
// keeps the map allocable; every exhaustive check in this library runs well
// below it.
class VectorSet {
public:
    static constexpr int kMaxChannels = 24;

    explicit VectorSet(int n) : n_(n) {
        detail::check_channels(n);
        if (n > kMaxChannels)
            throw argument_error("VectorSet supports at most " +
                                 std::to_string(kMaxChannels) + " channels");
        words_.resize(((std::size_t{1} << n) + 63) / 64, 0);
    }

    int channels() const { return n_; }
    std::uint32_t universe_size() const { return std::uint32_t{1} << n_; }

    void insert(std::uint32_t m) {
        detail::check_vector(m, n_);
        words_[m >> 6] |= std::uint64_t{1} << (m & 63);
    }

    bool contains(std::uint32_t m) const {
        detail::check_vector(m, n_);
        return (words_[m >> 6] >> (m & 63)) & 1u;
    }

    std::size_t count() const {
        std::size_t c = 0;
        for (const std::uint64_t w : words_)
            c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }

    bool empty() const { return count() == 0; }

    std::vector<std::uint32_t> members() const {
        std::vector<std::uint32_t> out;
        out.reserve(count());
        for (std::uint32_t m = 0; m < universe_size(); ++m)
            if (contains(m))
                out.push_back(m);
        return out;
    }

    friend bool operator==(const VectorSet&, const VectorSet&) = default;

private:
    int n_;
    std::vector<std::uint64_t> words_;
};

// Image of evaluate over all 2^n inputs. Cardinality n+1 exactly when the
// network sorts.
inline VectorSet outputs_set(const LayeredNetwork& net) {
    VectorSet out(net.channels());
    for (std::uint32_t m = 0; m < out.universe_size(); ++m)
        out.insert(evaluate(net, m));
    return out;
}

// Inputs the network fails to sort.
inline VectorSet notsorted_set(const LayeredNetwork& net) {
    VectorSet out(net.channels());
    const int n = net.channels();
    for (std::uint32_t m = 0; m < out.universe_size(); ++m)
        if (evaluate(net, m) != sorted_value(m, n))
            out.insert(m);
    return out;
}

enum class NetworkClass {
    Sorting,
    SingleException,
    Halver,
};

inline std::string to_string(NetworkClass cls) {
    switch (cls) {
    case NetworkClass::Sorting: return "sorting";
    case NetworkClass::SingleException: return "single-exception";
    case NetworkClass::Halver: return "halver";
    }
    return "?";
}

inline NetworkClass network_class_from_string(const std::string& s) {
    if (s == "sorting")
        return NetworkClass::Sorting;
    if (s == "single-exception")
        return NetworkClass::SingleException;
    if (s == "halver")
        return NetworkClass::Halver;
    throw argument_error("unknown network class '" + s + "'");
}

struct HalverViolation {
    std::uint32_t input = 0;
    int k = 0; // count of extreme elements whose placement failed

    friend bool operator==(const HalverViolation&, const HalverViolation&) = default;
};

// Outcome of the exhaustive binary-input check for one network class.
struct CertificationRecord {
    NetworkClass cls = NetworkClass::Sorting;
    bool verdict = false;
    std::uint64_t unsorted_count = 0;              // sorting / single-exception
    std::optional<std::uint32_t> unsorted_input;   // first (unique, if single-exception)
    std::optional<HalverViolation> violation;      // halver evidence
};

// Brute-force certification over all 2^n binary inputs. This is the oracle
// every decoded SAT witness must pass.
//
// sorting:          no unsorted input.
// single-exception: exactly one unsorted input.
// halver(eps):      on n = 2h channels, an input with p <= h ones leaves at
//                   most floor(eps*p) ones in channels 1..h, and an input
//                   with z <= h zeros leaves at most floor(eps*z) zeros in
//                   channels h+1..n.
inline CertificationRecord certify(const LayeredNetwork& net, NetworkClass cls,
                                   Rational eps = Rational(0, 1)) {
    const int n = net.channels();
    if (n > VectorSet::kMaxChannels)
        throw argument_error("certification supports at most 24 channels");
    CertificationRecord rec;
    rec.cls = cls;

    if (cls == NetworkClass::Halver) {
        if (n % 2 != 0)
            throw argument_error("halver certification requires an even channel count");
        const int half = n / 2;
        const std::uint32_t low_mask = (std::uint32_t{1} << half) - 1u;
        rec.verdict = true;
        for (std::uint32_t m = 0; m < (std::uint32_t{1} << n); ++m) {
            const std::uint32_t out = evaluate(net, m);
            const int p = std::popcount(m);
            const int z = n - p;
            if (p <= half) {
                const int ones_low = std::popcount(out & low_mask);
                if (ones_low > eps.floor_scaled(p)) {
                    rec.verdict = false;
                    rec.violation = HalverViolation{m, p};
                    break;
                }
            }
            if (z <= half) {
                const int zeros_high = half - std::popcount(out >> half);
                if (zeros_high > eps.floor_scaled(z)) {
                    rec.verdict = false;
                    rec.violation = HalverViolation{m, z};
                    break;
                }
            }
        }
        return rec;
    }

    for (std::uint32_t m = 0; m < (std::uint32_t{1} << n); ++m) {
        if (evaluate(net, m) != sorted_value(m, n)) {
            ++rec.unsorted_count;
            if (!rec.unsorted_input)
                rec.unsorted_input = m;
            if (cls == NetworkClass::Sorting)
                break; // one counterexample refutes
        }
    }
    rec.verdict = (cls == NetworkClass::Sorting) ? rec.unsorted_count == 0
                                                 : rec.unsorted_count == 1;
    if (cls == NetworkClass::SingleException && !rec.verdict)
        rec.unsorted_input.reset(); // evidence only meaningful when unique
    return rec;
}

// Deterministic text diagram, one line per channel. Each comparator is
// drawn as a vertical link ('o' endpoints, '|' across intermediate
// channels); comparators of one layer share a column when their spans do
// not overlap, and layers are separated by a wider gap.
inline std::string render_ascii(const LayeredNetwork& net) {
    const int n = net.channels();
    std::vector<std::string> lines(static_cast<std::size_t>(n), "--");

    for (const Layer& layer : net.layers()) {
        // Greedy column packing; deterministic for a fixed comparator order.
        Layer sorted_layer = layer;
        std::sort(sorted_layer.begin(), sorted_layer.end());
        std::vector<Layer> columns;
        for (const Comparator c : sorted_layer) {
            bool placed = false;
            for (Layer& col : columns) {
                const bool overlaps = std::any_of(col.begin(), col.end(), [&](Comparator o) {
                    return !(c.j < o.i || o.j < c.i);
                });
                if (!overlaps) {
                    col.push_back(c);
                    placed = true;
                    break;
                }
            }
            if (!placed)
                columns.push_back({c});
        }
        for (const Layer& col : columns) {
            for (int ch = 1; ch <= n; ++ch) {
                char glyph = '-';
                for (const Comparator c : col) {
                    if (ch == c.i || ch == c.j)
                        glyph = 'o';
                    else if (ch > c.i && ch < c.j)
                        glyph = '|';
                }
                lines[static_cast<std::size_t>(ch - 1)] += glyph;
                lines[static_cast<std::size_t>(ch - 1)] += '-';
            }
        }
        for (std::string& line : lines)
            line += '-';
    }

    std::string out;
    for (std::string& line : lines) {
        line += '-';
        out += line;
        out += '\n';
    }
    return out;
}

} // namespace sortnet
