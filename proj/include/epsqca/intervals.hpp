#pragma once

#include <algorithm>
#include <string>

#include "epsqca/errors.hpp"

namespace epsqca {

/// Half-open range of chain sites [first, last). The single interval
/// convention used everywhere; all window/block arithmetic goes through it.
struct SiteInterval {
    int first = 0;
    int last = 0;

    constexpr int size() const { return last - first; }
    constexpr bool empty() const { return last <= first; }
    constexpr bool contains(int site) const { return first <= site && site < last; }
    constexpr bool contains(const SiteInterval &other) const {
        return first <= other.first && other.last <= last;
    }
    constexpr bool overlaps(const SiteInterval &other) const {
        return std::max(first, other.first) < std::min(last, other.last);
    }
    constexpr SiteInterval shifted(int offset) const { return {first + offset, last + offset}; }

    static constexpr SiteInterval hull(const SiteInterval &a, const SiteInterval &b) {
        return {std::min(a.first, b.first), std::max(a.last, b.last)};
    }

    friend constexpr bool operator==(const SiteInterval &, const SiteInterval &) = default;

    std::string str() const {
        return "[" + std::to_string(first) + ", " + std::to_string(last) + ")";
    }
};

inline void require_valid_interval(const SiteInterval &iv, const char *what) {
    if (iv.empty())
        throw InputError(std::string(what) + ": empty or reversed interval " + iv.str());
}

/// Window of `size` sites around the cut between sites cut-1 and cut.
/// The two bridging sites are always included; of the remaining size-2
/// sites, ceil((size-2)/2) go left of the bridge and the rest right.
/// The result is clipped to [0, n).
inline SiteInterval centered_window(int cut, int size, int n) {
    if (size < 2) throw InputError("centered_window: need size >= 2 to cover the bridging term");
    if (cut < 1 || cut > n - 1) throw InputError("centered_window: cut " + std::to_string(cut) +
                                                 " outside [1, " + std::to_string(n - 1) + "]");
    const int extra = size - 2;
    const int left = (extra + 1) / 2;
    const int right = extra - left;
    SiteInterval w{cut - 1 - left, cut + 1 + right};
    w.first = std::max(w.first, 0);
    w.last = std::min(w.last, n);
    return w;
}

} // namespace epsqca
