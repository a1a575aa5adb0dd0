#include "dsw/rng.hpp"

#include <algorithm>
#include <unordered_set>

namespace dsw {

std::vector<std::uint64_t> Rng::sample_without_replacement(std::uint64_t n, std::uint64_t k) {
    std::vector<std::uint64_t> out;
    if (k >= n) {
        out.resize(n);
        for (std::uint64_t i = 0; i < n; ++i) out[i] = i;
        return out;
    }
    std::unordered_set<std::uint64_t> chosen;
    chosen.reserve(static_cast<std::size_t>(k) * 2);
    for (std::uint64_t j = n - k; j < n; ++j) {
        const std::uint64_t t = below(j + 1);
        if (chosen.count(t)) {
            chosen.insert(j);
        } else {
            chosen.insert(t);
        }
    }
    out.assign(chosen.begin(), chosen.end());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace dsw
