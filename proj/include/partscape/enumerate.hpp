#pragma once

#include <cstdint>
#include <vector>

#include "partscape/error.hpp"
#include "partscape/partition.hpp"

namespace partscape {

/// Stirling number of the second kind S(n, s) by S(n,s) = s S(n-1,s) + S(n-1,s-1).
inline std::uint64_t stirling2(std::size_t n, std::size_t s) {
    std::vector<std::uint64_t> row(s + 1, 0);
    row[0] = 1;  // S(0,0)
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = std::min(i, s); j >= 1; --j) row[j] = j * row[j] + row[j - 1];
        row[0] = 0;
    }
    return row[s];
}

/// Every partition of n points into exactly s nonempty clusters, canonical
/// form, in lexicographic order of the restricted-growth label string.
/// Test-scale only: n is capped at 12.
inline std::vector<Partition> enumerate_partitions(std::size_t n, std::size_t s) {
    if (n > 12) throw ScaleError("enumerate_partitions is limited to n <= 12");
    if (s < 1 || s > n) throw ParameterError("enumerate_partitions needs 1 <= s <= n");

    std::vector<Partition> out;
    std::vector<Label> labels(n, 0);
    // prefix_max[i] = max label among labels[0..i]
    std::vector<Label> prefix_max(n, 0);

    auto emit_if_complete = [&] {
        if (prefix_max[n - 1] + 1u == s) out.emplace_back(labels, s);
    };

    // Iterative odometer over restricted-growth strings: labels[0] = 0 and
    // labels[i] <= prefix_max[i-1] + 1, additionally bounded by s-1.
    emit_if_complete();
    while (true) {
        std::size_t pos = 0;
        for (std::size_t i = n; i-- > 1;) {
            const Label bound = std::min<Label>(prefix_max[i - 1] + 1u, static_cast<Label>(s - 1));
            if (labels[i] < bound) {
                pos = i;
                break;
            }
        }
        if (pos == 0) break;
        ++labels[pos];
        prefix_max[pos] = std::max(prefix_max[pos - 1], labels[pos]);
        for (std::size_t j = pos + 1; j < n; ++j) {
            labels[j] = 0;
            prefix_max[j] = prefix_max[j - 1];
        }
        emit_if_complete();
    }
    return out;
}

}  // namespace partscape
