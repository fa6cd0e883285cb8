#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "altsent/rng.hpp"

namespace altsent::balance {

struct SmoteConfig {
    int k_neighbors = 5;
    std::uint64_t seed = 0;
};

using Matrix = std::vector<std::vector<double>>;

namespace detail {

// Indices (into `members`) of the k nearest neighbors of members[self]
// within the same class, squared Euclidean, distance ties by lower row index.
inline std::vector<std::size_t> nearest_in_class(const Matrix& X,
                                                 const std::vector<std::size_t>& members,
                                                 std::size_t self, std::size_t k) {
    std::vector<std::pair<double, std::size_t>> dists;
    dists.reserve(members.size() - 1);
    for (std::size_t m = 0; m < members.size(); ++m) {
        if (m == self) continue;
        double d2 = 0.0;
        const auto& a = X[members[self]];
        const auto& b = X[members[m]];
        for (std::size_t c = 0; c < a.size(); ++c) {
            const double d = a[c] - b[c];
            d2 += d * d;
        }
        dists.emplace_back(d2, m);
    }
    std::sort(dists.begin(), dists.end(), [&](const auto& x, const auto& y) {
        if (x.first != y.first) return x.first < y.first;
        return members[x.second] < members[y.second];
    });
    if (dists.size() > k) dists.resize(k);
    std::vector<std::size_t> out;
    for (const auto& [d, m] : dists) out.push_back(m);
    return out;
}

}  // namespace detail

// Oversample every minority class up to the majority count. Original rows
// come first, verbatim. Synthetic row = x + u * (x_nn - x), u ~ U[0,1),
// x_nn one of x's k nearest same-class neighbors. Classes with fewer than
// k+1 members get k clamped to size-1; singleton classes are duplicated.
inline std::pair<Matrix, std::vector<int>>
smote(const Matrix& X, const std::vector<int>& labels, const SmoteConfig& cfg) {
    if (X.empty() || X.size() != labels.size()) {
        throw std::invalid_argument("smote: empty dataset or label mismatch");
    }
    if (cfg.k_neighbors < 1) throw std::invalid_argument("smote: k_neighbors must be >= 1");

    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
    std::size_t majority = 0;
    for (const auto& [c, members] : by_class) majority = std::max(majority, members.size());

    Matrix out_X = X;
    std::vector<int> out_y = labels;

    std::size_t class_index = 0;
    for (const auto& [cls, members] : by_class) {
        const std::size_t need = majority - members.size();
        const std::size_t n = members.size();
        if (need > 0) {
            const std::size_t k = std::min<std::size_t>(
                static_cast<std::size_t>(cfg.k_neighbors), n - 1);
            std::vector<std::vector<std::size_t>> neighbors(n);
            if (k > 0) {
                for (std::size_t m = 0; m < n; ++m) {
                    neighbors[m] = detail::nearest_in_class(X, members, m, k);
                }
            }
            for (std::size_t j = 0; j < need; ++j) {
                // Fixed stream per (class, synthetic index) so results do not
                // depend on evaluation order.
                rng::Engine eng(rng::derive_seed(cfg.seed, (class_index << 32) | j));
                const std::size_t base = j % n;
                std::vector<double> row = X[members[base]];
                if (k > 0) {
                    const auto& nn = neighbors[base];
                    const std::size_t pick = eng.next_below(nn.size());
                    const double u = eng.next_unit();
                    const auto& other = X[members[nn[pick]]];
                    for (std::size_t c = 0; c < row.size(); ++c) {
                        row[c] += u * (other[c] - row[c]);
                    }
                }
                out_X.push_back(std::move(row));
                out_y.push_back(cls);
            }
        }
        ++class_index;
    }
    return {std::move(out_X), std::move(out_y)};
}

}  // namespace altsent::balance
