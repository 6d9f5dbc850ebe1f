#pragma once

// Shared test oracles: chi-square goodness of fit and a BFS shortest-path
// reference, kept independent of the library's implementation paths.

#include <cmath>
#include <cstdint>
#include <deque>
#include <vector>

#include "auvsim/grid.hpp"

namespace testutil {

inline double gamma_p_series(double a, double x) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int n = 0; n < 1000; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-13) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

inline double gamma_q_contfrac(double a, double x) {
    double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
    for (int i = 1; i <= 1000; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-13) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

// upper regularized incomplete gamma Q(a, x)
inline double gamma_q(double a, double x) {
    if (x <= 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_contfrac(a, x);
}

inline double chi2_pvalue(double stat, int dof) {
    return gamma_q(static_cast<double>(dof) / 2.0, stat / 2.0);
}

// Pearson statistic of observed counts against an expected pmf.
inline double chi2_stat(const std::vector<int64_t>& counts, const std::vector<double>& pmf,
                        int64_t total) {
    double stat = 0.0;
    for (size_t i = 0; i < counts.size(); ++i) {
        double expected = pmf[i] * static_cast<double>(total);
        double diff = static_cast<double>(counts[i]) - expected;
        stat += diff * diff / expected;
    }
    return stat;
}

// 4-neighbor shortest path length over non-obstacle cells; -1 if unreachable.
inline int bfs_shortest(const auvsim::GridMap& map, auvsim::Coord from, auvsim::Coord to) {
    using auvsim::Coord;
    if (from == to) return 0;
    const int n = map.n;
    std::vector<int> dist(static_cast<size_t>(n) * n, -1);
    auto idx = [n](Coord x) { return static_cast<size_t>(x.r - 1) * n + (x.c - 1); };
    std::deque<Coord> queue{from};
    dist[idx(from)] = 0;
    while (!queue.empty()) {
        Coord cur = queue.front();
        queue.pop_front();
        for (auto [dc, dr] : auvsim::kMoveDelta) {
            Coord nxt{cur.c + dc, cur.r + dr};
            if (!map.in_bounds(nxt) || map.at(nxt) == auvsim::Cell::obstacle) continue;
            if (dist[idx(nxt)] != -1) continue;
            dist[idx(nxt)] = dist[idx(cur)] + 1;
            if (nxt == to) return dist[idx(nxt)];
            queue.push_back(nxt);
        }
    }
    return -1;
}

}  // namespace testutil
