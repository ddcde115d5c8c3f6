#pragma once

// Codebook data model: contiguous interval partition, one codepoint per
// cell, assertion log-probabilities, the two-part codelength, and the
// fixed-codebook pointwise assignment rule.

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "model.hpp"
#include "numerics.hpp"

namespace esmml {

struct Cell {
    int lo = 0;  // inclusive
    int hi = 0;  // exclusive

    bool operator==(const Cell&) const = default;
};

struct Partition {
    std::vector<Cell> cells;

    bool operator==(const Partition&) const = default;
};

inline void validate_partition(const Partition& p, int support_size) {
    if (p.cells.empty()) throw std::invalid_argument("partition: no cells");
    int expect = 0;
    for (const auto& c : p.cells) {
        if (c.lo != expect || c.hi <= c.lo)
            throw std::invalid_argument("partition: cells must be contiguous nonempty intervals");
        expect = c.hi;
    }
    if (expect != support_size)
        throw std::invalid_argument("partition: cells must cover the support");
}

struct Codebook {
    Partition partition;
    std::vector<double> codepoints;
    std::vector<double> log_q;
};

inline int cell_index(const Codebook& cb, int x) {
    for (std::size_t j = 0; j < cb.partition.cells.size(); ++j)
        if (x >= cb.partition.cells[j].lo && x < cb.partition.cells[j].hi)
            return static_cast<int>(j);
    throw std::invalid_argument("cell_index: x outside support");
}

inline double two_part_codelength(const Codebook& cb, const Model& m, int x) {
    if (x < 0 || x >= m.support_size)
        throw std::invalid_argument("two_part_codelength: x outside support");
    const int j = cell_index(cb, x);
    return -cb.log_q[j] - log_pmf(m, x, cb.codepoints[j]);
}

inline std::vector<double> codelength_profile(const Codebook& cb, const Model& m) {
    std::vector<double> lam(m.support_size);
    for (int x = 0; x < m.support_size; ++x) lam[x] = two_part_codelength(cb, m, x);
    return lam;
}

struct Assignment {
    Partition partition;
    std::vector<double> codepoints;  // surviving codepoints, cell order
    std::vector<double> log_q;       // renormalized over surviving cells
};

// Pointwise minimum-codelength rule at fixed (q, theta). Ties break toward
// the lower cell index; emptied cells are dropped and q renormalized. The
// result must be a contiguous interval partition; a non-interval outcome is
// an internal error, not a recoverable condition.
inline Assignment assign_partition(const Model& m, std::vector<double> codepoints,
                                   std::vector<double> log_q) {
    if (codepoints.empty() || codepoints.size() != log_q.size())
        throw std::invalid_argument("assign_partition: codepoints/log_q size mismatch");
    const std::size_t k = codepoints.size();
    std::vector<int> label(m.support_size);
    for (int x = 0; x < m.support_size; ++x) {
        double best = pos_inf;
        int arg = 0;
        for (std::size_t j = 0; j < k; ++j) {
            const double len = -log_q[j] - log_pmf(m, x, codepoints[j]);
            if (len < best) {
                best = len;
                arg = static_cast<int>(j);
            }
        }
        label[x] = arg;
    }

    Assignment out;
    int start = 0;
    for (int x = 1; x <= m.support_size; ++x) {
        if (x == m.support_size || label[x] != label[start]) {
            out.partition.cells.push_back({start, x});
            out.codepoints.push_back(codepoints[label[start]]);
            out.log_q.push_back(log_q[label[start]]);
            start = x;
        }
    }
    // interval structure: each original index appears in at most one run
    std::vector<int> seen(k, 0);
    for (const auto& c : out.partition.cells) {
        if (seen[label[c.lo]]++)
            throw std::logic_error("assign_partition: non-interval assignment");
    }
    const double z = log_sum_exp(out.log_q);
    for (auto& q : out.log_q) q -= z;
    validate_partition(out.partition, m.support_size);
    return out;
}

}  // namespace esmml
