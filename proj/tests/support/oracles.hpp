// Copyright (C) 2026 The recap authors
// SPDX-License-Identifier: Apache-2.0

// Slow, obviously-correct reference implementations used as test oracles.

#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "recap/image.hpp"

namespace recap::testing {

// Window-by-window SSIM with no running sums.
inline double naive_ssim(const LumaPlane& a, const LumaPlane& b, int win = 7) {
    const double c1 = (0.01 * 255) * (0.01 * 255), c2 = (0.03 * 255) * (0.03 * 255);
    const double n = static_cast<double>(win) * win;
    double total = 0;
    long count = 0;
    for (int y0 = 0; y0 + win <= a.height(); ++y0) {
        for (int x0 = 0; x0 + win <= a.width(); ++x0) {
            double ma = 0, mb = 0;
            for (int y = y0; y < y0 + win; ++y)
                for (int x = x0; x < x0 + win; ++x) {
                    ma += a.at(x, y);
                    mb += b.at(x, y);
                }
            ma /= n;
            mb /= n;
            double va = 0, vb = 0, cov = 0;
            for (int y = y0; y < y0 + win; ++y)
                for (int x = x0; x < x0 + win; ++x) {
                    const double da = a.at(x, y) - ma, db = b.at(x, y) - mb;
                    va += da * da;
                    vb += db * db;
                    cov += da * db;
                }
            va /= n;
            vb /= n;
            cov /= n;
            total += (2 * ma * mb + c1) * (2 * cov + c2) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
            ++count;
        }
    }
    return total / static_cast<double>(count);
}

struct CommonBlock {
    std::size_t a = 0, b = 0, size = 0;
};

// Longest common block of a[alo,ahi) and b[blo,bhi) by trying every pair of
// start positions. Ties prefer the smaller start in `a`, then in `b`.
inline CommonBlock brute_longest_block(const std::string& a, const std::string& b, std::size_t alo, std::size_t ahi,
                                       std::size_t blo, std::size_t bhi) {
    CommonBlock best{alo, blo, 0};
    for (std::size_t i = alo; i < ahi; ++i) {
        for (std::size_t j = blo; j < bhi; ++j) {
            std::size_t k = 0;
            while (i + k < ahi && j + k < bhi && a[i + k] == b[j + k]) ++k;
            if (k > best.size) best = {i, j, k};
        }
    }
    return best;
}

// Marks every character of `after` covered by the recursive longest-block
// alignment against `before`.
inline void mark_common(const std::string& before, const std::string& after, std::size_t alo, std::size_t ahi,
                        std::size_t blo, std::size_t bhi, std::vector<bool>& covered) {
    if (alo >= ahi || blo >= bhi) return;
    const CommonBlock m = brute_longest_block(before, after, alo, ahi, blo, bhi);
    if (m.size == 0) return;
    for (std::size_t k = 0; k < m.size; ++k) covered[m.b + k] = true;
    mark_common(before, after, alo, m.a, blo, m.b, covered);
    mark_common(before, after, m.a + m.size, ahi, m.b + m.size, bhi, covered);
}

// Text of `after` outside the alignment, whitespace-only gaps dropped, trimmed.
inline std::string oracle_text_diff(const std::string& before, const std::string& after) {
    std::vector<bool> covered(after.size(), false);
    mark_common(before, after, 0, before.size(), 0, after.size(), covered);
    std::string out, gap;
    auto flush = [&] {
        if (gap.find_first_not_of(" \t\n\r\f\v") != std::string::npos) out += gap;
        gap.clear();
    };
    for (std::size_t i = 0; i < after.size(); ++i) {
        if (covered[i]) flush();
        else gap.push_back(after[i]);
    }
    flush();
    const auto first = out.find_first_not_of(" \t\n\r\f\v");
    if (first == std::string::npos) return "";
    const auto last = out.find_last_not_of(" \t\n\r\f\v");
    return out.substr(first, last - first + 1);
}

inline LumaPlane random_plane(int w, int h, std::mt19937& rng) {
    LumaPlane p(w, h);
    std::uniform_int_distribution<int> d(0, 255);
    for (auto& v : p.values()) v = static_cast<std::uint8_t>(d(rng));
    return p;
}

}  // namespace recap::testing
