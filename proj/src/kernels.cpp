// Copyright (C) 2026 The recap authors
// SPDX-License-Identifier: Apache-2.0

#include "recap/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

namespace recap {
namespace {

void check_ssim_args(const LumaPlane& a, const LumaPlane& b, const SsimParams& p) {
    if (a.width() != b.width() || a.height() != b.height())
        throw DimensionMismatch("ssim: planes differ in size (" + std::to_string(a.width()) + "x" +
                                std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                                std::to_string(b.height()) + ")");
    if (p.window < 3 || p.window % 2 == 0)
        throw std::invalid_argument("ssim: window must be odd and >= 3");
    if (p.window > std::min(a.width(), a.height()))
        throw std::invalid_argument("ssim: window larger than plane");
}

struct ColumnSums {
    std::vector<std::int64_t> a, b, aa, bb, ab;
    explicit ColumnSums(int w) : a(w), b(w), aa(w), bb(w), ab(w) {}

    void add_row(const LumaPlane& pa, const LumaPlane& pb, int y, int sign) {
        const auto ra = pa.row(y);
        const auto rb = pb.row(y);
        for (std::size_t x = 0; x < ra.size(); ++x) {
            const std::int64_t va = ra[x];
            const std::int64_t vb = rb[x];
            a[x] += sign * va;
            b[x] += sign * vb;
            aa[x] += sign * va * va;
            bb[x] += sign * vb * vb;
            ab[x] += sign * va * vb;
        }
    }
};

// Sums the per-window SSIM of output rows [row_begin, row_end) into row_sums.
void ssim_rows(const LumaPlane& pa, const LumaPlane& pb, const SsimParams& p, int row_begin,
               int row_end, std::vector<double>& row_sums) {
    const int win = p.window;
    const int out_w = pa.width() - win + 1;
    const std::int64_t n = static_cast<std::int64_t>(win) * win;
    const double nd = static_cast<double>(n);
    const double n2 = nd * nd;

    ColumnSums cols(pa.width());
    for (int y = row_begin; y < row_begin + win; ++y) cols.add_row(pa, pb, y, +1);

    for (int y = row_begin; y < row_end; ++y) {
        std::int64_t sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
        for (int x = 0; x < win; ++x) {
            sa += cols.a[x];
            sb += cols.b[x];
            saa += cols.aa[x];
            sbb += cols.bb[x];
            sab += cols.ab[x];
        }
        double row_sum = 0;
        for (int x = 0;; ++x) {
            const double mu_a = sa / nd;
            const double mu_b = sb / nd;
            const double var_a = static_cast<double>(n * saa - sa * sa) / n2;
            const double var_b = static_cast<double>(n * sbb - sb * sb) / n2;
            const double cov = static_cast<double>(n * sab - sa * sb) / n2;
            const double num = (2 * mu_a * mu_b + p.c1) * (2 * cov + p.c2);
            const double den = (mu_a * mu_a + mu_b * mu_b + p.c1) * (var_a + var_b + p.c2);
            row_sum += num / den;
            if (x + 1 >= out_w) break;
            const int out = x, in = x + win;
            sa += cols.a[in] - cols.a[out];
            sb += cols.b[in] - cols.b[out];
            saa += cols.aa[in] - cols.aa[out];
            sbb += cols.bb[in] - cols.bb[out];
            sab += cols.ab[in] - cols.ab[out];
        }
        row_sums[y] = row_sum;
        if (y + 1 < row_end) {
            cols.add_row(pa, pb, y, -1);
            cols.add_row(pa, pb, y + win, +1);
        }
    }
}

double finish_ssim(const std::vector<double>& row_sums, int out_w) {
    double total = 0;
    for (double s : row_sums) total += s;
    return total / (static_cast<double>(out_w) * static_cast<double>(row_sums.size()));
}

// ---------------------------------------------------------------------------

struct StripGeometry {
    int first_row;
    int rows;
    std::int64_t sum;
    std::int64_t var_num;  // n * sum(t^2) - sum(t)^2
};

struct NccSetup {
    int width, height, folds, radius;
    std::vector<StripGeometry> strips;
    std::vector<std::int64_t> prefix, prefix_sq;  // per-row prefix sums of cur
};

NccSetup prepare_ncc(const LumaPlane& prev, const LumaPlane& cur, int folds, int radius) {
    if (prev.width() != cur.width() || prev.height() != cur.height())
        throw DimensionMismatch("match_strips: frame sizes differ");
    if (folds < 1 || folds > prev.height()) throw std::invalid_argument("match_strips: bad fold count");
    if (radius < 0) throw std::invalid_argument("match_strips: negative search radius");

    NccSetup s{prev.width(), prev.height(), folds, radius, {}, {}, {}};
    const std::int64_t w = s.width;
    for (int k = 0; k < folds; ++k) {
        const int r0 = static_cast<int>(static_cast<long>(k) * s.height / folds);
        const int r1 = static_cast<int>(static_cast<long>(k + 1) * s.height / folds);
        std::int64_t sum = 0, sq = 0;
        for (int y = r0; y < r1; ++y)
            for (std::uint8_t v : prev.row(y)) {
                sum += v;
                sq += static_cast<std::int64_t>(v) * v;
            }
        const std::int64_t n = w * (r1 - r0);
        s.strips.push_back({r0, r1 - r0, sum, n * sq - sum * sum});
    }
    s.prefix.assign(s.height + 1, 0);
    s.prefix_sq.assign(s.height + 1, 0);
    for (int y = 0; y < s.height; ++y) {
        std::int64_t sum = 0, sq = 0;
        for (std::uint8_t v : cur.row(y)) {
            sum += v;
            sq += static_cast<std::int64_t>(v) * v;
        }
        s.prefix[y + 1] = s.prefix[y] + sum;
        s.prefix_sq[y + 1] = s.prefix_sq[y] + sq;
    }
    return s;
}

constexpr double kNoCandidate = -std::numeric_limits<double>::infinity();

double strip_correlation(const LumaPlane& prev, const LumaPlane& cur, const NccSetup& s,
                         const StripGeometry& g, int shift) {
    const int top = g.first_row + shift;
    if (top < 0 || top + g.rows > s.height) return kNoCandidate;
    const std::int64_t n = static_cast<std::int64_t>(s.width) * g.rows;
    const std::int64_t sum_c = s.prefix[top + g.rows] - s.prefix[top];
    const std::int64_t var_c = n * (s.prefix_sq[top + g.rows] - s.prefix_sq[top]) - sum_c * sum_c;
    std::int64_t cross = 0;
    for (int i = 0; i < g.rows; ++i) {
        const std::uint8_t* rt = prev.row(g.first_row + i).data();
        const std::uint8_t* rc = cur.row(top + i).data();
        std::int32_t acc = 0;
        for (int x = 0; x < s.width; ++x) acc += static_cast<std::int32_t>(rt[x]) * rc[x];
        cross += acc;
    }
    if (var_c <= 0) return 0.0;
    const double num = static_cast<double>(n * cross - g.sum * sum_c);
    return num / std::sqrt(static_cast<double>(g.var_num) * static_cast<double>(var_c));
}

std::vector<StripMatch> pick_best(const NccSetup& s, const std::vector<double>& grid) {
    const int span = 2 * s.radius + 1;
    std::vector<StripMatch> out;
    out.reserve(s.strips.size());
    for (std::size_t k = 0; k < s.strips.size(); ++k) {
        const auto& g = s.strips[k];
        StripMatch m;
        m.first_row = g.first_row;
        m.rows = g.rows;
        m.textured = g.var_num > 0;
        double best = kNoCandidate;
        int best_shift = 0;
        for (int mag = 0; mag <= s.radius; ++mag) {
            for (int shift : {-mag, mag}) {
                if (mag == 0 && shift != -mag) continue;
                const double c = grid[k * span + (shift + s.radius)];
                if (c > best) {
                    best = c;
                    best_shift = shift;
                }
            }
        }
        m.displacement = -best_shift;
        m.correlation = m.textured && best != kNoCandidate ? best : 0.0;
        out.push_back(m);
    }
    return out;
}

}  // namespace

double ssim_serial(const LumaPlane& a, const LumaPlane& b, const SsimParams& params) {
    check_ssim_args(a, b, params);
    const int out_h = a.height() - params.window + 1;
    std::vector<double> row_sums(out_h);
    ssim_rows(a, b, params, 0, out_h, row_sums);
    return finish_ssim(row_sums, a.width() - params.window + 1);
}

double ssim(const LumaPlane& a, const LumaPlane& b, const SsimParams& params) {
    check_ssim_args(a, b, params);
    const int out_h = a.height() - params.window + 1;
    std::vector<double> row_sums(out_h);
#pragma omp parallel
    {
        const int threads = omp_get_num_threads();
        const int t = omp_get_thread_num();
        const int begin = static_cast<int>(static_cast<long>(out_h) * t / threads);
        const int end = static_cast<int>(static_cast<long>(out_h) * (t + 1) / threads);
        if (begin < end) ssim_rows(a, b, params, begin, end, row_sums);
    }
    return finish_ssim(row_sums, a.width() - params.window + 1);
}

std::vector<StripMatch> match_strips_serial(const LumaPlane& prev, const LumaPlane& cur, int folds,
                                            int search_radius) {
    const NccSetup s = prepare_ncc(prev, cur, folds, search_radius);
    const int span = 2 * search_radius + 1;
    std::vector<double> grid(static_cast<std::size_t>(folds) * span, kNoCandidate);
    for (int k = 0; k < folds; ++k) {
        if (s.strips[k].var_num <= 0) continue;
        for (int j = 0; j < span; ++j)
            grid[k * span + j] = strip_correlation(prev, cur, s, s.strips[k], j - search_radius);
    }
    return pick_best(s, grid);
}

std::vector<StripMatch> match_strips(const LumaPlane& prev, const LumaPlane& cur, int folds,
                                     int search_radius) {
    const NccSetup s = prepare_ncc(prev, cur, folds, search_radius);
    const int span = 2 * search_radius + 1;
    const int cells = folds * span;
    std::vector<double> grid(static_cast<std::size_t>(cells), kNoCandidate);
#pragma omp parallel for schedule(dynamic, 16)
    for (int cell = 0; cell < cells; ++cell) {
        const int k = cell / span;
        if (s.strips[k].var_num <= 0) continue;
        grid[cell] = strip_correlation(prev, cur, s, s.strips[k], cell % span - search_radius);
    }
    return pick_best(s, grid);
}

}  // namespace recap
