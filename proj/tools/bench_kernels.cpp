// Copyright (C) 2026 The recap authors
// SPDX-License-Identifier: Apache-2.0

// Times each OpenMP kernel against its serial twin on synthetic planes and
// checks that both produce the same answer.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include <CLI11.hpp>
#include <omp.h>

#include "recap/kernels.hpp"

using namespace recap;

namespace {

LumaPlane random_plane(int w, int h, std::mt19937& rng) {
    LumaPlane p(w, h);
    std::uniform_int_distribution<int> d(0, 255);
    for (auto& v : p.values()) v = static_cast<std::uint8_t>(d(rng));
    return p;
}

LumaPlane shifted(const LumaPlane& src, int dy) {
    LumaPlane p(src.width(), src.height());
    for (int y = 0; y < src.height(); ++y)
        for (int x = 0; x < src.width(); ++x)
            p.at(x, y) = src.at(x, std::clamp(y + dy, 0, src.height() - 1));
    return p;
}

template <typename F>
double best_ms(int reps, F&& f) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Serial vs OpenMP kernel timings"};
    int width = 360, height = 640, reps = 5;
    app.add_option("--width", width)->check(CLI::PositiveNumber);
    app.add_option("--height", height)->check(CLI::PositiveNumber);
    app.add_option("--reps", reps)->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);

    std::mt19937 rng(7);
    const LumaPlane a = random_plane(width, height, rng);
    const LumaPlane b = shifted(a, 23);

    double s_serial = 0, s_par = 0;
    const double t_ssim_serial = best_ms(reps, [&] { s_serial = ssim_serial(a, b); });
    const double t_ssim_par = best_ms(reps, [&] { s_par = ssim(a, b); });

    std::vector<StripMatch> m_serial, m_par;
    const double t_ncc_serial = best_ms(reps, [&] { m_serial = match_strips_serial(a, b, 10, height / 3); });
    const double t_ncc_par = best_ms(reps, [&] { m_par = match_strips(a, b, 10, height / 3); });
    bool same = m_serial.size() == m_par.size();
    for (std::size_t i = 0; same && i < m_serial.size(); ++i)
        same = m_serial[i].displacement == m_par[i].displacement && m_serial[i].correlation == m_par[i].correlation;

    std::printf("threads: %d, planes %dx%d, best of %d\n", omp_get_max_threads(), width, height, reps);
    std::printf("%-14s %10s %10s %8s %s\n", "kernel", "serial ms", "openmp ms", "speedup", "agree");
    std::printf("%-14s %10.2f %10.2f %8.2f %s\n", "ssim", t_ssim_serial, t_ssim_par, t_ssim_serial / t_ssim_par,
                s_serial == s_par ? "yes" : "NO");
    std::printf("%-14s %10.2f %10.2f %8.2f %s\n", "match_strips", t_ncc_serial, t_ncc_par, t_ncc_serial / t_ncc_par,
                same ? "yes" : "NO");
    return s_serial == s_par && same ? 0 : 1;
}
