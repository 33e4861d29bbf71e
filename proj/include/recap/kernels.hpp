// Copyright (C) 2026 The recap authors
// SPDX-License-Identifier: Apache-2.0

// Data-parallel image kernels. Each OpenMP kernel has a single-threaded
// `_serial` twin computing bit-identical results; the twins are kept for
// tests and for the benchmark target.

#pragma once

#include <stdexcept>
#include <vector>

#include "recap/image.hpp"

namespace recap {

struct SsimParams {
    int window = 7;
    double c1 = (0.01 * 255) * (0.01 * 255);
    double c2 = (0.03 * 255) * (0.03 * 255);
};

class DimensionMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Mean SSIM over every fully contained window x window square (uniform
/// weights, population statistics). Result lies in [-1, 1].
double ssim(const LumaPlane& a, const LumaPlane& b, const SsimParams& params = {});
double ssim_serial(const LumaPlane& a, const LumaPlane& b, const SsimParams& params = {});

/// Best vertical placement of one horizontal strip of `prev` inside `cur`.
struct StripMatch {
    int first_row = 0;
    int rows = 0;
    /// prev row y maps to cur row y - displacement; positive means content moved up.
    int displacement = 0;
    double correlation = 0;
    /// False when the strip has no texture (NCC undefined).
    bool textured = false;
};

/// Splits `prev` into `folds` horizontal strips and finds, for each, the
/// vertical shift in [-search_radius, search_radius] maximising normalized
/// cross-correlation against `cur`. Ties prefer the smaller |shift|, then
/// the negative one.
std::vector<StripMatch> match_strips(const LumaPlane& prev, const LumaPlane& cur, int folds,
                                     int search_radius);
std::vector<StripMatch> match_strips_serial(const LumaPlane& prev, const LumaPlane& cur, int folds,
                                            int search_radius);

}  // namespace recap
