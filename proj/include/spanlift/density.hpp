// Copyright 2026 The spanlift Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <utility>
#include <vector>

#include "spanlift/dist.hpp"
#include "spanlift/error.hpp"
#include "spanlift/rational.hpp"

namespace spanlift {

// Uniform grid on [center - halfwidth, center + halfwidth] with `bins` cells.
// Outcomes are the exact rational cell midpoints, so two distributions built
// on the same grid share outcomes exactly.
struct GridSpec {
  Rat center;
  Rat halfwidth;
  std::int64_t bins = 0;

  void validate() const {
    if (bins <= 0) fail(Err::kInvalidGrid, "grid needs a positive bin count");
    if (!(halfwidth > Rat(0)))
      fail(Err::kInvalidGrid, "grid needs a positive halfwidth");
  }

  // Midpoint of cell i: center - halfwidth + (2i + 1) * halfwidth / bins.
  Rat grid_point(std::int64_t i) const {
    validate();
    if (i < 0 || i >= bins) fail(Err::kInvalidGrid, "grid index out of range");
    auto off = Rat::make(static_cast<__int128>(2 * i + 1) *
                             static_cast<__int128>(halfwidth.num),
                         static_cast<__int128>(bins) *
                             static_cast<__int128>(halfwidth.den));
    if (off) {
      auto lo = checked_sub(center, halfwidth);
      if (lo) {
        auto mid = checked_add(*lo, *off);
        if (mid) return *mid;
      }
    }
    // Exact arithmetic overflowed; snap the double midpoint to a fine quantum.
    double lo = center.to_double() - halfwidth.to_double();
    double step = 2.0 * halfwidth.to_double() / static_cast<double>(bins);
    double mid = lo + (static_cast<double>(i) + 0.5) * step;
    auto q = Rat::make(1, 1000000000);
    return round_to_quantum(mid, *q);
  }

  // Cell edges as doubles, for CDF differencing.
  std::pair<double, double> cell_edges(std::int64_t i) const {
    validate();
    if (i < 0 || i >= bins) fail(Err::kInvalidGrid, "grid index out of range");
    double lo = center.to_double() - halfwidth.to_double();
    double step = 2.0 * halfwidth.to_double() / static_cast<double>(bins);
    return {lo + static_cast<double>(i) * step,
            lo + static_cast<double>(i + 1) * step};
  }
};

// Continuous one-dimensional density with enough structure to discretize.
struct DensityModel {
  std::function<double(double)> cdf;   // may be empty when only pdf is known
  std::function<double(double)> pdf;
  double mean = 0;
  double stddev = 1;
};

inline double gauss_cdf(double x, double mean, double sigma) {
  return 0.5 * std::erfc((mean - x) / (sigma * std::numbers::sqrt2));
}

inline DensityModel gaussian_density(double mean, double variance) {
  if (!(variance > 0) || !std::isfinite(variance) || !std::isfinite(mean))
    fail(Err::kInvalidParam, "gaussian needs finite mean and variance > 0");
  double sigma = std::sqrt(variance);
  DensityModel m;
  m.mean = mean;
  m.stddev = sigma;
  m.cdf = [mean, sigma](double x) { return gauss_cdf(x, mean, sigma); };
  m.pdf = [mean, sigma](double x) {
    double z = (x - mean) / sigma;
    return std::exp(-0.5 * z * z) /
           (sigma * std::sqrt(2.0 * std::numbers::pi));
  };
  return m;
}

inline DensityModel laplace_density(double mean, double scale) {
  if (!(scale > 0) || !std::isfinite(scale) || !std::isfinite(mean))
    fail(Err::kInvalidParam, "laplace needs finite mean and scale > 0");
  DensityModel m;
  m.mean = mean;
  m.stddev = scale * std::numbers::sqrt2;
  m.cdf = [mean, scale](double x) {
    double z = (x - mean) / scale;
    return z < 0 ? 0.5 * std::exp(z) : 1.0 - 0.5 * std::exp(-z);
  };
  m.pdf = [mean, scale](double x) {
    return 0.5 * std::exp(-std::abs(x - mean) / scale) / scale;
  };
  return m;
}

// X = mean + A * asinh(G / A) for G ~ N(0, variance): a Gaussian squashed
// through asinh, so the tails decay doubly exponentially. Density by change
// of variables; CDF in closed form via the Gaussian CDF.
inline DensityModel sinh_normal_density(double mean, double a,
                                        double variance) {
  if (!(a > 0) || !(variance > 0) || !std::isfinite(mean))
    fail(Err::kInvalidParam, "sinh_normal needs a > 0 and variance > 0");
  double sigma = std::sqrt(variance);
  DensityModel m;
  m.mean = mean;
  // Spread of the pre-image dominates; the squash only tightens tails.
  m.stddev = std::min(sigma, a * std::asinh(sigma / a)) + 1e-12;
  m.cdf = [mean, a, sigma](double x) {
    return gauss_cdf(a * std::sinh((x - mean) / a), 0.0, sigma);
  };
  m.pdf = [mean, a, sigma](double x) {
    double g = a * std::sinh((x - mean) / a);
    double jac = std::cosh((x - mean) / a);
    double z = g / sigma;
    return jac * std::exp(-0.5 * z * z) /
           (sigma * std::sqrt(2.0 * std::numbers::pi));
  };
  return m;
}

// Adaptive Simpson quadrature with absolute tolerance.
namespace detail {
inline double simpson(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson(const std::function<double(double)>& f,
                               double a, double fa, double b, double fb,
                               double fm, double whole, double tol,
                               int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = simpson(a, fa, m, fm, flm);
  double right = simpson(m, fm, b, fb, frm);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, fa, m, fm, flm, left, tol * 0.5, depth - 1) +
         adaptive_simpson(f, m, fm, b, fb, frm, right, tol * 0.5, depth - 1);
}
}  // namespace detail

inline double integrate(const std::function<double(double)>& f, double a,
                        double b, double tol) {
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = detail::simpson(a, fa, b, fb, fm);
  return detail::adaptive_simpson(f, a, fa, b, fb, fm, whole, tol, 48);
}

struct Discretized {
  SubDist dist;
  double dropped_tail = 0;  // continuous mass outside the grid
};

// Bins a density onto a grid: each cell midpoint receives the cell's
// probability mass (CDF difference when a CDF is available, otherwise
// adaptive quadrature of the pdf to 1e-12 per cell). Mass beyond the grid
// edges is dropped and reported, not redistributed.
inline Discretized discretize_density(const DensityModel& model,
                                      const GridSpec& grid) {
  grid.validate();
  if (!model.cdf && !model.pdf)
    fail(Err::kInvalidParam, "density model needs a cdf or pdf");
  std::vector<SubDist::Entry> entries;
  entries.reserve(static_cast<std::size_t>(grid.bins));
  double covered = 0;
  for (std::int64_t i = 0; i < grid.bins; ++i) {
    auto [lo, hi] = grid.cell_edges(i);
    double p;
    if (model.cdf) {
      p = model.cdf(hi) - model.cdf(lo);
    } else {
      p = integrate(model.pdf, lo, hi, 1e-12);
    }
    p = std::max(p, 0.0);
    covered += p;
    entries.emplace_back(Outcome::of_real(grid.grid_point(i)), p);
  }
  Discretized result;
  result.dist = SubDist::from_entries(std::move(entries));
  double total;
  if (model.cdf) {
    auto first = grid.cell_edges(0);
    auto last = grid.cell_edges(grid.bins - 1);
    total = 1.0;
    result.dropped_tail =
        std::max(model.cdf(first.first), 0.0) +
        std::max(total - model.cdf(last.second), 0.0);
  } else {
    result.dropped_tail = std::max(1.0 - covered, 0.0);
  }
  return result;
}

// Default grid for a density: centered at the mean, spanning 10 standard
// deviations either side, 20001 cells (odd so the mean sits on a midpoint).
inline GridSpec default_grid(const DensityModel& model) {
  GridSpec g;
  auto q = Rat::make(1, 1000000000);
  g.center = round_to_quantum(model.mean, *q);
  g.halfwidth = round_to_quantum(10.0 * model.stddev, *q);
  if (!(g.halfwidth > Rat(0))) g.halfwidth = Rat(1);
  g.bins = 20001;
  return g;
}

}  // namespace spanlift
