// Copyright 2026 The qfdiv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qfdiv/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qfdiv {

namespace {

using Point = std::vector<double>;

Point affine(const Point &a, const Point &b, double t) {
  // a + t (b − a)
  Point out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + t * (b[i] - a[i]);
  return out;
}

}  // namespace

NelderMeadResult nelder_mead_minimize(
    const std::function<double(const std::vector<double> &)> &fn, Point x0,
    const NelderMeadOptions &options) {
  const std::size_t n = x0.size();
  const double dn = static_cast<double>(std::max<std::size_t>(n, 1));
  const double expand = 1.0 + 2.0 / dn;
  const double contract = 0.75 - 0.5 / dn;
  const double shrink = 1.0 - 1.0 / dn;

  NelderMeadResult result;
  int evals = 0;
  auto eval = [&](const Point &p) {
    ++evals;
    const double v = fn(p);
    return std::isfinite(v) ? v : HUGE_VAL;
  };

  std::vector<Point> simplex(n + 1, x0);
  std::vector<double> values(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double step = x0[i] != 0.0 ? options.initial_step * std::max(1.0, std::abs(x0[i]))
                                     : options.initial_step;
    simplex[i + 1][i] += step;
  }
  for (std::size_t i = 0; i <= n; ++i) values[i] = eval(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  while (evals < options.max_evals) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    {
      std::vector<Point> s2(n + 1);
      std::vector<double> v2(n + 1);
      for (std::size_t i = 0; i <= n; ++i) {
        s2[i] = std::move(simplex[order[i]]);
        v2[i] = values[order[i]];
      }
      simplex = std::move(s2);
      values = std::move(v2);
    }

    double fspread = 0.0;
    double xspread = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      fspread = std::max(fspread, std::abs(values[i] - values[0]));
      for (std::size_t k = 0; k < n; ++k) {
        xspread = std::max(xspread, std::abs(simplex[i][k] - simplex[0][k]));
      }
    }
    if (fspread <= options.ftol && xspread <= options.xtol) {
      result.converged = true;
      break;
    }

    Point centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k] / dn;
    }

    const Point reflected = affine(centroid, simplex[n], -1.0);
    const double fr = eval(reflected);
    if (fr < values[0]) {
      const Point expanded = affine(centroid, simplex[n], -expand);
      const double fe = eval(expanded);
      if (fe < fr) {
        simplex[n] = expanded;
        values[n] = fe;
      } else {
        simplex[n] = reflected;
        values[n] = fr;
      }
      continue;
    }
    if (fr < values[n - 1]) {
      simplex[n] = reflected;
      values[n] = fr;
      continue;
    }
    const bool outside = fr < values[n];
    const Point contracted =
        outside ? affine(centroid, simplex[n], -contract) : affine(centroid, simplex[n], contract);
    const double fc = eval(contracted);
    if (outside ? fc <= fr : fc < values[n]) {
      simplex[n] = contracted;
      values[n] = fc;
      continue;
    }
    for (std::size_t i = 1; i <= n; ++i) {
      simplex[i] = affine(simplex[0], simplex[i], shrink);
      values[i] = eval(simplex[i]);
    }
  }

  const auto best = std::min_element(values.begin(), values.end()) - values.begin();
  result.x = simplex[best];
  result.fx = values[best];
  result.evals = evals;
  return result;
}

}  // namespace qfdiv
