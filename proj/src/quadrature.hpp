#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <queue>
#include <string>
#include <vector>

#include "casimir/errors.hpp"

namespace casimir::detail {

struct Estimate {
  double value = 0.0;
  double error = 0.0;

  Estimate& operator+=(const Estimate& o) {
    value += o.value;
    error += o.error;
    return *this;
  }
};

template <unsigned N, class F>
Estimate gk_panel(F& f, double a, double b) {
  double err = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, N>::integrate(f, a, b, 0, 0.0, &err);
  return {v, err};
}

template <class F>
Estimate gk_panel(F& f, double a, double b, int nodes) {
  switch (nodes) {
    case 15: return gk_panel<15>(f, a, b);
    case 21: return gk_panel<21>(f, a, b);
    case 31: return gk_panel<31>(f, a, b);
    case 41: return gk_panel<41>(f, a, b);
    case 51: return gk_panel<51>(f, a, b);
    case 61: return gk_panel<61>(f, a, b);
    default: throw ValidationError("unsupported Gauss-Kronrod node count " + std::to_string(nodes));
  }
}

// Globally adaptive Gauss-Kronrod: bisects the panel with the largest error
// estimate until the summed error is below max(abs_tol, rel_tol |I|) or the
// panel budget is spent. The caller decides what an unmet tolerance means.
template <class F>
Estimate adaptive_integrate(F f, double a, double b, double rel_tol, double abs_tol, int nodes,
                            int max_panels = 400) {
  struct Panel {
    double a, b;
    Estimate e;
    bool operator<(const Panel& o) const { return e.error < o.e.error; }
  };
  std::priority_queue<Panel> heap;
  Estimate total = gk_panel(f, a, b, nodes);
  heap.push({a, b, total});
  int panels = 1;
  while (total.error > std::max(abs_tol, rel_tol * std::abs(total.value)) && panels < max_panels) {
    const Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      heap.push(worst);
      break;
    }
    const Estimate left = gk_panel(f, worst.a, mid, nodes);
    const Estimate right = gk_panel(f, mid, worst.b, nodes);
    total.value += left.value + right.value - worst.e.value;
    total.error += left.error + right.error - worst.e.error;
    heap.push({worst.a, mid, left});
    heap.push({mid, worst.b, right});
    ++panels;
  }
  // Re-sum to shed the drift of the incremental updates.
  Estimate exact;
  while (!heap.empty()) {
    exact += heap.top().e;
    heap.pop();
  }
  if (!std::isfinite(exact.value)) {
    throw ConvergenceError("non-finite quadrature result", HUGE_VAL);
  }
  return exact;
}

}  // namespace casimir::detail
