#pragma once

#include <functional>
#include <utility>

#include "divsel/common.hpp"

namespace divsel {

struct QuadratureRule {
  int order = 0;
  Vector nodes;        // roots of L_n, strictly increasing
  Vector log_weights;  // ln w_i (classical weights; far-tail w_i underflow)
  Vector weights;      // exp(log_weights)
};

// Value and derivative of the Laguerre polynomial by the three-term
// recursion; plain double arithmetic (overflows for very large n*z, where the
// rule construction uses an internally rescaled recursion instead).
std::pair<double, double> laguerre_eval(int n, double z);

// Newton-refined roots from the standard marching initial guesses;
// ln w_i = ln z_i - 2 [ln(n+1) + ln|L_{n+1}(z_i)|].
QuadratureRule gauss_laguerre_rule(int n);

// Process-wide memoized rules (construction at n=5000 costs ~1s).
const QuadratureRule& cached_rule(int n);

// ln of integral_0^inf f(x) dx as lse_i[ln w_i + z_i + log_f(z_i)];
// log_f may return -inf for a zero integrand value.
double integrate_halfline(const std::function<double(double)>& log_f,
                          const QuadratureRule& rule);

}  // namespace divsel
