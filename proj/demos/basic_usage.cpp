// Draw a lognormal sample, estimate I and G with 95% intervals, and compare
// against the population values.
#include <cstdio>

#include "qineq/qineq.hpp"

int main() {
  using namespace qineq;
  const auto model = ParametricModel::lognormal();
  const auto s = sample(model, 1000, 20240601);

  const auto ci = ci_I(s);
  const auto cg = ci_G(s);
  std::printf("population  I = %.4f  G = %.4f\n", true_I(model), true_G(model).value);
  std::printf("estimate    I = %.4f  [%.4f, %.4f]\n", ci.point, ci.lower, ci.upper);
  std::printf("estimate    G = %.4f  [%.4f, %.4f]\n", cg.point, cg.lower, cg.upper);

  // A few ordinates of the sample ratio curve.
  const auto g = curve(s, 10);
  for (const auto& pt : g.points) std::printf("  R(%.2f) = %.4f\n", pt.p, pt.ordinate);
  return 0;
}
