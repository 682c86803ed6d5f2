// Curvature of the round four-sphere and one identity evaluated on it.

#include <cstdio>

#include "weylforge/weylforge.hpp"

using namespace weylforge;

int main() {
  const MetricChart chart = round_s4();
  const Point p = chart.sample_box.center();
  const CurvaturePoint cp = curvature_at(chart, p, 1);
  std::printf("%s at (%.3f, %.3f, %.3f, %.3f)\n", chart.name.c_str(), p[0], p[1], p[2], p[3]);
  std::printf("  scalar curvature  %.12f\n", cp.scalar);
  std::printf("  |Riem|            %.12f\n", norm(cp.riem));
  std::printf("  |W|               %.3e\n", norm(cp.weyl));

  const Identity* id = find_identity("bianchi1.weyl");
  const Hypotheses h = measure_hypotheses(cp);
  const Evaluation ev = evaluate(*id, cp, h, false, id->default_tolerance());
  std::printf("  %s: %s (rel %.3e)\n", id->id.c_str(), to_string(ev.status), ev.rel);
  return 0;
}
