// Builds the unrolled decoder graph for the (1024, 854) code, balances it
// at a few clock budgets, and prints the resulting pipeline depths next to
// the multicore latency/throughput figures.

#include <cstdio>

#include "polarmc/arch_model.hpp"

int main() {
  using namespace polarmc;

  const auto code = construct_code(10, 854, 6.0);
  const auto graph = build_unrolled_graph(code, detect_shortcuts(code));
  std::printf("unrolled graph: %zu nodes, %zu edges\n", graph.nodes.size(), graph.edges.size());

  std::printf("\n%-12s %-8s %-12s\n", "budget", "depth", "max stage");
  for (double budget : {2.5, 3.0, 6.0, 12.0}) {
    const auto sched = rrb_schedule(graph, budget);
    double worst = 0.0;
    for (double d : sched.per_stage_delay) worst = std::max(worst, d);
    std::printf("%-12.2f %-8d %-12.3f\n", budget, sched.depth, worst);
  }

  std::printf("\n%-7s %-10s %-7s %-22s %-10s\n", "cores", "f_c (MHz)", "depth", "latency (ns)",
              "info Gb/s");
  struct Point {
    int p;
    double mhz;
    int d;
  };
  for (const auto& pt : {Point{1, 1200, 124}, {2, 600, 59}, {4, 300, 25}, {8, 150, 13}}) {
    const auto cfg = ArchConfig::from_core_clock(pt.p, pt.mhz * 1e6, pt.d, 1024, 854);
    const auto l = latency(cfg);
    const auto t = throughput(cfg);
    std::printf("%-7d %-10.0f %-7d [%7.1f, %7.1f]     %-10.1f\n", pt.p, pt.mhz, pt.d,
                l.min_s * 1e9, l.max_s * 1e9, t.info_bps / 1e9);
  }
  return 0;
}
