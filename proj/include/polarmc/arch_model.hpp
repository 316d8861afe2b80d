#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "polarmc/errors.hpp"
#include "polarmc/polar_code.hpp"
#include "polarmc/sc_decoder.hpp"

namespace polarmc {

enum class GraphNodeKind : std::uint8_t { f_layer, g_layer, decision, shortcut, feedback_xor };

inline const char* to_string(GraphNodeKind k) {
  switch (k) {
    case GraphNodeKind::f_layer: return "f_layer";
    case GraphNodeKind::g_layer: return "g_layer";
    case GraphNodeKind::decision: return "decision";
    case GraphNodeKind::shortcut: return "shortcut";
    default: return "feedback_xor";
  }
}

/// Normalized cell-delay units per node class. Shortcut delays grow with
/// log2 of the segment length; `scale` multiplies everything (used by
/// calibration).
struct DelayModel {
  double f_layer = 1.0;
  double g_layer = 1.2;
  double decision = 0.5;
  double feedback_xor = 0.3;
  double rate0 = 0.0;
  double rep_base = 0.5, rep_per_log2 = 0.5;
  double spc_base = 1.0, spc_per_log2 = 0.5;
  double scale = 1.0;

  void validate() const {
    const double vals[] = {f_layer, g_layer, decision, feedback_xor, rate0,
                           rep_base, rep_per_log2, spc_base, spc_per_log2};
    for (double v : vals)
      if (!(v >= 0.0) || !std::isfinite(v)) throw config_error("DelayModel: delays must be finite and >= 0");
    if (!(scale > 0.0)) throw config_error("DelayModel: scale must be positive");
  }

  double leaf_delay(SegmentKind kind, int length, bool frozen_single) const {
    double d;
    switch (kind) {
      case SegmentKind::rate0: d = rate0; break;  // constant zeros, frozen decisions
      case SegmentKind::rate1: d = decision; break;
      case SegmentKind::repetition: d = rep_base + rep_per_log2 * std::log2(double(length)); break;
      case SegmentKind::spc: d = spc_base + spc_per_log2 * std::log2(double(length)); break;
      default: d = frozen_single ? 0.0 : decision; break;  // length-1 generic
    }
    return d * scale;
  }
};

/// One node of the unrolled single-frame dataflow.
struct GraphNode {
  int id;
  GraphNodeKind kind;
  SegmentKind seg_kind;  // meaningful for decision/shortcut nodes
  int segment_length;
  double delay;
};

/// Acyclic dataflow of one unrolled frame decode; every edge goes from a
/// lower to a higher node id, and `terminal` produces the decided data.
struct UnrolledGraph {
  std::vector<GraphNode> nodes;
  std::vector<std::pair<int, int>> edges;  // (producer, consumer)
  int terminal = -1;

  UnrolledGraph scaled(double s) const {
    UnrolledGraph g = *this;
    for (auto& n : g.nodes) n.delay *= s;
    return g;
  }
};

namespace detail {

struct graph_builder {
  const PolarCode& code;
  const DelayModel& dm;
  const std::vector<SegmentNode>& segs;
  std::vector<int> leaf_at;
  UnrolledGraph g;

  int add_node(GraphNodeKind kind, SegmentKind sk, int len, double delay) {
    const int id = static_cast<int>(g.nodes.size());
    g.nodes.push_back({id, kind, sk, len, delay});
    return id;
  }

  void add_edge(int from, int to) {
    if (from >= 0) g.edges.emplace_back(from, to);
  }

  // Returns the id of the node producing this segment's hard feedback.
  int build(int start, int len, int input) {
    const int li = leaf_at[start];
    if (li >= 0 && segs[li].length == len) {
      const SegmentNode& s = segs[li];
      const bool frozen_single = (len == 1) && code.frozen[start];
      // length-1 leaves are plain frozen/free decisions
      const GraphNodeKind kind = (len == 1) ? GraphNodeKind::decision : GraphNodeKind::shortcut;
      const int id = add_node(kind, s.kind, len, dm.leaf_delay(s.kind, len, frozen_single));
      add_edge(input, id);
      return id;
    }
    const int half = len / 2;
    const int f = add_node(GraphNodeKind::f_layer, SegmentKind::generic, len, dm.f_layer * dm.scale);
    add_edge(input, f);
    const int term_l = build(start, half, f);
    const int gn = add_node(GraphNodeKind::g_layer, SegmentKind::generic, len, dm.g_layer * dm.scale);
    add_edge(input, gn);
    add_edge(term_l, gn);
    const int term_r = build(start + half, half, gn);
    const int x = add_node(GraphNodeKind::feedback_xor, SegmentKind::generic, len, dm.feedback_xor * dm.scale);
    add_edge(term_l, x);
    add_edge(term_r, x);
    return x;
  }
};

}  // namespace detail

/// Unrolls one frame decode over the pruned segment tree: an F layer and a
/// G layer per generic split, one node per leaf, and a feedback-XOR layer
/// combining each pair of child feedbacks.
inline UnrolledGraph build_unrolled_graph(const PolarCode& code,
                                          const std::vector<SegmentNode>& shortcuts,
                                          const DelayModel& dm = DelayModel{}) {
  dm.validate();
  validate_segments(code, shortcuts);
  detail::graph_builder b{code, dm, shortcuts, {}, {}};
  b.leaf_at.assign(code.block_length, -1);
  for (std::size_t i = 0; i < shortcuts.size(); ++i)
    b.leaf_at[shortcuts[i].start] = static_cast<int>(i);
  b.g.terminal = b.build(0, code.block_length, -1);
  return b.g;
}

/// Stage assignment after register reduction/balancing.
struct PipelineSchedule {
  std::vector<int> stage_of;           // node id -> stage index, 1-based
  int depth = 0;                       // D = max stage index
  std::vector<double> per_stage_delay; // critical combinational delay per stage
};

/// ASAP-levels the graph, then greedily merges consecutive levels while the
/// merged critical-path delay fits the clock budget. Greedy maximal-prefix
/// merging is depth-optimal because range feasibility is monotone.
inline PipelineSchedule rrb_schedule(const UnrolledGraph& g, double clock_budget) {
  const int n = static_cast<int>(g.nodes.size());
  if (n == 0) return {};
  if (!(clock_budget > 0.0)) throw std::invalid_argument("rrb_schedule: budget must be positive");
  for (const auto& nd : g.nodes)
    if (nd.delay > clock_budget)
      throw infeasible_error("rrb_schedule: node " + std::to_string(nd.id) + " (" +
                             to_string(nd.kind) + ", len " + std::to_string(nd.segment_length) +
                             ") has delay " + std::to_string(nd.delay) +
                             " exceeding the clock budget " + std::to_string(clock_budget));

  // predecessor lists
  std::vector<std::vector<int>> preds(n);
  for (const auto& e : g.edges) {
    if (e.first < 0 || e.second < 0 || e.first >= n || e.second >= n || e.first == e.second)
      throw std::invalid_argument("rrb_schedule: bad edge");
    preds[e.second].push_back(e.first);
  }

  // ASAP integer levels (Kahn order; edges may arrive in any id order)
  std::vector<int> level(n, 0);
  {
    std::vector<int> indeg(n, 0), order;
    std::vector<std::vector<int>> succs(n);
    for (const auto& e : g.edges) {
      succs[e.first].push_back(e.second);
      ++indeg[e.second];
    }
    order.reserve(n);
    for (int v = 0; v < n; ++v)
      if (indeg[v] == 0) order.push_back(v);
    for (std::size_t h = 0; h < order.size(); ++h) {
      const int v = order[h];
      for (int s : succs[v]) {
        if (level[v] + 1 > level[s]) level[s] = level[v] + 1;
        if (--indeg[s] == 0) order.push_back(s);
      }
    }
    if (order.size() != static_cast<std::size_t>(n))
      throw std::invalid_argument("rrb_schedule: graph has a cycle");
  }

  int max_level = 0;
  for (int v = 0; v < n; ++v) max_level = std::max(max_level, level[v]);
  std::vector<std::vector<int>> by_level(max_level + 1);
  for (int v = 0; v < n; ++v) by_level[level[v]].push_back(v);

  PipelineSchedule sched;
  sched.stage_of.assign(n, 0);
  std::vector<double> cp(n, 0.0);       // critical path ending at node, within current stage
  std::vector<int> stage_start_level(1, 0);
  int cur_stage = 1;
  double cur_stage_cp = 0.0;
  int first_level_of_stage = 0;

  auto cand_for = [&](int v, int stage_first_level) {
    double best = 0.0;
    for (int p : preds[v])
      if (level[p] >= stage_first_level && cp[p] > best) best = cp[p];
    return best + g.nodes[v].delay;
  };

  for (int lv = 0; lv <= max_level; ++lv) {
    if (lv == first_level_of_stage) {
      // first level always fits (node delays <= budget)
      double mx = 0.0;
      for (int v : by_level[lv]) {
        cp[v] = g.nodes[v].delay;
        sched.stage_of[v] = cur_stage;
        mx = std::max(mx, cp[v]);
      }
      cur_stage_cp = std::max(cur_stage_cp, mx);
      continue;
    }
    double mx = 0.0;
    for (int v : by_level[lv]) mx = std::max(mx, cand_for(v, first_level_of_stage));
    if (mx <= clock_budget) {
      for (int v : by_level[lv]) {
        cp[v] = cand_for(v, first_level_of_stage);
        sched.stage_of[v] = cur_stage;
      }
      cur_stage_cp = std::max(cur_stage_cp, mx);
    } else {
      sched.per_stage_delay.push_back(cur_stage_cp);
      ++cur_stage;
      first_level_of_stage = lv;
      cur_stage_cp = 0.0;
      double m2 = 0.0;
      for (int v : by_level[lv]) {
        cp[v] = g.nodes[v].delay;
        sched.stage_of[v] = cur_stage;
        m2 = std::max(m2, cp[v]);
      }
      cur_stage_cp = m2;
    }
  }
  sched.per_stage_delay.push_back(cur_stage_cp);
  sched.depth = cur_stage;
  return sched;
}

/// Finds the delay-model scale at which the R-RB depth equals target_depth
/// for the given budget. Throws infeasible_error when the step function
/// depth(scale) skips the target.
inline double calibrate_delay_scale(const UnrolledGraph& g, double clock_budget, int target_depth) {
  if (target_depth < 1) throw std::invalid_argument("calibrate: target depth must be >= 1");
  double max_delay = 0.0;
  for (const auto& nd : g.nodes) max_delay = std::max(max_delay, nd.delay);
  if (!(max_delay > 0.0)) throw std::invalid_argument("calibrate: graph has no positive delays");
  const double s_hi = clock_budget / max_delay;  // feasibility limit

  auto depth_at = [&](double s) { return rrb_schedule(g.scaled(s), clock_budget).depth; };

  const int d_max = depth_at(s_hi);
  if (target_depth > d_max)
    throw infeasible_error("calibrate: target depth " + std::to_string(target_depth) +
                           " exceeds the maximum achievable depth " + std::to_string(d_max));

  // leftmost scale reaching depth >= t (depth is non-decreasing in scale)
  auto left_edge = [&](int t) {
    double lo = s_hi * 1e-12, hi = s_hi;
    if (depth_at(lo) >= t) return lo;
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (depth_at(mid) >= t)
        hi = mid;
      else
        lo = mid;
    }
    return hi;
  };

  const double lo_edge = left_edge(target_depth);
  const double hi_edge = (d_max > target_depth) ? left_edge(target_depth + 1) : s_hi;
  const double mid = 0.5 * (lo_edge + hi_edge);
  if (depth_at(mid) != target_depth)
    throw infeasible_error("calibrate: depth(scale) steps over target " +
                           std::to_string(target_depth) + " (bracketing depths " +
                           std::to_string(depth_at(lo_edge * 0.999999)) + " and " +
                           std::to_string(depth_at(hi_edge)) + ")");
  return mid;
}

/// Multicore configuration: P unrolled cores at f_c fed from an IO domain
/// at f_IO = P * f_c (period T_IO).
struct ArchConfig {
  int cores = 1;                         // P
  double core_clock_hz = 0.0;            // f_c
  double io_period_s = 0.0;              // T_IO = 1 / (P f_c)
  std::optional<double> theta_deg;       // core clock phase, degrees
  int depth = 1;                         // pipeline depth D
  int channel_bits = 5;                  // Q
  int block_length = 1024;               // N
  int info_length = 854;                 // K

  static ArchConfig from_core_clock(int cores, double core_clock_hz, int depth, int block_length,
                                    int info_length) {
    ArchConfig c;
    c.cores = cores;
    c.core_clock_hz = core_clock_hz;
    c.io_period_s = 1.0 / (core_clock_hz * cores);
    c.depth = depth;
    c.block_length = block_length;
    c.info_length = info_length;
    c.validate();
    return c;
  }

  static ArchConfig from_io_period(int cores, double io_period_s, int depth, int block_length,
                                   int info_length) {
    ArchConfig c;
    c.cores = cores;
    c.io_period_s = io_period_s;
    c.core_clock_hz = 1.0 / (io_period_s * cores);
    c.depth = depth;
    c.block_length = block_length;
    c.info_length = info_length;
    c.validate();
    return c;
  }

  void validate() const {
    if (cores < 1 || (cores & (cores - 1)) != 0)
      throw std::invalid_argument("ArchConfig: core count must be a power of two");
    if (!(core_clock_hz > 0.0) || !(io_period_s > 0.0))
      throw std::invalid_argument("ArchConfig: clocks must be positive");
    if (depth < 1) throw std::invalid_argument("ArchConfig: pipeline depth must be >= 1");
    if (info_length < 1 || info_length > block_length)
      throw std::invalid_argument("ArchConfig: bad code dimensions");
    if (theta_deg && (*theta_deg < 0.0 || *theta_deg >= 360.0))
      throw std::invalid_argument("ArchConfig: theta must lie in [0, 360)");
  }
};

namespace detail {

inline double latency_mod_term(int cores, double theta_deg) {
  double m = std::fmod(cores * (theta_deg + 180.0) / 360.0, static_cast<double>(cores));
  if (m < 0.0) m += cores;
  return m;
}

}  // namespace detail

/// L = T_IO * (P (D + 2) + mod(P (theta + 180) / 360, P)).
inline double latency_seconds(const ArchConfig& cfg, double theta_deg) {
  return cfg.io_period_s *
         (cfg.cores * (cfg.depth + 2) + detail::latency_mod_term(cfg.cores, theta_deg));
}

struct LatencyInterval {
  double min_s = 0.0;
  double max_s = 0.0;
};

/// Latency for the configured theta, or the min/max envelope over
/// theta in [0, 360) (alignment term spanning 0 .. P-1 IO cycles).
inline LatencyInterval latency(const ArchConfig& cfg) {
  cfg.validate();
  if (cfg.theta_deg) {
    const double L = latency_seconds(cfg, *cfg.theta_deg);
    return {L, L};
  }
  const double base = cfg.io_period_s * (cfg.cores * (cfg.depth + 2));
  return {base, cfg.io_period_s * (cfg.cores * (cfg.depth + 2) + (cfg.cores - 1))};
}

struct ThroughputResult {
  double info_bps = 0.0;
  double coded_bps = 0.0;
};

/// One frame per core clock per core, fully pipelined.
inline ThroughputResult throughput(const ArchConfig& cfg) {
  cfg.validate();
  return {cfg.info_length * cfg.core_clock_hz * cfg.cores,
          cfg.block_length * cfg.core_clock_hz * cfg.cores};
}

struct FrameFlowResult {
  std::vector<double> per_frame_latency_s;
  double sustained_info_bps = 0.0;
};

/// Cycle-accurate frame flow at T_IO granularity. Frame i streams into core
/// i mod P over P IO cycles (per-core staggered clocks), is latched on the
/// next core falling edge, advances D core periods, and unloads over P IO
/// ticks on the core's phase grid. Per-frame latency spans first input
/// symbol to output availability.
inline FrameFlowResult simulate_frame_flow(const ArchConfig& cfg, int n_frames) {
  cfg.validate();
  if (n_frames < cfg.cores * (cfg.depth + 3))
    throw std::invalid_argument("simulate_frame_flow: need at least P*(D+3) frames for pipeline fill");

  const int P = cfg.cores;
  const int D = cfg.depth;
  const double theta = cfg.theta_deg.value_or(180.0);
  const double latch_off = detail::latency_mod_term(P, theta);  // falling-edge offset, IO units

  FrameFlowResult res;
  res.per_frame_latency_s.resize(n_frames);
  std::vector<double> avail(n_frames);

  for (int i = 0; i < n_frames; ++i) {
    const int core = i % P;
    const double t_loaded = static_cast<double>(i) + P;
    const double base = core + latch_off;
    // first core falling edge at or after load completion
    long long m = static_cast<long long>(std::ceil((t_loaded - base) / P));
    while (m * P + base < t_loaded) ++m;
    while (m > 0 && (m - 1) * P + base >= t_loaded) --m;
    double t = m * static_cast<double>(P) + base;
    for (int d = 0; d < D; ++d) t += P;  // pipeline advance at f_c
    t += P;                              // output unload
    avail[i] = t;
    res.per_frame_latency_s[i] = (t - i) * cfg.io_period_s;
  }

  const int fill = P * (D + 2);
  const int first = std::min(fill, n_frames - 2);
  const double span_io = avail[n_frames - 1] - avail[first];
  res.sustained_info_bps =
      cfg.info_length * static_cast<double>(n_frames - 1 - first) / (span_io * cfg.io_period_s);
  return res;
}

}  // namespace polarmc
