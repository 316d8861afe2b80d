// polarmc: polar-code SC decoding toolkit and multicore pipeline model.
// Subcommands: construct, encode, decode, simulate, arch, sweep-arch.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <iostream>
#include <string>
#include <vector>

#include "polarmc/polarmc.hpp"

namespace {

using nlohmann::json;

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct ManifestWriter {
  std::string path;       // empty: disabled
  std::string command;
  std::string started = utc_now();
  std::uint64_t seed = 0;
  json config = json::object();
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;

  void record(const std::string& file) { outputs.push_back(file); }
  void record_input(const std::string& file) {
    if (!file.empty()) inputs.push_back(file);
  }

  static json digests_of(const std::vector<std::string>& files) {
    json arr = json::array();
    for (const auto& f : files) {
      const auto bytes = polarmc::read_file_bytes(f);
      arr.push_back({{"path", f},
                     {"bytes", bytes.size()},
                     {"sha256", polarmc::sha256_hex(bytes.data(), bytes.size())}});
    }
    return arr;
  }

  void finish() {
    if (path.empty()) return;
    const json m{{"tool", polarmc::project_name},
                 {"version", polarmc::project_version},
                 {"command", command},
                 {"config", config},
                 {"master_seed", seed},
                 {"started_utc", started},
                 {"finished_utc", utc_now()},
                 {"inputs", digests_of(inputs)},
                 {"outputs", digests_of(outputs)}};
    polarmc::write_file_text(path, m.dump(2) + "\n");
  }
};

std::vector<double> parse_ebno_list(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    double lo, step, hi;
    if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &lo, &step, &hi) != 3 || step <= 0.0)
      throw polarmc::config_error("bad --ebno range, expected start:step:stop");
    for (double v = lo; v <= hi + 1e-9; v += step) out.push_back(v);
    return out;
  }
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t next = text.find(',', pos);
    if (next == std::string::npos) next = text.size();
    out.push_back(std::stod(text.substr(pos, next - pos)));
    pos = next + 1;
  }
  if (out.empty()) throw polarmc::config_error("empty --ebno list");
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t next = text.find(',', pos);
    if (next == std::string::npos) next = text.size();
    out.push_back(std::stoi(text.substr(pos, next - pos)));
    pos = next + 1;
  }
  if (out.empty()) throw polarmc::config_error("empty list option");
  return out;
}

polarmc::DecoderVariant parse_decoder(const std::string& name) {
  if (name == "float") return polarmc::DecoderVariant::float_sc;
  if (name == "fast") return polarmc::DecoderVariant::float_fast;
  if (name == "quant") return polarmc::DecoderVariant::quantized;
  throw polarmc::config_error("unknown decoder '" + name + "' (use float|fast|quant)");
}

std::string join_path(const std::string& dir, const std::string& file) {
  if (file.find('/') != std::string::npos || dir.empty() || dir == ".") return file;
  return dir + "/" + file;
}

struct CapsOptions {
  int rate0 = polarmc::ShortcutCaps::unlimited;
  int rate1 = polarmc::ShortcutCaps::unlimited;
  int repetition = 16;
  int spc = 8;
  polarmc::ShortcutCaps to_caps() const { return {rate0, rate1, repetition, spc}; }
};

json arch_report(const polarmc::ArchConfig& cfg, const std::vector<double>& per_stage_delays) {
  const auto l = polarmc::latency(cfg);
  const auto t = polarmc::throughput(cfg);
  json j{{"cores", cfg.cores},
         {"core_mhz", cfg.core_clock_hz / 1e6},
         {"io_period_ns", cfg.io_period_s * 1e9},
         {"depth", cfg.depth},
         {"latency_ns_min", l.min_s * 1e9},
         {"latency_ns_max", l.max_s * 1e9},
         {"info_gbps", t.info_bps / 1e9},
         {"coded_gbps", t.coded_bps / 1e9},
         {"per_stage_delays", per_stage_delays}};
  if (cfg.theta_deg) j["theta_deg"] = *cfg.theta_deg;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"polar-code SC decoding toolkit and multicore pipeline model"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "options file (TOML/INI), precedence: flags > file > defaults");

  std::uint64_t seed = 1;
  std::string out_dir = ".";
  std::string manifest_path;
  app.add_option("--seed", seed, "master seed");
  app.add_option("--out-dir", out_dir, "directory for default output paths");
  app.add_option("--manifest", manifest_path, "write a run manifest JSON here");

  // ------------------------------------------------------------- construct
  auto* c_cmd = app.add_subcommand("construct", "build a polar code definition file");
  int c_n = 10, c_k = 854;
  double c_snr = 6.0;
  std::string c_out = "code.json";
  c_cmd->add_option("--n", c_n, "log2 block length")->required();
  c_cmd->add_option("--k", c_k, "information length K")->required();
  c_cmd->add_option("--design-snr", c_snr, "construction Eb/No in dB (default 6.0)");
  c_cmd->add_option("--out", c_out, "output code JSON path");

  // ---------------------------------------------------------------- encode
  auto* e_cmd = app.add_subcommand("encode", "encode packed data frames");
  std::string e_code, e_in, e_out = "encoded.bin", e_mode = "systematic", e_format = "bits";
  double e_llr_scale = 8.0;
  e_cmd->add_option("--code", e_code, "code JSON file")->required();
  e_cmd->add_option("--in", e_in, "input frames, packed bits MSB-first (K per frame)")->required();
  e_cmd->add_option("--out", e_out, "output path");
  e_cmd->add_option("--mode", e_mode, "systematic (K data bits) or transform (N input bits)");
  e_cmd->add_option("--format", e_format, "bits (packed codewords) or llr (noiseless float32 frames)");
  e_cmd->add_option("--llr-scale", e_llr_scale, "LLR confidence used with --format llr");

  // ---------------------------------------------------------------- decode
  auto* d_cmd = app.add_subcommand("decode", "decode LLR frames to data bits");
  std::string d_code, d_in, d_out = "decoded.bin", d_decoder = "fast", d_schedule, d_in_format = "f32";
  CapsOptions d_caps;
  d_cmd->add_option("--code", d_code, "code JSON file")->required();
  d_cmd->add_option("--in", d_in, "input LLR frames (binary little-endian float32, N per frame)")
      ->required();
  d_cmd->add_option("--out", d_out, "output path, packed decided bits MSB-first");
  d_cmd->add_option("--decoder", d_decoder, "float | fast | quant");
  d_cmd->add_option("--schedule", d_schedule, "quantization schedule JSON (quant decoder)");
  d_cmd->add_option("--in-format", d_in_format, "f32 | qllr (one sign-magnitude byte per LLR)");
  d_cmd->add_option("--rep-cap", d_caps.repetition, "repetition shortcut length cap");
  d_cmd->add_option("--spc-cap", d_caps.spc, "SPC shortcut length cap");

  // -------------------------------------------------------------- simulate
  auto* s_cmd = app.add_subcommand("simulate", "Monte-Carlo error-rate sweep");
  std::string s_code, s_ebno = "4.0:0.5:6.0", s_decoder = "fast", s_schedule, s_out = "results.csv";
  std::uint64_t s_min_fe = 100, s_max_frames = 100000000ull;
  int s_threads = 0;
  s_cmd->add_option("--code", s_code, "code JSON file")->required();
  s_cmd->add_option("--ebno", s_ebno, "Eb/No grid, start:step:stop or comma list (dB)");
  s_cmd->add_option("--decoder", s_decoder, "float | fast | quant");
  s_cmd->add_option("--schedule", s_schedule, "quantization schedule JSON");
  s_cmd->add_option("--min-fe", s_min_fe, "stop after this many frame errors");
  s_cmd->add_option("--max-frames", s_max_frames, "hard frame cap per point");
  s_cmd->add_option("--threads", s_threads, "worker threads (0 = hardware)");
  s_cmd->add_option("--out", s_out, "output CSV path");

  // ------------------------------------------------------------------ arch
  auto* a_cmd = app.add_subcommand("arch", "latency/throughput/pipeline analysis");
  int a_cores = 4, a_depth = 0, a_calibrate_target = 0, a_n = 10, a_k = 854;
  double a_core_mhz = 300.0, a_io_period_ns = 0.0, a_theta = -1.0, a_budget = 1.0, a_snr = 6.0;
  std::string a_code, a_delay_model, a_out;
  a_cmd->add_option("--cores", a_cores, "core count P");
  a_cmd->add_option("--core-mhz", a_core_mhz, "core clock in MHz");
  a_cmd->add_option("--io-period-ns", a_io_period_ns, "override T_IO in ns (default 1/(P f_c))");
  a_cmd->add_option("--depth", a_depth, "pipeline depth D (skip R-RB)");
  a_cmd->add_option("--theta", a_theta, "core clock phase in degrees [0, 360)");
  a_cmd->add_option("--code", a_code, "code JSON file (else --n/--k)");
  a_cmd->add_option("--n", a_n, "log2 block length when no code file");
  a_cmd->add_option("--k", a_k, "information length when no code file");
  a_cmd->add_option("--design-snr", a_snr, "construction Eb/No when no code file");
  a_cmd->add_option("--delay-model", a_delay_model, "delay model JSON; runs R-RB for the depth");
  a_cmd->add_option("--calibrate-target", a_calibrate_target,
                    "scale the delay model until R-RB depth equals this");
  a_cmd->add_option("--budget", a_budget, "R-RB clock budget in normalized delay units");
  a_cmd->add_option("--out", a_out, "write the report JSON here (default stdout)");

  // ------------------------------------------------------------ sweep-arch
  auto* w_cmd = app.add_subcommand("sweep-arch", "grid of arch reports over P, f_c, depth");
  std::string w_cores = "1,2,4,8", w_mhz = "150,300,600,1200", w_depths = "13,25,59,124", w_out;
  int w_n = 10, w_k = 854;
  w_cmd->add_option("--cores-list", w_cores, "comma list of core counts");
  w_cmd->add_option("--core-mhz-list", w_mhz, "comma list of core clocks (MHz)");
  w_cmd->add_option("--depth-list", w_depths, "comma list of pipeline depths");
  w_cmd->add_option("--n", w_n, "log2 block length");
  w_cmd->add_option("--k", w_k, "information length");
  w_cmd->add_option("--out", w_out, "write the report JSON here (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  ManifestWriter manifest;
  manifest.path = manifest_path;
  manifest.seed = seed;
  {
    std::string cmdline;
    for (int i = 0; i < argc; ++i) {
      if (i) cmdline += ' ';
      cmdline += argv[i];
    }
    manifest.command = cmdline;
  }

  try {
    if (c_cmd->parsed()) {
      const auto code = polarmc::construct_code(c_n, c_k, c_snr);
      const std::string path = join_path(out_dir, c_out);
      polarmc::save_code(code, path);
      manifest.record(path);
      manifest.config = {{"n", c_n}, {"k", c_k}, {"design_snr_db", c_snr}, {"out", path}};
      std::printf("constructed (%d, %d): %d frozen, rate %.4f -> %s\n", code.block_length,
                  code.info_length, code.frozen_count(), code.rate(), path.c_str());
    } else if (e_cmd->parsed()) {
      manifest.record_input(e_code);
      manifest.record_input(e_in);
      const auto code = polarmc::load_code(e_code);
      const std::string path = join_path(out_dir, e_out);
      const bool systematic = (e_mode == "systematic");
      if (!systematic && e_mode != "transform")
        throw polarmc::config_error("--mode must be systematic or transform");
      const int in_bits = systematic ? code.info_length : code.block_length;
      const auto inputs = polarmc::read_bit_frames(e_in, in_bits);
      if (e_format == "bits") {
        std::vector<polarmc::BitVector> out;
        out.reserve(inputs.size());
        for (const auto& f : inputs)
          out.push_back(systematic ? polarmc::encode_systematic(code, f) : polarmc::encode(code, f));
        polarmc::write_bit_frames(path, out);
      } else if (e_format == "llr") {
        std::vector<polarmc::LlrVector> out;
        out.reserve(inputs.size());
        for (const auto& f : inputs) {
          const auto x = systematic ? polarmc::encode_systematic(code, f) : polarmc::encode(code, f);
          polarmc::LlrVector llr(x.size());
          for (std::size_t i = 0; i < x.size(); ++i) llr[i] = x[i] ? -e_llr_scale : e_llr_scale;
          out.push_back(std::move(llr));
        }
        polarmc::write_llr_frames(path, out);
      } else {
        throw polarmc::config_error("--format must be bits or llr");
      }
      manifest.record(path);
      manifest.config = {{"code", e_code}, {"in", e_in},         {"out", path},
                         {"mode", e_mode}, {"format", e_format}, {"llr_scale", e_llr_scale}};
      std::printf("encoded %zu frames -> %s\n", inputs.size(), path.c_str());
    } else if (d_cmd->parsed()) {
      manifest.record_input(d_code);
      manifest.record_input(d_in);
      manifest.record_input(d_schedule);
      const auto code = polarmc::load_code(d_code);
      const std::string path = join_path(out_dir, d_out);
      const auto variant = parse_decoder(d_decoder);
      const auto caps = d_caps.to_caps();
      const auto segments = (variant == polarmc::DecoderVariant::float_sc)
                                ? polarmc::detect_shortcuts(code, polarmc::ShortcutCaps::leaf_only())
                                : polarmc::detect_shortcuts(code, caps);

      std::vector<polarmc::BitVector> out;
      if (variant == polarmc::DecoderVariant::quantized) {
        const auto sched = d_schedule.empty() ? polarmc::default_schedule(code)
                                              : polarmc::load_schedule(d_schedule);
        polarmc::ScQuantDecoder dec(code, segments, sched);
        std::vector<std::vector<polarmc::QLlr>> frames;
        if (d_in_format == "qllr") {
          frames = polarmc::read_qllr_frames(d_in, code.block_length);
        } else if (d_in_format == "f32") {
          for (const auto& f : polarmc::read_llr_frames(d_in, code.block_length))
            frames.push_back(polarmc::quantize_frame(f, sched.format_at(0)));
        } else {
          throw polarmc::config_error("--in-format must be f32 or qllr");
        }
        for (const auto& f : frames) out.push_back(dec.decode(f));
      } else {
        if (d_in_format != "f32")
          throw polarmc::config_error("float decoders read --in-format f32 frames");
        polarmc::ScDecoder dec(code, segments);
        for (const auto& f : polarmc::read_llr_frames(d_in, code.block_length))
          out.push_back(dec.decode(f));
      }
      polarmc::write_bit_frames(path, out);
      manifest.record(path);
      manifest.config = {{"code", d_code},       {"in", d_in},
                         {"out", path},          {"decoder", d_decoder},
                         {"schedule", d_schedule}, {"in_format", d_in_format}};
      std::printf("decoded %zu frames -> %s\n", out.size(), path.c_str());
    } else if (s_cmd->parsed()) {
      manifest.record_input(s_code);
      manifest.record_input(s_schedule);
      polarmc::SimConfig cfg;
      cfg.code = polarmc::load_code(s_code);
      cfg.ebno_db = parse_ebno_list(s_ebno);
      cfg.decoder = parse_decoder(s_decoder);
      if (!s_schedule.empty()) cfg.schedule = polarmc::load_schedule(s_schedule);
      if (cfg.decoder == polarmc::DecoderVariant::quantized) {
        const auto sched = cfg.schedule ? *cfg.schedule : polarmc::default_schedule(cfg.code);
        std::string widths;
        for (int w : sched.per_depth_bits) widths += std::to_string(w);
        std::printf("quantization: channel %d bits, step %.6f "
                    "(spans mean + 3 sigma of the channel LLR at %.2f dB), widths %s\n",
                    sched.channel_bits, sched.step, cfg.code.design_snr_db, widths.c_str());
      }
      cfg.seed = seed;
      cfg.stop.min_frame_errors = s_min_fe;
      cfg.stop.max_frames = s_max_frames;
      cfg.threads = s_threads;

      const auto points = polarmc::run_sweep(cfg);
      const std::string path = join_path(out_dir, s_out);
      polarmc::write_file_text(path, polarmc::sweep_csv(points));
      manifest.record(path);
      manifest.config = {{"code", s_code},     {"ebno", s_ebno},
                         {"decoder", s_decoder}, {"schedule", s_schedule},
                         {"seed", seed},       {"min_fe", s_min_fe},
                         {"max_frames", s_max_frames}, {"threads", s_threads},
                         {"out", path}};
      for (const auto& p : points)
        std::printf("ebno %.3f dB: fer %.4e ber %.4e (%llu frames, %llu frame errors, %.1f s)\n",
                    p.ebno_db, p.fer(), p.ber(), static_cast<unsigned long long>(p.frames),
                    static_cast<unsigned long long>(p.frame_errors), p.elapsed_s);
      std::printf("wrote %s\n", path.c_str());
    } else if (a_cmd->parsed()) {
      manifest.record_input(a_code);
      manifest.record_input(a_delay_model);
      const auto code = a_code.empty() ? polarmc::construct_code(a_n, a_k, a_snr)
                                       : polarmc::load_code(a_code);
      int depth = a_depth;
      std::vector<double> per_stage;
      if (!a_delay_model.empty()) {
        auto dm = polarmc::load_delay_model(a_delay_model);
        const auto graph =
            polarmc::build_unrolled_graph(code, polarmc::detect_shortcuts(code), dm);
        if (a_calibrate_target > 0) {
          const double s = polarmc::calibrate_delay_scale(graph, a_budget, a_calibrate_target);
          const auto sched = polarmc::rrb_schedule(graph.scaled(s), a_budget);
          depth = sched.depth;
          per_stage = sched.per_stage_delay;
        } else {
          const auto sched = polarmc::rrb_schedule(graph, a_budget);
          depth = sched.depth;
          per_stage = sched.per_stage_delay;
        }
      }
      if (depth <= 0)
        throw polarmc::config_error("provide --depth or --delay-model (optionally with --calibrate-target)");

      polarmc::ArchConfig cfg =
          (a_io_period_ns > 0.0)
              ? polarmc::ArchConfig::from_io_period(a_cores, a_io_period_ns * 1e-9, depth,
                                                    code.block_length, code.info_length)
              : polarmc::ArchConfig::from_core_clock(a_cores, a_core_mhz * 1e6, depth,
                                                     code.block_length, code.info_length);
      if (a_theta >= 0.0) cfg.theta_deg = a_theta;
      const json report = arch_report(cfg, per_stage);
      const std::string text = report.dump(2) + "\n";
      if (a_out.empty()) {
        std::fputs(text.c_str(), stdout);
      } else {
        const std::string path = join_path(out_dir, a_out);
        polarmc::write_file_text(path, text);
        manifest.record(path);
      }
      manifest.config = {{"cores", a_cores},   {"core_mhz", a_core_mhz},
                         {"depth", depth},     {"theta", a_theta},
                         {"budget", a_budget}, {"delay_model", a_delay_model}};
    } else if (w_cmd->parsed()) {
      json rows = json::array();
      for (int p : parse_int_list(w_cores))
        for (int mhz : parse_int_list(w_mhz))
          for (int d : parse_int_list(w_depths))
            rows.push_back(arch_report(
                polarmc::ArchConfig::from_core_clock(p, mhz * 1e6, d, 1 << w_n, w_k), {}));
      const std::string text = rows.dump(2) + "\n";
      if (w_out.empty()) {
        std::fputs(text.c_str(), stdout);
      } else {
        const std::string path = join_path(out_dir, w_out);
        polarmc::write_file_text(path, text);
        manifest.record(path);
      }
      manifest.config = {{"cores_list", w_cores}, {"core_mhz_list", w_mhz},
                         {"depth_list", w_depths}, {"n", w_n}, {"k", w_k}};
    }

    manifest.finish();
    return 0;
  } catch (const polarmc::infeasible_error& e) {
    std::fprintf(stderr, "error (infeasible schedule): %s\n", e.what());
    return 5;
  } catch (const polarmc::io_error& e) {
    std::fprintf(stderr, "error (io): %s\n", e.what());
    return 4;
  } catch (const polarmc::config_error& e) {
    std::fprintf(stderr, "error (config): %s\n", e.what());
    return 3;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error (config): %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
