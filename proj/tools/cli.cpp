// Copyright 2026  The tfpaint Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tfpaint/errors.hpp"
#include "tfpaint/eval.hpp"
#include "tfpaint/io.hpp"
#include "tfpaint/pipeline.hpp"
#include "tfpaint/prox.hpp"
#include "tfpaint/solver.hpp"
#include "tfpaint/stft.hpp"

namespace tfpaint::cli {

namespace {

constexpr double kPresetRate = 16000.0;

struct StftFlags {
  std::size_t window_len = 2048;
  std::size_t hop = 512;
  std::size_t channels = 2048;

  StftConfig config(std::size_t signal_len) const {
    return {window_len, hop, channels, signal_len};
  }
};

// Everything one inpainting run needs, checked before any work starts.
struct RunConfig {
  Method method = Method::kUphain;
  InpaintOptions options;
  StftFlags stft;
  double sample_rate = kPresetRate;
  std::string input, mask, output, output_spectrogram, reference, trace;
  bool force = false;
};

void add_stft_flags(CLI::App *cmd, StftFlags &f, bool with_hop = true) {
  cmd->add_option("--window-len", f.window_len, "Window length in samples")
      ->capture_default_str();
  if (with_hop) cmd->add_option("--hop", f.hop, "Hop in samples")->capture_default_str();
  cmd->add_option("--channels", f.channels, "Frequency channels")->capture_default_str();
}

void add_solver_flags(CLI::App *cmd, SolverFlags &f, bool with_method = true) {
  if (with_method)
    cmd->add_option("--method", f.method, "uphain, bphain, bphain-oracle or tf-only")
        ->capture_default_str();
  cmd->add_option("--lambda", f.lambda, "Penalty weight (default depends on --threshold)");
  cmd->add_option("--inner", f.inner, "Inner iterations per pass")->capture_default_str();
  cmd->add_option("--outer", f.outer, "Outer passes (IF re-estimations)")
      ->capture_default_str();
  cmd->add_option("--eps", f.eps, "Outer stopping tolerance")->capture_default_str();
  cmd->add_option("--threshold", f.threshold, "soft, pshrink, smoothhard, l2 or l2sq")
      ->capture_default_str();
  cmd->add_option("--p", f.p, "p-shrinkage exponent");
  cmd->add_option("--alpha", f.alpha, "Smooth-hard sharpness");
  cmd->add_option("--relax", f.relax, "Relaxation factor in (0, 2)")->capture_default_str();
  cmd->add_option("--pad", f.pad, "Reliable columns on each side of a gap")
      ->capture_default_str();
  cmd->add_option("--jobs", f.jobs, "Worker threads")
      ->envname("TFPAINT_JOBS")
      ->capture_default_str();
}

void check_writable(const std::string &path, bool force) {
  if (!force && file_exists(path))
    throw IoError("'" + path + "' exists; pass --force to overwrite");
}

WavData load_wav(const std::string &path, std::ostream &err) {
  WavData w = read_wav(path);
  if (w.sample_rate != unsigned(kPresetRate))
    err << "warning: '" << path << "' is sampled at " << w.sample_rate
        << " Hz; presets assume 16000 Hz\n";
  return w;
}

bool is_spectrogram_file(const std::string &path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for reading");
  char magic[5] = {};
  f.read(magic, 5);
  return f.gcount() == 5 && std::string(magic, 5) == "SPGM1";
}

// Cuts x to the mask's columns and analyzes it.
Spectrogram analyze_for_mask(RealVector x, const MaskFile &mask, const StftFlags &stft,
                             const std::string &path, std::ostream &err) {
  const StftConfig cfg =
      StftFlags{stft.window_len, mask.hop, stft.channels}.config(mask.mask.n_cols * mask.hop);
  if (x.size() < cfg.signal_len)
    throw InvalidArgument("'" + path + "' has " + std::to_string(x.size()) +
                          " samples; the mask covers " + std::to_string(cfg.signal_len));
  if (x.size() > cfg.signal_len) {
    err << "warning: '" << path << "' truncated from " << x.size() << " to "
        << cfg.signal_len << " samples to match the mask\n";
    x.resize(cfg.signal_len);
  }
  cfg.validate();
  return analyze(x, AnalysisWindows::tight_hann(cfg).g, cfg);
}

// The spectrogram stored in `path` (SPGM1 or WAV), with geometry matching
// the mask.
Spectrogram load_spectrogram(const std::string &path, const MaskFile &mask,
                             const StftFlags &stft, double *sample_rate, std::ostream &err) {
  if (is_spectrogram_file(path)) {
    Spectrogram X = read_spectrogram(path);
    if (X.cols() != mask.mask.n_cols || X.config.hop != mask.hop)
      throw InvalidArgument("'" + path + "' has " + std::to_string(X.cols()) +
                            " columns with hop " + std::to_string(X.config.hop) +
                            "; the mask has " + std::to_string(mask.mask.n_cols) +
                            " with hop " + std::to_string(mask.hop));
    return X;
  }
  WavData w = load_wav(path, err);
  if (sample_rate) *sample_rate = w.sample_rate;
  return analyze_for_mask(std::move(w.samples), mask, stft, path, err);
}

std::string format_snr(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(4) << v;
  return ss.str();
}

void write_records(const std::string &csv, const std::string &json,
                   const std::vector<EvalRecord> &records) {
  if (!csv.empty()) write_results_csv(csv, records);
  if (!json.empty()) write_results_json(json, records);
}

std::vector<NamedSignal> select_signals(const std::string &kind, std::size_t limit,
                                        std::uint64_t seed, double seconds,
                                        const StftConfig &cfg) {
  std::vector<NamedSignal> out;
  for (NamedSignal &s : synthetic_suite(seed, seconds, kPresetRate, cfg)) {
    const bool keep = kind == "all" || (kind == "multitone" && s.kind == SignalKind::kMultitone) ||
                      (kind == "chirp" && s.kind == SignalKind::kChirp) ||
                      (kind == "tone" && s.kind == SignalKind::kTone);
    if (keep && (limit == 0 || out.size() < limit)) out.push_back(std::move(s));
  }
  if (out.empty()) throw InvalidArgument("no suite signals match '" + kind + "'");
  return out;
}

int cmd_generate(const std::string &signal, const std::string &suite_id, double freq,
                 std::optional<double> f1, std::size_t tones, std::uint64_t seed,
                 std::uint64_t suite_seed, double seconds, double rate, bool no_truncate,
                 const StftFlags &stft, const std::string &output, bool force,
                 std::ostream &out) {
  check_writable(output, force);
  const StftConfig cfg = stft.config(0);
  RealVector x;
  if (!suite_id.empty()) {
    for (NamedSignal &s : synthetic_suite(suite_seed, seconds, rate, cfg))
      if (s.id == suite_id) x = std::move(s.samples);
    if (x.empty()) throw InvalidArgument("no suite signal named '" + suite_id + "'");
  } else {
    SignalSpec spec;
    if (signal == "tone") spec = SignalSpec::tone(freq);
    else if (signal == "multitone") spec = SignalSpec::multitone(tones, seed);
    else if (signal == "chirp") spec = SignalSpec::chirp(freq, f1.value_or(freq));
    else if (signal == "noise") spec = SignalSpec::noise(seed);
    else throw InvalidArgument("unknown signal kind '" + signal + "'");
    x = make_test_signal(spec, seconds, rate);
    if (!no_truncate) x.resize(usable_columns(seconds, rate, cfg) * cfg.hop);
  }
  write_wav(output, {x, unsigned(std::lround(rate))});
  out << "wrote " << x.size() << " samples to " << output << "\n";
  return kOk;
}

int cmd_make_mask(double seconds, double rate, std::size_t gap_cols,
                  const std::string &placement, std::uint64_t seed, std::size_t pad,
                  const StftFlags &stft, const std::string &output, bool force,
                  std::ostream &out) {
  check_writable(output, force);
  MaskPlacement where;
  if (placement == "center") where = MaskPlacement::kPerSecondCenter;
  else if (placement == "random") where = MaskPlacement::kSeededRandom;
  else throw InvalidArgument("unknown placement '" + placement + "'");
  const StftConfig cfg = stft.config(0);
  const ColumnMask mask = make_mask(seconds, rate, cfg, gap_cols, where, seed, pad);
  write_mask(output, {mask, cfg.hop});
  out << "wrote " << mask.zero_cols.size() << " zero columns of " << mask.n_cols << " to "
      << output << "\n";
  return kOk;
}

int cmd_corrupt(const std::string &input, const std::string &mask_path,
                const std::string &output, const std::string &output_wav,
                const StftFlags &stft, bool force, std::ostream &out, std::ostream &err) {
  check_writable(output, force);
  if (!output_wav.empty()) check_writable(output_wav, force);
  const MaskFile mask = read_mask(mask_path);
  WavData w = load_wav(input, err);
  const unsigned rate = w.sample_rate;
  const Spectrogram Xc =
      apply_mask(analyze_for_mask(std::move(w.samples), mask, stft, input, err), mask.mask);
  write_spectrogram(output, Xc);
  if (!output_wav.empty())
    write_wav(output_wav,
              {synthesize(Xc, AnalysisWindows::tight_hann(Xc.config).g, Xc.config), rate});
  out << "zeroed " << mask.mask.zero_cols.size() << " of " << Xc.cols()
      << " columns; wrote " << output << "\n";
  return kOk;
}

int cmd_inpaint(const RunConfig &rc, std::ostream &out, std::ostream &err) {
  check_writable(rc.output, rc.force);
  if (!rc.output_spectrogram.empty()) check_writable(rc.output_spectrogram, rc.force);
  if (!rc.trace.empty()) check_writable(rc.trace, rc.force);
  if ((rc.method == Method::kBphainOracle) != !rc.reference.empty())
    throw InvalidArgument("--reference is required by, and only used with, bphain-oracle");

  const MaskFile mask = read_mask(rc.mask);
  double rate = rc.sample_rate;
  const Spectrogram Xc =
      apply_mask(load_spectrogram(rc.input, mask, rc.stft, &rate, err), mask.mask);

  InpaintOptions opt = rc.options;
  Spectrogram ref;
  if (!rc.reference.empty()) {
    ref = load_spectrogram(rc.reference, mask, rc.stft, nullptr, err);
    if (!ref.data.same_shape(Xc.data) || !(ref.config == Xc.config))
      throw InvalidArgument("reference geometry differs from the input's");
    opt.reference = &ref;
  }

  std::unique_ptr<TraceWriter> trace;
  GapTraceFn fn;
  if (!rc.trace.empty()) {
    trace = std::make_unique<TraceWriter>(rc.trace);
    fn = [&trace](std::size_t gap, const TraceEntry &e) { trace->write(gap, e); };
  }
  const InpaintResult res = inpaint_spectrogram(Xc, mask.mask, opt, fn);

  const RealVector y =
      synthesize(res.output, AnalysisWindows::tight_hann(res.output.config).g, res.output.config);
  write_wav(rc.output, {y, unsigned(std::lround(rate))});
  if (!rc.output_spectrogram.empty()) write_spectrogram(rc.output_spectrogram, res.output);

  for (const GapReport &g : res.gaps)
    out << "gap " << g.segment.gap.first << ".." << g.segment.gap.last << ": "
        << g.outer_iters_used << " pass(es)" << (g.early_stopped ? ", stopped early" : "")
        << ", " << std::fixed << std::setprecision(2) << g.runtime_s << " s\n";
  out << "wrote " << rc.output << "\n";
  return kOk;
}

int cmd_snr(const std::string &ref_path, const std::string &test_path, std::ostream &out,
            std::ostream &err) {
  const WavData ref = load_wav(ref_path, err);
  const WavData test = load_wav(test_path, err);
  out << format_snr(snr(ref.samples, test.samples)) << "\n";
  return kOk;
}

int cmd_sweep(const SolverFlags &flags, std::size_t gap_cols, std::vector<double> lambdas,
              const std::string &kind, std::size_t limit, std::uint64_t suite_seed,
              double seconds, const StftFlags &stft, const std::string &csv,
              const std::string &json, bool force, std::ostream &out) {
  if (!csv.empty()) check_writable(csv, force);
  if (!json.empty()) check_writable(json, force);
  const InpaintOptions opt = to_options(flags);
  if (lambdas.empty()) lambdas = default_lambda_grid();
  const StftConfig cfg = stft.config(0);
  const SweepResult r = sweep_lambda(select_signals(kind, limit, suite_seed, seconds, cfg),
                                     gap_cols, lambdas, opt, cfg, kPresetRate);
  write_records(csv, json, r.records);
  out << "lambda,mean_snr_db\n";
  for (const LambdaMean &m : r.means) out << m.lambda << "," << format_snr(m.mean_snr_db) << "\n";
  return kOk;
}

int cmd_compare(const SolverFlags &flags, const std::vector<std::string> &method_names,
                const std::vector<std::size_t> &gaps, const std::string &kind,
                std::size_t limit, std::uint64_t suite_seed, double seconds,
                const StftFlags &stft, const std::string &csv, const std::string &json,
                bool force, std::ostream &out) {
  if (!csv.empty()) check_writable(csv, force);
  if (!json.empty()) check_writable(json, force);
  const InpaintOptions opt = to_options(flags);
  std::vector<Method> methods;
  for (const std::string &m : method_names) methods.push_back(parse_method(m));
  const StftConfig cfg = stft.config(0);
  const CompareResult r = compare_methods(select_signals(kind, limit, suite_seed, seconds, cfg),
                                          gaps, methods, opt, cfg, kPresetRate);
  write_records(csv, json, r.records);
  out << "method,gap_cols,mean_snr_db,signals\n";
  for (const SummaryRow &s : r.summary)
    out << s.method << "," << s.gap_cols << "," << format_snr(s.mean_snr_db) << "," << s.count
        << "\n";
  return kOk;
}

}  // namespace

InpaintOptions to_options(const SolverFlags &f) {
  InpaintOptions opt;
  opt.method = parse_method(f.method);
  opt.solver = SolverConfig::with_thresholder(parse_thresholder_kind(f.threshold));
  if (f.lambda) opt.solver.lambda = *f.lambda;
  if (f.p) opt.solver.thresholder.p = *f.p;
  if (f.alpha) opt.solver.thresholder.alpha = *f.alpha;
  opt.solver.thresholder.lambda = opt.solver.lambda;
  opt.solver.inner_iters = f.inner;
  opt.solver.outer_iters = f.outer;
  opt.solver.epsilon = f.eps;
  opt.solver.alpha_relax = f.relax;
  opt.pad = f.pad;
  if (f.jobs == 0) throw InvalidArgument("--jobs must be at least 1");
  opt.jobs = f.jobs;
  opt.solver.validate();
  return opt;
}

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  CLI::App app{"Spectrogram column inpainting with a phase-aware prior", "tfpaint"};
  app.require_subcommand(1);

  // generate
  auto *gen = app.add_subcommand("generate", "Write a synthetic test signal as WAV");
  std::string g_signal = "multitone", g_suite, g_out;
  double g_freq = 440.0, g_seconds = 5.0, g_rate = kPresetRate;
  std::optional<double> g_f1;
  std::size_t g_tones = 3;
  std::uint64_t g_seed = 0, g_suite_seed = 2024;
  bool g_no_truncate = false, g_force = false;
  StftFlags g_stft;
  gen->add_option("--signal", g_signal, "tone, multitone, chirp or noise")->capture_default_str();
  gen->add_option("--suite", g_suite, "Take this signal from the synthetic suite instead");
  gen->add_option("--suite-seed", g_suite_seed, "Synthetic suite seed")->capture_default_str();
  gen->add_option("--freq", g_freq, "Tone or chirp start frequency in Hz")->capture_default_str();
  gen->add_option("--f1", g_f1, "Chirp end frequency in Hz");
  gen->add_option("--tones", g_tones, "Multitone components")->capture_default_str();
  gen->add_option("--seed", g_seed, "Multitone or noise seed")->capture_default_str();
  gen->add_option("--seconds", g_seconds, "Duration")->capture_default_str();
  gen->add_option("--sample-rate", g_rate, "Sample rate in Hz")->capture_default_str();
  gen->add_flag("--no-truncate", g_no_truncate, "Keep the full duration");
  add_stft_flags(gen, g_stft);
  gen->add_option("-o,--output", g_out, "Output WAV")->required();
  gen->add_flag("--force", g_force, "Overwrite existing files");

  // make-mask
  auto *mm = app.add_subcommand("make-mask", "Write a column mask as JSON");
  double m_seconds = 5.0, m_rate = kPresetRate;
  std::size_t m_gap = 0, m_pad = 0;
  std::string m_place = "center", m_out;
  std::uint64_t m_seed = 0;
  bool m_force = false;
  StftFlags m_stft;
  mm->add_option("--seconds", m_seconds, "Signal duration")->capture_default_str();
  mm->add_option("--sample-rate", m_rate, "Sample rate in Hz")->capture_default_str();
  mm->add_option("--gap-cols", m_gap, "Missing columns per second")->required();
  mm->add_option("--placement", m_place, "center or random")->capture_default_str();
  mm->add_option("--seed", m_seed, "Seed for random placement")->capture_default_str();
  mm->add_option("--pad", m_pad, "Reliable columns kept around each gap (0: window/hop)")
      ->capture_default_str();
  add_stft_flags(mm, m_stft);
  mm->add_option("-o,--output", m_out, "Output JSON")->required();
  mm->add_flag("--force", m_force, "Overwrite existing files");

  // corrupt
  auto *cor = app.add_subcommand("corrupt", "Zero the masked columns of a WAV's spectrogram");
  std::string c_in, c_mask, c_out, c_wav;
  bool c_force = false;
  StftFlags c_stft;
  cor->add_option("-i,--input", c_in, "Clean WAV")->required();
  cor->add_option("--mask", c_mask, "Mask JSON")->required();
  cor->add_option("-o,--output", c_out, "Corrupted spectrogram (SPGM1)")->required();
  cor->add_option("--output-wav", c_wav, "Also write the corrupted audio");
  add_stft_flags(cor, c_stft, false);
  cor->add_flag("--force", c_force, "Overwrite existing files");

  // inpaint
  auto *inp = app.add_subcommand("inpaint", "Restore the missing columns");
  RunConfig rc;
  SolverFlags i_flags;
  inp->add_option("-i,--input", rc.input, "Corrupted spectrogram (SPGM1) or audio (WAV)")
      ->required();
  inp->add_option("--mask", rc.mask, "Mask JSON")->required();
  inp->add_option("-o,--output", rc.output, "Restored WAV")->required();
  inp->add_option("--output-spectrogram", rc.output_spectrogram, "Also write the spectrogram");
  inp->add_option("--reference", rc.reference, "Clean WAV or SPGM1 for bphain-oracle");
  inp->add_option("--trace", rc.trace, "Per-iteration trace CSV");
  inp->add_option("--sample-rate", rc.sample_rate, "Output rate for SPGM1 input")
      ->capture_default_str();
  add_solver_flags(inp, i_flags);
  add_stft_flags(inp, rc.stft, false);
  inp->add_flag("--force", rc.force, "Overwrite existing files");

  // snr
  auto *sn = app.add_subcommand("snr", "Print the SNR of a test WAV against a reference");
  std::string s_ref, s_test;
  sn->add_option("reference", s_ref, "Reference WAV")->required();
  sn->add_option("test", s_test, "Test WAV")->required();

  // sweep and compare share the suite and output flags.
  std::string e_kind = "all", e_csv, e_json;
  std::size_t e_limit = 0;
  std::uint64_t e_seed = 2024;
  double e_seconds = 5.0;
  bool e_force = false;
  StftFlags e_stft;
  SolverFlags e_flags;
  auto add_eval_flags = [&](CLI::App *cmd, bool with_method) {
    cmd->add_option("--signals", e_kind, "all, multitone, chirp or tone")->capture_default_str();
    cmd->add_option("--limit", e_limit, "Use at most this many signals (0: all)")
        ->capture_default_str();
    cmd->add_option("--suite-seed", e_seed, "Synthetic suite seed")->capture_default_str();
    cmd->add_option("--seconds", e_seconds, "Signal duration")->capture_default_str();
    cmd->add_option("--csv", e_csv, "Results CSV");
    cmd->add_option("--json", e_json, "Results JSON");
    cmd->add_flag("--force", e_force, "Overwrite existing files");
    add_solver_flags(cmd, e_flags, with_method);
    add_stft_flags(cmd, e_stft);
  };

  auto *sw = app.add_subcommand("sweep", "Mean SNR over a lambda grid");
  std::size_t w_gap = 3;
  std::vector<double> w_lambdas;
  sw->add_option("--gap-cols", w_gap, "Missing columns per second")->capture_default_str();
  sw->add_option("--lambdas", w_lambdas, "Comma-separated grid (default 1e-7..1e2)")
      ->delimiter(',');
  add_eval_flags(sw, true);

  auto *cmp = app.add_subcommand("compare", "Mean SNR per method and gap length");
  std::vector<std::string> c_methods{"uphain", "bphain", "bphain-oracle", "tf-only"};
  std::vector<std::size_t> c_gaps{2, 4, 6};
  cmp->add_option("--methods", c_methods, "Comma-separated methods")
      ->delimiter(',')
      ->capture_default_str();
  cmp->add_option("--gap-cols", c_gaps, "Comma-separated gap lengths")
      ->delimiter(',')
      ->capture_default_str();
  add_eval_flags(cmp, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gen)
      return cmd_generate(g_signal, g_suite, g_freq, g_f1, g_tones, g_seed, g_suite_seed,
                          g_seconds, g_rate, g_no_truncate, g_stft, g_out, g_force, out);
    if (*mm)
      return cmd_make_mask(m_seconds, m_rate, m_gap, m_place, m_seed, m_pad, m_stft, m_out,
                           m_force, out);
    if (*cor) return cmd_corrupt(c_in, c_mask, c_out, c_wav, c_stft, c_force, out, err);
    if (*inp) {
      rc.options = to_options(i_flags);
      rc.method = rc.options.method;
      return cmd_inpaint(rc, out, err);
    }
    if (*sn) return cmd_snr(s_ref, s_test, out, err);
    if (*sw)
      return cmd_sweep(e_flags, w_gap, w_lambdas, e_kind, e_limit, e_seed, e_seconds, e_stft,
                       e_csv, e_json, e_force, out);
    if (*cmp)
      return cmd_compare(e_flags, c_methods, c_gaps, e_kind, e_limit, e_seed, e_seconds,
                         e_stft, e_csv, e_json, e_force, out);
  } catch (const DivergenceError &e) {
    err << "error: " << e.what() << " (iteration " << e.iteration() << ")\n";
    return kDivergence;
  } catch (const ContextError &e) {
    err << "error: " << e.what() << "\n";
    return kContext;
  } catch (const InvalidArgument &e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DegenerateWindow &e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  }
  return kUsage;
}

}  // namespace tfpaint::cli
