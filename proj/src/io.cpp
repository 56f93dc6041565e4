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

#include "tfpaint/io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "tfpaint/errors.hpp"

namespace tfpaint {

namespace {

using json = nlohmann::json;

std::ifstream open_in(const std::string &path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for reading");
  return f;
}

std::ofstream open_out(const std::string &path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  return f;
}

void finish_write(std::ofstream &f, const std::string &path) {
  f.flush();
  if (!f) throw IoError("write to '" + path + "' failed");
}

std::uint32_t get_u32(const unsigned char *p) {
  return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 |
         std::uint32_t(p[3]) << 24;
}

std::uint16_t get_u16(const unsigned char *p) {
  return std::uint16_t(p[0] | p[1] << 8);
}

void put_u32(std::string &s, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(char((v >> (8 * i)) & 0xff));
}

void put_u16(std::string &s, std::uint16_t v) {
  s.push_back(char(v & 0xff));
  s.push_back(char(v >> 8));
}

void put_f64(std::string &s, double v) {
  std::uint64_t b;
  std::memcpy(&b, &v, 8);
  for (int i = 0; i < 8; ++i) s.push_back(char((b >> (8 * i)) & 0xff));
}

double get_f64(const unsigned char *p) {
  std::uint64_t b = 0;
  for (int i = 0; i < 8; ++i) b |= std::uint64_t(p[i]) << (8 * i);
  double v;
  std::memcpy(&v, &b, 8);
  return v;
}

std::string slurp(const std::string &path) {
  std::ifstream f = open_in(path);
  std::ostringstream ss;
  ss << f.rdbuf();
  if (f.bad()) throw IoError("read from '" + path + "' failed");
  return ss.str();
}

std::uint32_t to_u32(std::size_t v, const char *what) {
  if (v > std::numeric_limits<std::uint32_t>::max())
    throw IoError(std::string(what) + " does not fit in 32 bits");
  return std::uint32_t(v);
}

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream ss;
  ss << std::setprecision(17) << v;
  return ss.str();
}

}  // namespace

bool file_exists(const std::string &path) {
  std::error_code ec;
  return std::filesystem::exists(path, ec);
}

WavData read_wav(const std::string &path) {
  const std::string raw = slurp(path);
  const auto *b = reinterpret_cast<const unsigned char *>(raw.data());
  const std::size_t n = raw.size();
  if (n < 12 || std::memcmp(b, "RIFF", 4) != 0 || std::memcmp(b + 8, "WAVE", 4) != 0)
    throw IoError("'" + path + "' is not a RIFF/WAVE file");

  bool have_fmt = false;
  WavData out;
  std::size_t pos = 12;
  while (pos + 8 <= n) {
    const std::size_t len = get_u32(b + pos + 4);
    const std::size_t body = pos + 8;
    if (std::memcmp(b + pos, "fmt ", 4) == 0) {
      if (len < 16 || body + 16 > n) throw IoError("'" + path + "': truncated fmt chunk");
      const std::uint16_t format = get_u16(b + body);
      const std::uint16_t channels = get_u16(b + body + 2);
      const std::uint16_t bits = get_u16(b + body + 14);
      if (format != 1 || bits != 16)
        throw IoError("'" + path + "': only 16-bit PCM is supported");
      if (channels != 1)
        throw IoError("'" + path + "': expected mono, got " + std::to_string(channels) +
                      " channels");
      out.sample_rate = get_u32(b + body + 4);
      if (out.sample_rate == 0) throw IoError("'" + path + "': sample rate is zero");
      have_fmt = true;
    } else if (std::memcmp(b + pos, "data", 4) == 0) {
      if (!have_fmt) throw IoError("'" + path + "': data chunk before fmt chunk");
      const std::size_t avail = std::min(len, n - body) / 2;
      out.samples.resize(avail);
      for (std::size_t i = 0; i < avail; ++i)
        out.samples[i] = double(std::int16_t(get_u16(b + body + 2 * i))) / 32768.0;
      return out;
    }
    pos = body + len + (len & 1);
  }
  throw IoError("'" + path + "': no data chunk");
}

void write_wav(const std::string &path, const WavData &wav) {
  const std::size_t bytes = 2 * wav.samples.size();
  if (bytes > 0xffffffffu - 36) throw IoError("'" + path + "': signal too long for WAV");
  std::string s;
  s.reserve(44 + bytes);
  s += "RIFF";
  put_u32(s, std::uint32_t(36 + bytes));
  s += "WAVEfmt ";
  put_u32(s, 16);
  put_u16(s, 1);
  put_u16(s, 1);
  put_u32(s, wav.sample_rate);
  put_u32(s, wav.sample_rate * 2);
  put_u16(s, 2);
  put_u16(s, 16);
  s += "data";
  put_u32(s, std::uint32_t(bytes));
  for (double v : wav.samples) {
    if (!std::isfinite(v)) throw IoError("'" + path + "': non-finite sample");
    const double q = std::clamp(std::nearbyint(v * 32768.0), -32768.0, 32767.0);
    put_u16(s, std::uint16_t(std::int16_t(q)));
  }
  std::ofstream f = open_out(path);
  f.write(s.data(), std::streamsize(s.size()));
  finish_write(f, path);
}

MaskFile read_mask(const std::string &path) {
  json j;
  try {
    j = json::parse(slurp(path));
  } catch (const json::exception &e) {
    throw IoError("'" + path + "': " + e.what());
  }
  MaskFile out;
  try {
    const auto n_cols = j.at("n_cols").get<std::int64_t>();
    const auto hop = j.at("hop").get<std::int64_t>();
    if (n_cols < 0 || hop <= 0) throw IoError("'" + path + "': n_cols and hop must be positive");
    std::vector<std::size_t> cols;
    for (const auto &c : j.at("zero_cols")) {
      const auto v = c.get<std::int64_t>();
      if (v < 0) throw IoError("'" + path + "': negative column index");
      cols.push_back(std::size_t(v));
    }
    out.hop = std::size_t(hop);
    out.mask = ColumnMask::make(std::size_t(n_cols), std::move(cols));
  } catch (const json::exception &e) {
    throw IoError("'" + path + "': " + e.what());
  } catch (const InvalidArgument &e) {
    throw IoError("'" + path + "': " + e.what());
  }
  return out;
}

void write_mask(const std::string &path, const MaskFile &mask) {
  mask.mask.validate();
  json j;
  j["n_cols"] = mask.mask.n_cols;
  j["hop"] = mask.hop;
  j["zero_cols"] = mask.mask.zero_cols;
  std::ofstream f = open_out(path);
  f << j.dump() << '\n';
  finish_write(f, path);
}

Spectrogram read_spectrogram(const std::string &path) {
  const std::string raw = slurp(path);
  const auto *b = reinterpret_cast<const unsigned char *>(raw.data());
  if (raw.size() < 21 || std::memcmp(b, "SPGM1", 5) != 0)
    throw IoError("'" + path + "' is not an SPGM1 file");
  const std::size_t M = get_u32(b + 5), N = get_u32(b + 9);
  StftConfig cfg;
  cfg.channels = M;
  cfg.hop = get_u32(b + 13);
  cfg.window_len = get_u32(b + 17);
  cfg.signal_len = N * cfg.hop;
  if (raw.size() != 21 + 16 * M * N)
    throw IoError("'" + path + "': expected " + std::to_string(21 + 16 * M * N) +
                  " bytes, found " + std::to_string(raw.size()));
  try {
    cfg.validate();
  } catch (const InvalidArgument &e) {
    throw IoError("'" + path + "': " + e.what());
  }
  Spectrogram X = Spectrogram::zeros(cfg);
  const unsigned char *p = b + 21;
  for (std::size_t m = 0; m < M; ++m)
    for (std::size_t k = 0; k < N; ++k, p += 16) X(m, k) = {get_f64(p), get_f64(p + 8)};
  return X;
}

void write_spectrogram(const std::string &path, const Spectrogram &X) {
  const std::size_t M = X.rows(), N = X.cols();
  std::string s;
  s.reserve(21 + 16 * M * N);
  s += "SPGM1";
  put_u32(s, to_u32(M, "channel count"));
  put_u32(s, to_u32(N, "frame count"));
  put_u32(s, to_u32(X.config.hop, "hop"));
  put_u32(s, to_u32(X.config.window_len, "window length"));
  for (std::size_t m = 0; m < M; ++m)
    for (std::size_t k = 0; k < N; ++k) {
      put_f64(s, X(m, k).real());
      put_f64(s, X(m, k).imag());
    }
  std::ofstream f = open_out(path);
  f.write(s.data(), std::streamsize(s.size()));
  finish_write(f, path);
}

void write_results_csv(const std::string &path, const std::vector<EvalRecord> &records) {
  std::ofstream f = open_out(path);
  f << "method,gap_cols,signal,snr_db,runtime_s,lambda\n";
  for (const EvalRecord &r : records)
    f << r.method << ',' << r.gap_cols << ',' << r.signal_id << ',' << format_double(r.snr_db)
      << ',' << format_double(r.runtime_s) << ',' << format_double(r.lambda) << '\n';
  finish_write(f, path);
}

void write_results_json(const std::string &path, const std::vector<EvalRecord> &records) {
  json j = json::array();
  for (const EvalRecord &r : records) {
    json o;
    o["method"] = r.method;
    o["gap_cols"] = r.gap_cols;
    o["signal"] = r.signal_id;
    o["snr_db"] = std::isfinite(r.snr_db) ? json(r.snr_db) : json(nullptr);
    o["runtime_s"] = r.runtime_s;
    o["lambda"] = r.lambda;
    o["iters_inner"] = r.iters_inner;
    o["iters_outer_used"] = r.iters_outer_used;
    j.push_back(std::move(o));
  }
  std::ofstream f = open_out(path);
  f << j.dump(2) << '\n';
  finish_write(f, path);
}

struct TraceWriter::Impl {
  std::string path;
  std::ofstream f;
};

TraceWriter::TraceWriter(const std::string &path) : impl_(new Impl{path, open_out(path)}) {
  impl_->f << "gap,outer,inner,objective,feasibility_residual\n";
}

TraceWriter::~TraceWriter() { delete impl_; }

void TraceWriter::write(std::size_t gap, const TraceEntry &e) {
  impl_->f << gap << ',' << e.outer << ',' << e.inner << ',' << format_double(e.objective)
           << ',' << format_double(e.feasibility_residual) << '\n';
  if (!impl_->f) throw IoError("write to '" + impl_->path + "' failed");
}

}  // namespace tfpaint
