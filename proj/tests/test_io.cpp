#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <cstring>
#include <unistd.h>

#include "doctest.h"
#include "test_util.hpp"
#include "tfpaint/errors.hpp"
#include "tfpaint/io.hpp"

using namespace tfpaint;
using namespace tfpaint::testing;

namespace {

struct TempDir {
  std::filesystem::path dir;
  TempDir() {
    dir = std::filesystem::temp_directory_path() /
          ("tfpaint_io_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(dir);
  }
  ~TempDir() { std::filesystem::remove_all(dir); }
  std::string operator/(const std::string &name) const { return (dir / name).string(); }
  static inline int counter = 0;
};

std::string read_text(const std::string &path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_text(const std::string &path, const std::string &s) {
  std::ofstream f(path, std::ios::binary);
  f << s;
}

}  // namespace

TEST_CASE("wav round trip") {
  TempDir tmp;
  RealVector x = random_signal(4000, 11);
  double peak = 0.0;
  for (double v : x) peak = std::max(peak, std::abs(v));
  for (double &v : x) v *= 0.9 / peak;
  write_wav(tmp / "a.wav", {x, 16000});
  const WavData w = read_wav(tmp / "a.wav");
  CHECK(w.sample_rate == 16000);
  REQUIRE(w.samples.size() == x.size());
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(w.samples[i] - x[i]) <= 0.5 / 32768);

  // Quantized samples survive exactly.
  write_wav(tmp / "b.wav", w);
  CHECK(read_wav(tmp / "b.wav").samples == w.samples);
  CHECK(read_text(tmp / "a.wav") == read_text(tmp / "b.wav"));
  CHECK(read_text(tmp / "a.wav").size() == 44 + 2 * x.size());

  write_wav(tmp / "c.wav", {{-2.0, 1.0, 0.5, -1.0}, 8000});
  const WavData c = read_wav(tmp / "c.wav");
  CHECK(c.sample_rate == 8000);
  CHECK(c.samples == RealVector{-1.0, 32767.0 / 32768, 0.5, -1.0});
}

TEST_CASE("wav errors") {
  TempDir tmp;
  CHECK_THROWS_AS(read_wav(tmp / "missing.wav"), IoError);
  write_text(tmp / "junk.wav", "not a wav file at all");
  CHECK_THROWS_AS(read_wav(tmp / "junk.wav"), IoError);

  write_wav(tmp / "ok.wav", {{0.1, 0.2}, 16000});
  std::string raw = read_text(tmp / "ok.wav");
  std::string stereo = raw;
  stereo[22] = 2;
  write_text(tmp / "stereo.wav", stereo);
  CHECK_THROWS_AS(read_wav(tmp / "stereo.wav"), IoError);
  std::string bits8 = raw;
  bits8[34] = 8;
  write_text(tmp / "bits8.wav", bits8);
  CHECK_THROWS_AS(read_wav(tmp / "bits8.wav"), IoError);
  write_text(tmp / "short.wav", raw.substr(0, 30));
  CHECK_THROWS_AS(read_wav(tmp / "short.wav"), IoError);

  CHECK_THROWS_AS(write_wav(tmp / "nan.wav", {{std::nan("")}, 16000}), IoError);
  CHECK_THROWS_AS(write_wav((tmp / "no_dir") + "/x.wav", {{0.0}, 16000}), IoError);
}

TEST_CASE("wav reader skips unknown chunks") {
  TempDir tmp;
  write_wav(tmp / "ok.wav", {{0.25, -0.5, 0.125}, 22050});
  const std::string raw = read_text(tmp / "ok.wav");
  // Insert an odd-sized LIST chunk (padded to even) between fmt and data.
  std::string extra = std::string("LIST") + std::string("\x03\0\0\0", 4) + "abc" + '\0';
  write_text(tmp / "list.wav", raw.substr(0, 36) + extra + raw.substr(36));
  const WavData w = read_wav(tmp / "list.wav");
  CHECK(w.sample_rate == 22050);
  CHECK(w.samples == RealVector{0.25, -0.5, 0.125});
}

TEST_CASE("mask json") {
  TempDir tmp;
  const MaskFile m{ColumnMask::make(156, {3, 4, 5, 100}), 512};
  write_mask(tmp / "m.json", m);
  const MaskFile r = read_mask(tmp / "m.json");
  CHECK(r.mask == m.mask);
  CHECK(r.hop == 512);

  write_text(tmp / "h.json", R"({"n_cols": 10, "hop": 256, "zero_cols": [7, 2, 2]})");
  const MaskFile h = read_mask(tmp / "h.json");
  CHECK(h.hop == 256);
  CHECK(h.mask.zero_cols == std::vector<std::size_t>{2, 7});

  write_text(tmp / "range.json", R"({"n_cols": 10, "hop": 256, "zero_cols": [10]})");
  CHECK_THROWS_AS(read_mask(tmp / "range.json"), IoError);
  write_text(tmp / "neg.json", R"({"n_cols": 10, "hop": 256, "zero_cols": [-1]})");
  CHECK_THROWS_AS(read_mask(tmp / "neg.json"), IoError);
  write_text(tmp / "key.json", R"({"n_cols": 10, "zero_cols": []})");
  CHECK_THROWS_AS(read_mask(tmp / "key.json"), IoError);
  write_text(tmp / "bad.json", "{");
  CHECK_THROWS_AS(read_mask(tmp / "bad.json"), IoError);
}

TEST_CASE("spectrogram file round trip is bit-exact") {
  TempDir tmp;
  StftConfig cfg{16, 4, 32, 40};
  Spectrogram X{cfg, random_complex(32, 10, 5)};
  X(3, 4) = {-0.0, 1e-310};
  X(0, 0) = {std::nextafter(1.0, 2.0), -1e300};
  write_spectrogram(tmp / "x.spgm", X);

  const std::string raw = read_text(tmp / "x.spgm");
  CHECK(raw.size() == 21 + 16 * 32 * 10);
  CHECK(raw.substr(0, 5) == "SPGM1");
  CHECK(raw[5] == 32);
  CHECK(raw[9] == 10);
  CHECK(raw[13] == 4);
  CHECK(raw[17] == 16);
  // Row-major: the second stored value is X(0, 1).
  double second;
  std::memcpy(&second, raw.data() + 21 + 16, 8);
  CHECK(second == X(0, 1).real());

  const Spectrogram Y = read_spectrogram(tmp / "x.spgm");
  CHECK(Y.config == cfg);
  CHECK(std::memcmp(Y.data.data(), X.data.data(), 16 * X.data.size()) == 0);

  write_text(tmp / "cut.spgm", raw.substr(0, raw.size() - 1));
  CHECK_THROWS_AS(read_spectrogram(tmp / "cut.spgm"), IoError);
  write_text(tmp / "magic.spgm", "SPGM2" + raw.substr(5));
  CHECK_THROWS_AS(read_spectrogram(tmp / "magic.spgm"), IoError);
  std::string geom = raw;
  geom[13] = 20;  // hop larger than the window
  write_text(tmp / "geom.spgm", geom);
  CHECK_THROWS_AS(read_spectrogram(tmp / "geom.spgm"), IoError);
}

TEST_CASE("results files") {
  TempDir tmp;
  std::vector<EvalRecord> recs(2);
  recs[0] = {"uphain", 6, "chirp0", 12.5, 3.25, 0.01, 1000, 11};
  recs[1] = {"bphain", 1, "tone0", kSnrInfinity, 0.5, 0.01, 1000, 1};
  write_results_csv(tmp / "r.csv", recs);
  CHECK(read_text(tmp / "r.csv") ==
        "method,gap_cols,signal,snr_db,runtime_s,lambda\n"
        "uphain,6,chirp0,12.5,3.25,0.01\n"
        "bphain,1,tone0,inf,0.5,0.01\n");

  write_results_json(tmp / "r.json", recs);
  const std::string js = read_text(tmp / "r.json");
  CHECK(js.find("\"signal\": \"chirp0\"") != std::string::npos);
  CHECK(js.find("\"snr_db\": null") != std::string::npos);
  CHECK(js.find("\"iters_outer_used\": 11") != std::string::npos);
}

TEST_CASE("trace writer") {
  TempDir tmp;
  {
    TraceWriter w(tmp / "t.csv");
    w.write(0, {1, 2, 0.5, 0.25});
    w.write(3, {0, 9, 1.0, 0.0});
  }
  CHECK(read_text(tmp / "t.csv") ==
        "gap,outer,inner,objective,feasibility_residual\n0,1,2,0.5,0.25\n3,0,9,1,0\n");
  CHECK(file_exists(tmp / "t.csv"));
  CHECK_FALSE(file_exists(tmp / "u.csv"));
}
