// Copyright 2026 The nvdfq Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include "nvdfq/dynamics.hpp"
#include "nvdfq/geometry.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <unistd.h>
#include <vector>

namespace nvdfq {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace io {

/// Shortest decimal text that reads back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view text, const std::string& where) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(v))
    throw ParseError(where + ": not a number: '" + std::string(text) + "'");
  return v;
}

inline std::vector<std::string_view> split(std::string_view line, char sep = ',') {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i)
    if (i == line.size() || line[i] == sep) {
      out.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  return out;
}

/// Writes `content` to `path` through a sibling temporary file and a rename,
/// so readers never observe a partial file.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.parent_path() / (path.filename().string() + ".tmp." + std::to_string(::getpid()));
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + tmp.string() + " for writing");
    f << content;
    f.flush();
    if (!f) throw IoError("write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw IoError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline constexpr std::string_view kPulseHeader = "index,duration_us,phase_deg,amplitude_khz";

inline std::string pulse_csv(const PulseSequence& seq) {
  std::string out(kPulseHeader);
  out += '\n';
  for (std::size_t k = 0; k < seq.segments.size(); ++k) {
    const auto& s = seq.segments[k];
    out += std::to_string(k) + ',' + format_double(s.duration_us) + ',' + format_double(s.phase * 180.0 / kPi) +
           ',' + format_double(s.amplitude_khz) + '\n';
  }
  return out;
}

inline PulseSequence parse_pulse_csv(const std::string& text, const std::string& source = "pulse") {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(source + ": empty pulse file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kPulseHeader) throw ParseError(source + ":1: expected header '" + std::string(kPulseHeader) + "'");
  PulseSequence seq;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(lineno);
    const auto cols = split(line);
    if (cols.size() != 4) throw ParseError(where + ": expected 4 columns");
    if (parse_double(cols[0], where) != static_cast<double>(seq.segments.size()))
      throw ParseError(where + ": segment index out of order");
    ControlSegment s{parse_double(cols[1], where), parse_double(cols[2], where) * kPi / 180.0,
                     parse_double(cols[3], where)};
    if (!(s.duration_us >= 0.0)) throw ParseError(where + ": negative duration");
    seq.segments.push_back(s);
  }
  if (seq.segments.empty()) throw ParseError(source + ": no segments");
  return seq;
}

inline void write_pulse_csv(const std::filesystem::path& path, const PulseSequence& seq) {
  write_atomic(path, pulse_csv(seq));
}

inline PulseSequence read_pulse_csv(const std::filesystem::path& path) {
  return parse_pulse_csv(read_file(path), path.string());
}

/// Non-empty histogram bins: coupling_khz (bin centre), count, probability_mass.
inline std::string histogram_csv(const Histogram& h) {
  std::string out = "bin_lo_khz,bin_hi_khz,coupling_khz,count,probability_mass\n";
  const auto mass = h.probability_mass();
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    if (h.counts[i] == 0) continue;
    out += format_double(h.bin_width_khz * static_cast<double>(i)) + ',' +
           format_double(h.bin_width_khz * static_cast<double>(i + 1)) + ',' + format_double(h.bin_center(i)) +
           ',' + std::to_string(h.counts[i]) + ',' + format_double(mass[i]) + '\n';
  }
  return out;
}

inline std::string profile_csv(const std::vector<ProfileRow>& rows) {
  std::string out = "displacement_nm,B1_khz,B2_khz\n";
  for (const auto& r : rows)
    out += format_double(r.displacement_nm) + ',' + format_double(r.B1_khz) + ',' + format_double(r.B2_khz) + '\n';
  return out;
}

inline std::string fidelity_table_csv(const std::vector<NoiseSweepPoint>& table) {
  std::string out = "delta1,jitter_khz,fidelity\n";
  for (const auto& p : table)
    out += format_double(p.delta1) + ',' + format_double(p.jitter_khz) + ',' + format_double(p.fidelity) + '\n';
  return out;
}

}  // namespace io
}  // namespace nvdfq
