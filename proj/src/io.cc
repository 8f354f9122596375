// src/io.cc

// Copyright 2026  The mcfe authors

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

#include "mcfe/io.h"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace mcfe {

namespace {

uint32_t ReadU32(const char *p) {
  uint32_t v;
  std::memcpy(&v, p, 4);
  return v;
}

uint16_t ReadU16(const char *p) {
  uint16_t v;
  std::memcpy(&v, p, 2);
  return v;
}

void AppendU32(std::string *s, uint32_t v) {
  char b[4];
  std::memcpy(b, &v, 4);
  s->append(b, 4);
}

void AppendU16(std::string *s, uint16_t v) {
  char b[2];
  std::memcpy(b, &v, 2);
  s->append(b, 2);
}

}  // namespace

std::string ReadTextFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInputError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void AtomicWriteFile(const std::string &path, const std::string &contents) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInputError("cannot write file: " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw InvalidInputError("short write to: " + tmp.string());
  }
  fs::rename(tmp, target);
}

MultiChannelWave ReadWav(const std::string &path) {
  std::string raw = ReadTextFile(path);
  if (raw.size() < 44 || raw.compare(0, 4, "RIFF") != 0 ||
      raw.compare(8, 4, "WAVE") != 0) {
    throw InvalidInputError("not a RIFF/WAVE file: " + path);
  }

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t sample_rate = 0;
  size_t data_off = 0, data_len = 0;
  bool have_fmt = false;

  size_t pos = 12;
  while (pos + 8 <= raw.size()) {
    std::string id = raw.substr(pos, 4);
    uint32_t len = ReadU32(raw.data() + pos + 4);
    size_t body = pos + 8;
    if (body + len > raw.size()) len = static_cast<uint32_t>(raw.size() - body);
    if (id == "fmt ") {
      if (len < 16) throw InvalidInputError("truncated fmt chunk: " + path);
      format = ReadU16(raw.data() + body);
      channels = ReadU16(raw.data() + body + 2);
      sample_rate = ReadU32(raw.data() + body + 4);
      bits = ReadU16(raw.data() + body + 14);
      have_fmt = true;
    } else if (id == "data") {
      data_off = body;
      data_len = len;
    }
    pos = body + len + (len & 1);  // chunks are word-aligned
  }

  if (!have_fmt || data_off == 0) {
    throw InvalidInputError("missing fmt or data chunk: " + path);
  }
  if (channels == 0 || sample_rate == 0) {
    throw InvalidInputError("invalid WAV header: " + path);
  }

  const bool pcm16 = (format == 1 && bits == 16);
  const bool float32 = (format == 3 && bits == 32);
  if (!pcm16 && !float32) {
    throw InvalidInputError(
        "unsupported WAV encoding (want PCM16 or float32): " + path);
  }

  const size_t bytes_per_sample = pcm16 ? 2 : 4;
  const size_t frame_bytes = bytes_per_sample * channels;
  const long n = static_cast<long>(data_len / frame_bytes);

  MultiChannelWave wave;
  wave.sample_rate = static_cast<int>(sample_rate);
  wave.samples = SampleMatrix(channels, n);
  const char *d = raw.data() + data_off;
  for (long t = 0; t < n; ++t) {
    for (int c = 0; c < channels; ++c) {
      const char *p = d + t * frame_bytes + c * bytes_per_sample;
      if (pcm16) {
        int16_t v;
        std::memcpy(&v, p, 2);
        wave.samples(c, t) = static_cast<double>(v) / 32768.0;
      } else {
        float v;
        std::memcpy(&v, p, 4);
        wave.samples(c, t) = static_cast<double>(v);
      }
    }
  }
  return wave;
}

void WriteWav(const std::string &path, const MultiChannelWave &wave) {
  wave.Validate();
  const int channels = wave.num_channels();
  const long n = wave.num_samples();
  const uint32_t data_bytes = static_cast<uint32_t>(4 * channels * n);

  std::string out;
  out.reserve(44 + data_bytes);
  out.append("RIFF");
  AppendU32(&out, 36 + data_bytes);
  out.append("WAVE");
  out.append("fmt ");
  AppendU32(&out, 16);
  AppendU16(&out, 3);  // IEEE float
  AppendU16(&out, static_cast<uint16_t>(channels));
  AppendU32(&out, static_cast<uint32_t>(wave.sample_rate));
  AppendU32(&out, static_cast<uint32_t>(wave.sample_rate * 4 * channels));
  AppendU16(&out, static_cast<uint16_t>(4 * channels));
  AppendU16(&out, 32);
  out.append("data");
  AppendU32(&out, data_bytes);
  for (long t = 0; t < n; ++t) {
    for (int c = 0; c < channels; ++c) {
      float v = static_cast<float>(wave.samples(c, t));
      char b[4];
      std::memcpy(b, &v, 4);
      out.append(b, 4);
    }
  }
  AtomicWriteFile(path, out);
}

std::vector<SegmentAnnotation> ParseRttm(const std::string &text) {
  // speaker -> sorted interval list; speaker order of first appearance
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::pair<double, double>>> spans;

  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == ';' || line[0] == '#') continue;
    std::istringstream ls(line);
    std::vector<std::string> fields;
    std::string tok;
    while (ls >> tok) fields.push_back(tok);
    if (fields.empty()) continue;
    if (fields[0] != "SPEAKER") continue;  // other RTTM record types ignored
    if (fields.size() < 8) {
      throw InvalidInputError("RTTM line " + std::to_string(line_no) +
                              ": expected at least 8 fields");
    }
    double onset, dur;
    try {
      onset = std::stod(fields[3]);
      dur = std::stod(fields[4]);
    } catch (const std::exception &) {
      throw InvalidInputError("RTTM line " + std::to_string(line_no) +
                              ": bad onset/duration");
    }
    if (onset < 0.0 || dur <= 0.0) {
      throw InvalidInputError("RTTM line " + std::to_string(line_no) +
                              ": onset must be >= 0 and duration > 0");
    }
    const std::string &speaker = fields[7];
    if (spans.find(speaker) == spans.end()) order.push_back(speaker);
    spans[speaker].emplace_back(onset, onset + dur);
  }

  std::vector<SegmentAnnotation> annotations;
  for (const std::string &speaker : order) {
    auto &iv = spans[speaker];
    std::sort(iv.begin(), iv.end());
    SegmentAnnotation ann;
    ann.speaker = speaker;
    for (const auto &[s, e] : iv) {
      if (!ann.intervals.empty() && s <= ann.intervals.back().second) {
        ann.intervals.back().second = std::max(ann.intervals.back().second, e);
      } else {
        ann.intervals.emplace_back(s, e);
      }
    }
    ann.Validate();
    annotations.push_back(std::move(ann));
  }
  return annotations;
}

std::vector<SegmentAnnotation> ReadRttm(const std::string &path) {
  return ParseRttm(ReadTextFile(path));
}

std::string FormatRttm(const std::string &file_id,
                       const std::vector<SegmentAnnotation> &annotations) {
  std::ostringstream out;
  for (const auto &ann : annotations) {
    for (const auto &[start, end] : ann.intervals) {
      char line[256];
      std::snprintf(line, sizeof(line),
                    "SPEAKER %s 1 %.6f %.6f <NA> <NA> %s <NA> <NA>\n",
                    file_id.c_str(), start, end - start, ann.speaker.c_str());
      out << line;
    }
  }
  return out.str();
}

void WriteRttm(const std::string &path, const std::string &file_id,
               const std::vector<SegmentAnnotation> &annotations) {
  AtomicWriteFile(path, FormatRttm(file_id, annotations));
}

std::vector<Vec3> ParseGeometryJson(const std::string &json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error &e) {
    throw InvalidInputError(std::string("geometry: invalid JSON: ") +
                            e.what());
  }
  if (!j.is_array() || j.empty()) {
    throw InvalidInputError("geometry: expected a non-empty JSON list");
  }
  std::vector<Vec3> geometry;
  for (size_t i = 0; i < j.size(); ++i) {
    const auto &entry = j[i];
    if (!entry.is_array() || entry.size() != 3 || !entry[0].is_number() ||
        !entry[1].is_number() || !entry[2].is_number()) {
      throw InvalidInputError("geometry[" + std::to_string(i) +
                              "]: expected [x, y, z] in meters");
    }
    geometry.emplace_back(entry[0].get<double>(), entry[1].get<double>(),
                          entry[2].get<double>());
  }
  return geometry;
}

std::vector<Vec3> ReadGeometryJson(const std::string &path) {
  return ParseGeometryJson(ReadTextFile(path));
}

}  // namespace mcfe
