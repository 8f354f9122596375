// include/mcfe/io.h

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

#ifndef MCFE_IO_H_
#define MCFE_IO_H_

#include <string>
#include <vector>

#include "mcfe/types.h"

namespace mcfe {

// RIFF WAV reader; accepts 16-bit PCM and 32-bit IEEE float.
MultiChannelWave ReadWav(const std::string &path);

// Writes 32-bit float WAV (write-temp-then-rename).
void WriteWav(const std::string &path, const MultiChannelWave &wave);

// RTTM: field 4 = onset seconds, field 5 = duration seconds,
// field 8 = speaker label; other fields are ignored. Segments are grouped
// per speaker in order of first appearance; overlapping or touching
// segments of the same speaker are merged.
std::vector<SegmentAnnotation> ReadRttm(const std::string &path);
std::vector<SegmentAnnotation> ParseRttm(const std::string &text);
void WriteRttm(const std::string &path, const std::string &file_id,
               const std::vector<SegmentAnnotation> &annotations);
std::string FormatRttm(const std::string &file_id,
                       const std::vector<SegmentAnnotation> &annotations);

// Geometry sidecar: JSON list of [x, y, z] meters, one entry per channel.
std::vector<Vec3> ParseGeometryJson(const std::string &json_text);
std::vector<Vec3> ReadGeometryJson(const std::string &path);

std::string ReadTextFile(const std::string &path);
void AtomicWriteFile(const std::string &path, const std::string &contents);

}  // namespace mcfe

#endif  // MCFE_IO_H_
