// Copyright 2026 The ftqa Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ftqa/binary_io.h"

#include <bit>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ftqa/error.h"

namespace ftqa {

void BinaryWriter::U32(uint32_t v) {
  for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void BinaryWriter::U64(uint64_t v) {
  for (int i = 0; i < 8; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void BinaryWriter::F64(double v) { U64(std::bit_cast<uint64_t>(v)); }

void BinaryWriter::String(std::string_view s) {
  U32(static_cast<uint32_t>(s.size()));
  out_.append(s);
}

void BinaryWriter::WriteFile(const std::string &path) const {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open " + tmp + " for writing");
    f.write(out_.data(), static_cast<std::streamsize>(out_.size()));
    if (!f) throw Error("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw Error("cannot rename " + tmp + " to " + path);
  }
}

BinaryReader BinaryReader::FromFile(const std::string &path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return BinaryReader(ss.str(), path);
}

void BinaryReader::Need(size_t n) {
  if (data_.size() - pos_ < n) throw FormatError(what_ + ": truncated file");
}

void BinaryReader::ExpectMagic(std::string_view magic) {
  if (data_.size() - pos_ < magic.size() ||
      std::string_view(data_).substr(pos_, magic.size()) != magic) {
    throw FormatError(what_ + ": bad magic header, expected " + std::string(magic));
  }
  pos_ += magic.size();
}

void BinaryReader::ExpectVersion(uint32_t expected) {
  const uint32_t version = U32();
  if (version != expected) {
    throw FormatError(what_ + ": unsupported version " + std::to_string(version) +
                      " (expected " + std::to_string(expected) + ")");
  }
}

uint32_t BinaryReader::U32() {
  Need(4);
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<uint32_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
  }
  pos_ += 4;
  return v;
}

uint64_t BinaryReader::U64() {
  Need(8);
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v |= static_cast<uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
  }
  pos_ += 8;
  return v;
}

double BinaryReader::F64() { return std::bit_cast<double>(U64()); }

std::string BinaryReader::String() {
  const uint32_t n = U32();
  Need(n);
  std::string s = data_.substr(pos_, n);
  pos_ += n;
  return s;
}

void BinaryReader::ExpectEnd() {
  if (!AtEnd()) throw FormatError(what_ + ": trailing bytes after payload");
}

}  // namespace ftqa
