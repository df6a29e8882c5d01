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

// Little-endian binary encoding shared by the cache and checkpoint formats.

#ifndef FTQA_BINARY_IO_H_
#define FTQA_BINARY_IO_H_

#include <cstdint>
#include <string>
#include <string_view>

namespace ftqa {

class BinaryWriter {
 public:
  void Magic(std::string_view magic) { out_.append(magic); }
  void U32(uint32_t v);
  void U64(uint64_t v);
  void F64(double v);
  void String(std::string_view s);

  const std::string &data() const { return out_; }
  // Writes the buffer atomically enough for our purposes: to a temp file,
  // then renamed over `path`.
  void WriteFile(const std::string &path) const;

 private:
  std::string out_;
};

// Bounds-checked reader; every overrun throws FormatError mentioning `what`.
class BinaryReader {
 public:
  BinaryReader(std::string data, std::string what)
      : data_(std::move(data)), what_(std::move(what)) {}
  static BinaryReader FromFile(const std::string &path);

  void ExpectMagic(std::string_view magic);
  // Reads a u32 version and throws FormatError unless it equals `expected`.
  void ExpectVersion(uint32_t expected);
  uint32_t U32();
  uint64_t U64();
  double F64();
  std::string String();
  bool AtEnd() const { return pos_ == data_.size(); }
  void ExpectEnd();

 private:
  void Need(size_t n);

  std::string data_;
  std::string what_;
  size_t pos_ = 0;
};

}  // namespace ftqa

#endif  // FTQA_BINARY_IO_H_
