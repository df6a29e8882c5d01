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

#ifndef FTQA_ERROR_H_
#define FTQA_ERROR_H_

#include <stdexcept>
#include <string>

namespace ftqa {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string &what) : std::runtime_error(what) {}
};

// Malformed input data (JSONL lines, config values).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Binary file with a bad header, wrong version or truncated payload.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Tensor arguments with incompatible shapes.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// NaN or Inf produced by a tensor operation.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace ftqa

#endif  // FTQA_ERROR_H_
