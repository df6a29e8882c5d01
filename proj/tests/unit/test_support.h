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

// Fixtures shared by the unit tests.

#ifndef FTQA_TESTS_TEST_SUPPORT_H_
#define FTQA_TESTS_TEST_SUPPORT_H_

#include <filesystem>
#include <string>
#include <vector>

#include "ftqa/corpus.h"

namespace ftqa::testing {

// Six documents (four entity pages, two news items) over eight entities.
// Sentence counts per document: 3, 3, 2, 2, 3, 2.
std::vector<Document> ToyDocuments();
std::vector<EntityRecord> ToyEntities();
Corpus ToyCorpus();

// A fresh empty directory under the system temp dir, removed on
// destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;

  const std::filesystem::path &path() const { return path_; }
  std::string File(const std::string &name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

std::string ReadFile(const std::string &path);

}  // namespace ftqa::testing

#endif  // FTQA_TESTS_TEST_SUPPORT_H_
