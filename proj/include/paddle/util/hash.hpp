/*
 Copyright 2026 The Paddle Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace paddle::util {

// Lower-case hex SHA-1 of `data`.
std::string sha1_hex(std::string_view data);

// Git blob object id: SHA-1 over "blob <size>\0" followed by the contents.
std::string git_blob_hash(std::string_view contents);
std::string git_blob_hash_file(const std::filesystem::path& path);

}  // namespace paddle::util
