/*
 * Copyright 2026 The puncture authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace puncture::cli {

// Default output directory when --output is absent: results go to
// $PUNCTURE_OUTPUT_DIR/<subcommand>.<csv|json> instead of standard output.
inline constexpr const char* output_dir_env = "PUNCTURE_OUTPUT_DIR";

inline constexpr int exit_ok = 0;
inline constexpr int exit_domain_error = 1;
inline constexpr int exit_non_convergence = 2;
inline constexpr int exit_usage = 64;

// argv[0] is the program name.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
// Arguments without the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace puncture::cli
