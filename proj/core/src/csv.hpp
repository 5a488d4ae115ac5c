// Copyright 2026 The StrikeAudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef STRIKEAUDIT_SRC_CSV_HPP_
#define STRIKEAUDIT_SRC_CSV_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace strikeaudit::csv {

// Reads one record (RFC 4180 quoting). Returns false at end of input.
bool read_row(std::istream& in, std::vector<std::string>& fields);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace strikeaudit::csv

#endif  // STRIKEAUDIT_SRC_CSV_HPP_
