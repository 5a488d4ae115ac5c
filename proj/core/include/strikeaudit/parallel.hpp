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

#ifndef STRIKEAUDIT_PARALLEL_HPP_
#define STRIKEAUDIT_PARALLEL_HPP_

#include <cstddef>
#include <functional>

namespace strikeaudit {

// Runs task(i) for i in [0, count) on up to `threads` workers. Tasks must
// write only to their own output slot; the first exception thrown by any
// task is rethrown on the calling thread after all workers join.
void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& task);

}  // namespace strikeaudit

#endif  // STRIKEAUDIT_PARALLEL_HPP_
