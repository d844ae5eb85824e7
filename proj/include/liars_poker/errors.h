// Copyright 2026 The Liar's Poker Lab Authors.
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

#ifndef LIARS_POKER_ERRORS_H_
#define LIARS_POKER_ERRORS_H_

#include <stdexcept>
#include <string>

namespace liars_poker {

// Bad configuration, malformed hand, out-of-range index, shape mismatch.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An action that is not legal in the current state, or played by the wrong
// seat.
class IllegalAction : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// An operation requested in the wrong phase of a round.
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Checkpoint file problems: bad magic, version, truncation, config mismatch.
class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite loss or gradient during training.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Network failure talking to a chat-completion endpoint. Retriable.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The LLM gateway gave up on a seat after repeated transport failures.
class GatewayOutage : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace liars_poker

#endif  // LIARS_POKER_ERRORS_H_
