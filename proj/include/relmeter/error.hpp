// Copyright 2026 The relmeter Authors
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

#ifndef RELMETER_ERROR_HPP
#define RELMETER_ERROR_HPP

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace relmeter {

enum class ErrorCode {
  ZeroColumnSubscriber,
  NonPositivePrice,
  IndexOutOfBounds,
  EmptyServiceSet,
  EmptySubscriberSet,
  DuplicateLabel,
  NonPositiveScale,
  ServiceSetMismatch,
  SurvivorNotInGroup,
  GroupTooSmall,
  PartsDoNotSum,
  TooManyServices,
  MalformedRow,
  UnpricedViewer,
  EmptyLog,
  InvalidConfig,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ZeroColumnSubscriber: return "ZeroColumnSubscriber";
    case ErrorCode::NonPositivePrice: return "NonPositivePrice";
    case ErrorCode::IndexOutOfBounds: return "IndexOutOfBounds";
    case ErrorCode::EmptyServiceSet: return "EmptyServiceSet";
    case ErrorCode::EmptySubscriberSet: return "EmptySubscriberSet";
    case ErrorCode::DuplicateLabel: return "DuplicateLabel";
    case ErrorCode::NonPositiveScale: return "NonPositiveScale";
    case ErrorCode::ServiceSetMismatch: return "ServiceSetMismatch";
    case ErrorCode::SurvivorNotInGroup: return "SurvivorNotInGroup";
    case ErrorCode::GroupTooSmall: return "GroupTooSmall";
    case ErrorCode::PartsDoNotSum: return "PartsDoNotSum";
    case ErrorCode::TooManyServices: return "TooManyServices";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::UnpricedViewer: return "UnpricedViewer";
    case ErrorCode::EmptyLog: return "EmptyLog";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

/// Every failure raised by the library. `index()` carries the offending
/// subscriber, line, or limit when the code has one.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::optional<std::size_t> index = std::nullopt)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), index_(index) {}

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> index_;
};

}  // namespace relmeter

#endif  // RELMETER_ERROR_HPP
