// Copyright 2026 The CQFS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cqfs/error.hpp"

namespace cqfs {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NegativeBase: return "NegativeBase";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NegativeValue: return "NegativeValue";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::QuotaInfeasible: return "QuotaInfeasible";
    case ErrorCode::InfeasibleConfig: return "InfeasibleConfig";
    case ErrorCode::RankTooLarge: return "RankTooLarge";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::DegenerateCatalog: return "DegenerateCatalog";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace cqfs
