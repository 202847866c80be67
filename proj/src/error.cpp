#include "ncpano/error.hpp"

namespace ncpano {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kOutOfRange: return "out-of-range";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kDegenerate: return "geometry-degenerate";
    case ErrorCode::kInfeasibleLayout: return "infeasible-layout";
    case ErrorCode::kSegmentation: return "segmentation";
    case ErrorCode::kNoRealSolution: return "no-real-solution";
    case ErrorCode::kGeneration: return "generation";
    case ErrorCode::kMetric: return "metric";
    case ErrorCode::kInternal: return "internal";
  }
  return "unknown";
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse: return 2;
    case ErrorCode::kIo: return 3;
    case ErrorCode::kDegenerate: return 4;
    case ErrorCode::kInfeasibleLayout: return 5;
    case ErrorCode::kSegmentation: return 6;
    case ErrorCode::kNoRealSolution: return 7;
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kOutOfRange: return 8;
    case ErrorCode::kMetric: return 9;
    case ErrorCode::kGeneration: return 10;
    case ErrorCode::kInternal: return 70;
  }
  return 70;
}

}  // namespace ncpano
