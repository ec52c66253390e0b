#pragma once

#include <stdexcept>
#include <string>

namespace rigidity {

enum class ErrorKind {
  InvalidInput,
  OutOfRange,
  NotSimplyBounded,
  ConvexDomain,
  SearchFailed,
  PointOutsideClosure,
  ClipSensitive,
  UnpairedComponent,
  EpsilonTooLargeForClip,
  SampleCountTooSmall,
  NonFiniteIntegrand,
  RankDeficient,
  ConvexityLost,
  NoConvergence,
  ArcLengthMismatch,
  ClipTooSmall,
  DeformationDegenerate,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::NotSimplyBounded: return "NotSimplyBounded";
    case ErrorKind::ConvexDomain: return "ConvexDomain";
    case ErrorKind::SearchFailed: return "SearchFailed";
    case ErrorKind::PointOutsideClosure: return "PointOutsideClosure";
    case ErrorKind::ClipSensitive: return "ClipSensitive";
    case ErrorKind::UnpairedComponent: return "UnpairedComponent";
    case ErrorKind::EpsilonTooLargeForClip: return "EpsilonTooLargeForClip";
    case ErrorKind::SampleCountTooSmall: return "SampleCountTooSmall";
    case ErrorKind::NonFiniteIntegrand: return "NonFiniteIntegrand";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::ConvexityLost: return "ConvexityLost";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::ArcLengthMismatch: return "ArcLengthMismatch";
    case ErrorKind::ClipTooSmall: return "ClipTooSmall";
    case ErrorKind::DeformationDegenerate: return "DeformationDegenerate";
  }
  return "Unknown";
}

/// Exception carrying a machine-readable kind; the CLI maps kinds to exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace rigidity
