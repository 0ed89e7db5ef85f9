#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace recom {

enum class ErrorKind {
  MalformedFile,
  SchemaViolation,
  DisconnectedGraph,
  DanglingEdge,
  DuplicateUnitId,
  UnassignedUnit,
  UnknownUnit,
  LabelGap,
  DiscontiguousDistrict,
  EmptyDistrict,
  InvalidMove,
  NotConnected,
  UnbalancedInitialPlan,
  ZeroVAPDistrict,
  ZeroVotesDistrict,
  EmptyStream,
  UnknownMetric,
  GraphMismatch,
  NoVotesOnChangedUnits,
  InvalidConfig,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Every failure the engine reports. `subject` names the offending unit, edge,
/// path or metric; `districts` lists offending district ids where relevant.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string subject, std::string detail = {},
        std::vector<int> districts = {});

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& subject() const noexcept { return subject_; }
  const std::vector<int>& districts() const noexcept { return districts_; }

 private:
  ErrorKind kind_;
  std::string subject_;
  std::vector<int> districts_;
};

}  // namespace recom
