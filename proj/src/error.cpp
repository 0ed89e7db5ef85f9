#include "recom/error.hpp"

namespace recom {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedFile: return "MalformedFile";
    case ErrorKind::SchemaViolation: return "SchemaViolation";
    case ErrorKind::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorKind::DanglingEdge: return "DanglingEdge";
    case ErrorKind::DuplicateUnitId: return "DuplicateUnitId";
    case ErrorKind::UnassignedUnit: return "UnassignedUnit";
    case ErrorKind::UnknownUnit: return "UnknownUnit";
    case ErrorKind::LabelGap: return "LabelGap";
    case ErrorKind::DiscontiguousDistrict: return "DiscontiguousDistrict";
    case ErrorKind::EmptyDistrict: return "EmptyDistrict";
    case ErrorKind::InvalidMove: return "InvalidMove";
    case ErrorKind::NotConnected: return "NotConnected";
    case ErrorKind::UnbalancedInitialPlan: return "UnbalancedInitialPlan";
    case ErrorKind::ZeroVAPDistrict: return "ZeroVAPDistrict";
    case ErrorKind::ZeroVotesDistrict: return "ZeroVotesDistrict";
    case ErrorKind::EmptyStream: return "EmptyStream";
    case ErrorKind::UnknownMetric: return "UnknownMetric";
    case ErrorKind::GraphMismatch: return "GraphMismatch";
    case ErrorKind::NoVotesOnChangedUnits: return "NoVotesOnChangedUnits";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

namespace {

std::string format_message(ErrorKind kind, const std::string& subject,
                           const std::string& detail) {
  std::string msg{to_string(kind)};
  if (!subject.empty()) msg += "(" + subject + ")";
  if (!detail.empty()) msg += ": " + detail;
  return msg;
}

}  // namespace

Error::Error(ErrorKind kind, std::string subject, std::string detail,
             std::vector<int> districts)
    : std::runtime_error(format_message(kind, subject, detail)),
      kind_(kind),
      subject_(std::move(subject)),
      districts_(std::move(districts)) {}

}  // namespace recom
