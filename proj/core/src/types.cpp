#include "slackwise/types.hpp"

namespace slackwise {

std::string_view to_string(DecompositionKind k) {
  switch (k) {
    case DecompositionKind::Cholesky: return "cholesky";
    case DecompositionKind::LU: return "lu";
    case DecompositionKind::QR: return "qr";
  }
  return "?";
}

std::string_view to_string(TaskKind k) {
  switch (k) {
    case TaskKind::PD: return "pd";
    case TaskKind::PU: return "pu";
    case TaskKind::TMU: return "tmu";
    case TaskKind::Transfer: return "transfer";
  }
  return "?";
}

std::string_view to_string(ChecksumScheme s) {
  switch (s) {
    case ChecksumScheme::None: return "none";
    case ChecksumScheme::SingleSide: return "single";
    case ChecksumScheme::Full: return "full";
  }
  return "?";
}

std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::D0: return "0d";
    case ErrorKind::D1: return "1d";
    case ErrorKind::D2: return "2d";
  }
  return "?";
}

std::optional<DecompositionKind> parse_decomposition(std::string_view s) {
  if (s == "cholesky" || s == "cho" || s == "potrf") return DecompositionKind::Cholesky;
  if (s == "lu" || s == "getrf") return DecompositionKind::LU;
  if (s == "qr" || s == "geqrf") return DecompositionKind::QR;
  return std::nullopt;
}

std::optional<ChecksumScheme> parse_scheme(std::string_view s) {
  if (s == "none") return ChecksumScheme::None;
  if (s == "single" || s == "single_side") return ChecksumScheme::SingleSide;
  if (s == "full") return ChecksumScheme::Full;
  return std::nullopt;
}

}  // namespace slackwise
