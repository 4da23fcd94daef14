#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace slackwise {

enum class DecompositionKind { Cholesky, LU, QR };

/// The four per-iteration tasks. PD runs on the CPU, PU and TMU on the GPU,
/// Transfer on the host-device link.
enum class TaskKind { PD, PU, TMU, Transfer };

enum class ChecksumScheme { None, SingleSide, Full };

/// Degree of error propagation: a single element, one row or column of a
/// block, or beyond one row/column.
enum class ErrorKind { D0, D1, D2 };

inline constexpr std::array<ErrorKind, 3> kErrorKinds = {ErrorKind::D0, ErrorKind::D1,
                                                         ErrorKind::D2};
inline constexpr std::array<TaskKind, 4> kTaskKinds = {TaskKind::PD, TaskKind::PU,
                                                       TaskKind::TMU, TaskKind::Transfer};

constexpr std::size_t index(ErrorKind k) { return static_cast<std::size_t>(k); }
constexpr std::size_t index(TaskKind k) { return static_cast<std::size_t>(k); }

std::string_view to_string(DecompositionKind k);
std::string_view to_string(TaskKind k);
std::string_view to_string(ChecksumScheme s);
std::string_view to_string(ErrorKind k);

std::optional<DecompositionKind> parse_decomposition(std::string_view s);
std::optional<ChecksumScheme> parse_scheme(std::string_view s);

/// Frequency in MHz. All processor grids step by 100 MHz.
using Mhz = int;
inline constexpr Mhz kGridStepMhz = 100;

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Non-positive pivot or other breakdown inside a factorization.
class NumericBreakdown : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A detected fault that the configured recovery policy could not repair.
class UnrecoverableFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace slackwise
