#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "slackwise/factorization.hpp"
#include "slackwise/flops.hpp"
#include "slackwise/matrix.hpp"
#include "slackwise/types.hpp"

namespace slackwise::abft {

using linalg::ChecksumComponent;
using linalg::checksum_flops;

inline constexpr double kDefaultTauCheck = 50.0;

/// Checksums over a rectangle of blocks. Column checksums are kept per block
/// row (one plain and one row-index-weighted vector over the columns); row
/// checksums, present only for the full scheme, per block column.
struct BlockChecksums {
  ChecksumScheme scheme = ChecksumScheme::None;
  linalg::BlockRegion region;
  std::size_t row_begin = 0, row_end = 0, col_begin = 0, col_end = 0;
  std::vector<std::vector<double>> col_plain, col_weighted;
  std::vector<std::vector<double>> row_plain, row_weighted;
  /// Magnitude reference per block (row-major over the region), used to
  /// scale the verification tolerance.
  std::vector<double> scale;
};

BlockChecksums encode(const linalg::DenseMatrix& m, const linalg::BlockLayout& layout,
                      ChecksumScheme scheme);
BlockChecksums encode_region(const linalg::DenseMatrix& m, const linalg::BlockLayout& layout,
                             const linalg::BlockRegion& region, ChecksumScheme scheme);

/// Checksums the output region of `task` will have after it runs, computed
/// from the pre-task state by applying the task's operation to the checksum
/// vectors instead of the data.
BlockChecksums maintain(const linalg::FactorizationState& pre, TaskKind task, std::size_t k,
                        ChecksumScheme scheme);

struct BlockLocation {
  std::size_t block_row = 0, block_col = 0;
  ErrorKind kind = ErrorKind::D0;
  bool corrected = false;
};

struct CorrectionReport {
  std::array<std::size_t, 3> detected{};
  std::array<std::size_t, 3> corrected{};
  bool uncorrectable = false;
  std::vector<BlockLocation> locations;

  std::size_t total_detected() const { return detected[0] + detected[1] + detected[2]; }
  std::size_t total_corrected() const { return corrected[0] + corrected[1] + corrected[2]; }
  void merge(const CorrectionReport& other);
};

/// Compares `m` against the stored checksums, repairs what the scheme can and
/// re-verifies every repaired block.
CorrectionReport verify_correct(linalg::DenseMatrix& m, const linalg::BlockLayout& layout,
                                const BlockChecksums& sums, double tau_check = kDefaultTauCheck);
CorrectionReport verify_correct(linalg::FactorizationState& state, const BlockChecksums& sums,
                                double tau_check = kDefaultTauCheck);

/// A perturbation of a height x width patch inside one block. 0D faults are
/// 1x1; 1D faults span a full row or column of the block.
struct InjectedFault {
  ErrorKind kind = ErrorKind::D0;
  std::size_t block_row = 0, block_col = 0;
  std::size_t row_offset = 0, col_offset = 0;
  std::size_t height = 1, width = 1;
  std::vector<double> magnitudes;  // column-major over the patch
  std::size_t iteration = 0;
  TaskKind task = TaskKind::TMU;
};

/// Adds each fault's magnitudes to the matrix. Throws on out-of-range patches.
void inject_faults(linalg::DenseMatrix& m, const linalg::BlockLayout& layout,
                   const std::vector<InjectedFault>& plan);
void inject_faults(linalg::FactorizationState& state, const std::vector<InjectedFault>& plan);

/// Draws one fault of `kind` in a block chosen uniformly from `region`.
/// Magnitudes are magnitude * (0.5 + U) with a random sign.
InjectedFault random_fault(ErrorKind kind, const linalg::BlockLayout& layout,
                           const linalg::BlockRegion& region, double magnitude,
                           std::mt19937_64& rng, std::size_t iteration = 0,
                           TaskKind task = TaskKind::TMU);

/// Runs one task under protection: checksums are projected from the pre-task
/// state, the task runs, `faults` are injected into its output, then the
/// output is verified and corrected. With scheme None the faults stay.
CorrectionReport protected_task(linalg::FactorizationState& state, TaskKind task, std::size_t k,
                                ChecksumScheme scheme, const std::vector<InjectedFault>& faults,
                                double tau_check = kDefaultTauCheck);

}  // namespace slackwise::abft
