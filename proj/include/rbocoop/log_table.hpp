#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace rbocoop::detail {

// Precomputed log(i) and i*log(i) for small integers. Detectors on 0/1
// streams only ever need logs of integer counts, so the hot loops avoid
// transcendental calls. Immutable after first use; safe to share.
class LogTable {
 public:
  static constexpr std::size_t kSize = std::size_t{1} << 20;

  static const LogTable& instance() {
    static const LogTable table;
    return table;
  }

  double log(std::int64_t i) const {
    return static_cast<std::uint64_t>(i) < kSize ? log_[static_cast<std::size_t>(i)]
                                                 : std::log(static_cast<double>(i));
  }

  /// i * log(i) with 0 log 0 = 0.
  double xlogx(std::int64_t i) const {
    return static_cast<std::uint64_t>(i) < kSize
               ? xlogx_[static_cast<std::size_t>(i)]
               : static_cast<double>(i) * std::log(static_cast<double>(i));
  }

 private:
  LogTable() : log_(kSize), xlogx_(kSize) {
    log_[0] = -HUGE_VAL;
    xlogx_[0] = 0.0;
    for (std::size_t i = 1; i < kSize; ++i) {
      log_[i] = std::log(static_cast<double>(i));
      xlogx_[i] = static_cast<double>(i) * log_[i];
    }
  }

  std::vector<double> log_;
  std::vector<double> xlogx_;
};

inline bool is_binary(double x) { return x == 0.0 || x == 1.0; }

}  // namespace rbocoop::detail
