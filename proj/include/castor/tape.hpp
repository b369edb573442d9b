// Two-sided growable tape and the simulator's instantaneous description.

#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "castor/machine.hpp"

namespace castor {

// Cells outside [leftmost(), rightmost()] have never been visited and are blank.
// Offsets are relative to the start cell.
class Tape {
 public:
  Tape() : cells_(kInitialSize, kBlank), origin_(kInitialSize / 2) {}

  Symbol read(std::int64_t pos) const {
    const std::int64_t i = pos + origin_;
    return (i >= 0 && i < static_cast<std::int64_t>(cells_.size()))
               ? cells_[static_cast<std::size_t>(i)]
               : kBlank;
  }

  // The position must already be inside the visited window.
  void write(std::int64_t pos, Symbol value) {
    Symbol& cell = cells_[static_cast<std::size_t>(pos + origin_)];
    nonblank_ += (value != kBlank) - (cell != kBlank);
    cell = value;
  }

  // Extends the visited window (and the buffer) to cover pos.
  void visit(std::int64_t pos) {
    if (pos >= leftmost_ && pos <= rightmost_) return;
    leftmost_ = std::min(leftmost_, pos);
    rightmost_ = std::max(rightmost_, pos);
    ensure_capacity(pos);
  }

  std::int64_t leftmost() const { return leftmost_; }
  std::int64_t rightmost() const { return rightmost_; }
  std::int64_t nonblank_count() const { return nonblank_; }
  bool blank() const { return nonblank_ == 0; }

  // Visited window as a string of digits, leftmost cell first.
  std::string window_string() const;
  // Window contents with blank margins trimmed; first_nonblank receives the
  // offset of the first returned cell.
  std::vector<Symbol> trimmed(std::int64_t* first_nonblank) const;

  // Same symbol at every offset.
  bool same_contents(const Tape& other) const;

  // Raw access for tight simulation loops. A loop that writes through raw()
  // must report the window and non-blank count back through sync().
  Symbol* raw() { return cells_.data(); }
  std::int64_t raw_origin() const { return origin_; }
  std::int64_t raw_size() const { return static_cast<std::int64_t>(cells_.size()); }
  void sync(std::int64_t leftmost, std::int64_t rightmost, std::int64_t nonblank) {
    leftmost_ = leftmost;
    rightmost_ = rightmost;
    nonblank_ = nonblank;
  }
  void ensure_capacity(std::int64_t pos) {
    while (pos + origin_ < 0 || pos + origin_ >= static_cast<std::int64_t>(cells_.size())) grow();
  }

 private:
  static constexpr std::size_t kInitialSize = 64;

  void grow();

  std::vector<Symbol> cells_;
  std::int64_t origin_;
  std::int64_t leftmost_ = 0;
  std::int64_t rightmost_ = 0;
  std::int64_t nonblank_ = 0;
};

struct Configuration {
  Tape tape;
  std::int64_t head = 0;
  StateId state;  // StateId::halt() once halted
  std::uint64_t steps = 0;
};

// Same state, same head offset and same symbol in every cell.
bool same_configuration(const Configuration& a, const Configuration& b);

}  // namespace castor
