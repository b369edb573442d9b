#include "castor/tape.hpp"

namespace castor {

void Tape::grow() {
  const std::size_t old_size = cells_.size();
  const std::size_t new_size = old_size * 2;
  const std::int64_t shift = static_cast<std::int64_t>(old_size / 2);
  std::vector<Symbol> bigger(new_size, kBlank);
  std::copy(cells_.begin(), cells_.end(), bigger.begin() + shift);
  cells_ = std::move(bigger);
  origin_ += shift;
}

std::string Tape::window_string() const {
  std::string out;
  out.reserve(static_cast<std::size_t>(rightmost_ - leftmost_ + 1));
  for (std::int64_t p = leftmost_; p <= rightmost_; ++p) {
    out.push_back(static_cast<char>('0' + read(p)));
  }
  return out;
}

std::vector<Symbol> Tape::trimmed(std::int64_t* first_nonblank) const {
  std::int64_t lo = leftmost_, hi = rightmost_;
  while (lo <= hi && read(lo) == kBlank) ++lo;
  while (hi >= lo && read(hi) == kBlank) --hi;
  std::vector<Symbol> out;
  for (std::int64_t p = lo; p <= hi; ++p) out.push_back(read(p));
  if (first_nonblank != nullptr) *first_nonblank = out.empty() ? 0 : lo;
  return out;
}

bool Tape::same_contents(const Tape& other) const {
  if (nonblank_ != other.nonblank_) return false;
  const std::int64_t lo = std::min(leftmost_, other.leftmost_);
  const std::int64_t hi = std::max(rightmost_, other.rightmost_);
  for (std::int64_t p = lo; p <= hi; ++p) {
    if (read(p) != other.read(p)) return false;
  }
  return true;
}

bool same_configuration(const Configuration& a, const Configuration& b) {
  return a.state == b.state && a.head == b.head && a.tape.same_contents(b.tape);
}

}  // namespace castor
