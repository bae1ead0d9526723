#pragma once

#include <atomic>
#include <cstddef>

namespace rsm::memtrack {

namespace detail {
inline std::atomic<std::size_t> current{0};
inline std::atomic<std::size_t> peak{0};

inline void add(std::size_t bytes) noexcept {
  std::size_t now = current.fetch_add(bytes, std::memory_order_relaxed) + bytes;
  std::size_t prev = peak.load(std::memory_order_relaxed);
  while (prev < now && !peak.compare_exchange_weak(prev, now, std::memory_order_relaxed)) {
  }
}

inline void sub(std::size_t bytes) noexcept {
  current.fetch_sub(bytes, std::memory_order_relaxed);
}
} // namespace detail

inline void reset() noexcept {
  detail::current.store(0, std::memory_order_relaxed);
  detail::peak.store(0, std::memory_order_relaxed);
}

inline std::size_t current_bytes() noexcept { return detail::current.load(std::memory_order_relaxed); }
inline std::size_t peak_bytes() noexcept { return detail::peak.load(std::memory_order_relaxed); }

// RAII charge against the tracked-allocation budget. Copy duplicates the
// charge, move transfers it; byte count is fixed at construction.
class charge {
public:
  charge() noexcept : bytes_(0) {}
  explicit charge(std::size_t bytes) noexcept : bytes_(bytes) { detail::add(bytes_); }
  charge(const charge& o) noexcept : bytes_(o.bytes_) { detail::add(bytes_); }
  charge(charge&& o) noexcept : bytes_(o.bytes_) { o.bytes_ = 0; }
  charge& operator=(const charge& o) noexcept {
    if (this != &o) {
      detail::sub(bytes_);
      bytes_ = o.bytes_;
      detail::add(bytes_);
    }
    return *this;
  }
  charge& operator=(charge&& o) noexcept {
    if (this != &o) {
      detail::sub(bytes_);
      bytes_ = o.bytes_;
      o.bytes_ = 0;
    }
    return *this;
  }
  ~charge() { detail::sub(bytes_); }

  // Re-price the charge, e.g. after a tracked buffer is resized.
  void reprice(std::size_t bytes) noexcept {
    detail::sub(bytes_);
    bytes_ = bytes;
    detail::add(bytes_);
  }

  std::size_t bytes() const noexcept { return bytes_; }

private:
  std::size_t bytes_;
};

} // namespace rsm::memtrack
