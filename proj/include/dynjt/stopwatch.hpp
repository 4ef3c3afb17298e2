#pragma once

#include <chrono>
#include <cstdint>

namespace dynjt {

// Wall-clock phase timer. When disabled it reads no clock and reports zero,
// which keeps benchmark output byte-reproducible across runs.
class Stopwatch {
public:
    explicit Stopwatch(bool enabled = true) : enabled_(enabled) {
        if (enabled_) start_ = std::chrono::steady_clock::now();
    }

    std::int64_t micros() const {
        if (!enabled_) return 0;
        const auto now = std::chrono::steady_clock::now();
        return std::chrono::duration_cast<std::chrono::microseconds>(now - start_).count();
    }

private:
    bool enabled_;
    std::chrono::steady_clock::time_point start_{};
};

}  // namespace dynjt
