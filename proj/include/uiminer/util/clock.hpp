#pragma once

#include <atomic>
#include <cstdint>

namespace uiminer::util {

// Millisecond wall clock plus sleep. Simulated devices use ManualClock so
// render waits cost no real time and timestamps are reproducible.
class Clock {
public:
    virtual ~Clock() = default;
    virtual std::int64_t now_ms() = 0;
    virtual void sleep_ms(std::int64_t ms) = 0;
};

class SystemClock final : public Clock {
public:
    std::int64_t now_ms() override;
    void sleep_ms(std::int64_t ms) override;
};

class ManualClock final : public Clock {
public:
    explicit ManualClock(std::int64_t start_ms = 0) : now_(start_ms) {}
    std::int64_t now_ms() override { return now_.load(); }
    void sleep_ms(std::int64_t ms) override { now_ += ms; }
    void advance(std::int64_t ms) { now_ += ms; }

private:
    std::atomic<std::int64_t> now_;
};

}  // namespace uiminer::util
