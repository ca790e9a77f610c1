#pragma once

#include <cmath>
#include <cstddef>
#include <functional>

namespace dslt {

/// Environment variable that overrides the default thread budget.
inline constexpr const char* kThreadsEnv = "DSLT_THREADS";

/// requested > 0 wins, then DSLT_THREADS, then hardware concurrency.
unsigned resolve_threads(unsigned requested = 0);

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Work items are
/// claimed dynamically, so fn must write only to index-owned storage. The
/// first exception thrown by any item is rethrown after all workers join.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

/// Neumaier-compensated accumulator.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace dslt
