#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace paircorr {

/// Worker-count cap shared by the parallel routines.
/// Results never depend on the count: work is split into fixed blocks and
/// merged in block order.
class Threads {
public:
    Threads() : count_(default_count()) {}
    explicit Threads(unsigned count) : count_(count == 0 ? 1 : count) {}

    unsigned count() const noexcept { return count_; }

    static unsigned default_count() {
        const unsigned hw = std::thread::hardware_concurrency();
        return hw == 0 ? 1 : hw;
    }

private:
    unsigned count_;
};

/// Runs body(block) for block in [0, blocks), with at most threads.count()
/// workers. Each block index is processed exactly once.
inline void parallel_blocks(std::size_t blocks, const Threads& threads,
                            const std::function<void(std::size_t)>& body) {
    const std::size_t workers = std::min<std::size_t>(threads.count(), blocks);
    if (workers <= 1) {
        for (std::size_t b = 0; b < blocks; ++b) body(b);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t b = w; b < blocks; b += workers) body(b);
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace paircorr
