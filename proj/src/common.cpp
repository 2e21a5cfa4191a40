#include "onb/common.hpp"

#include <atomic>
#include <thread>
#include <vector>

namespace onb {

namespace {
int g_max_threads = 0;
}

void set_max_threads(int n) { g_max_threads = n < 0 ? 0 : n; }

int max_threads() {
    if (g_max_threads > 0) return g_max_threads;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for_chunks(Index n, Index chunk,
                         const std::function<void(Index, Index, Index)>& fn) {
    const Index chunks = num_chunks(n, chunk);
    if (chunks == 0) return;
    const int workers =
        static_cast<int>(std::min<Index>(chunks, max_threads()));
    if (workers <= 1) {
        for (Index c = 0; c < chunks; ++c)
            fn(c, c * chunk, std::min(n, (c + 1) * chunk));
        return;
    }
    std::atomic<Index> next{0};
    auto run = [&] {
        for (;;) {
            const Index c = next.fetch_add(1);
            if (c >= chunks) return;
            fn(c, c * chunk, std::min(n, (c + 1) * chunk));
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (int i = 0; i < workers - 1; ++i) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
}

}  // namespace onb
