#include "bodyfield/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace bodyfield {

namespace {
std::atomic<unsigned> g_threads{0};
}

void set_thread_count(unsigned count) { g_threads = count; }

unsigned thread_count() {
    const unsigned requested = g_threads.load();
    if (requested != 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, std::size_t grain,
                  const std::function<void(std::size_t, std::size_t)>& body) {
    if (count == 0) return;
    grain = std::max<std::size_t>(grain, 1);
    const std::size_t chunks = (count + grain - 1) / grain;
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_count(), chunks));
    if (workers <= 1) {
        for (std::size_t c = 0; c < chunks; ++c)
            body(c * grain, std::min(count, (c + 1) * grain));
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= chunks) return;
            try {
                body(c * grain, std::min(count, (c + 1) * grain));
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = chunks;
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace bodyfield
