#pragma once

#include <condition_variable>
#include <cstddef>
#include <deque>
#include <functional>
#include <future>
#include <mutex>
#include <optional>
#include <thread>
#include <type_traits>
#include <vector>

namespace oobr {

/// Fixed-size worker pool.
class ThreadPool {
public:
    explicit ThreadPool(std::size_t workers);
    ~ThreadPool();
    ThreadPool(const ThreadPool&) = delete;
    ThreadPool& operator=(const ThreadPool&) = delete;

    template <typename Fn>
    auto submit(Fn fn) -> std::future<std::invoke_result_t<Fn>> {
        using R = std::invoke_result_t<Fn>;
        auto task = std::make_shared<std::packaged_task<R()>>(std::move(fn));
        auto fut = task->get_future();
        {
            std::lock_guard lock(mu_);
            queue_.emplace_back([task] { (*task)(); });
        }
        cv_.notify_one();
        return fut;
    }

    std::size_t size() const { return threads_.size(); }

private:
    void loop();

    std::mutex mu_;
    std::condition_variable cv_;
    std::deque<std::function<void()>> queue_;
    std::vector<std::thread> threads_;
    bool stop_ = false;
};

/// Pulls tasks from `next` sequentially, runs `work` on them (in parallel
/// when jobs > 1) and hands results to `consume` strictly in task order.
/// At most 2 * jobs results are in flight, which bounds memory.
template <typename Next, typename Work, typename Consume>
void ordered_pipeline(std::size_t jobs, Next&& next, Work&& work, Consume&& consume) {
    using Task = typename std::invoke_result_t<Next&>::value_type;
    using Result = std::invoke_result_t<Work&, Task&>;
    if (jobs <= 1) {
        while (auto task = next()) {
            auto result = work(*task);
            consume(std::move(result));
        }
        return;
    }
    ThreadPool pool(jobs);
    std::deque<std::future<Result>> inflight;
    const std::size_t window = 2 * jobs;
    bool exhausted = false;
    while (!exhausted || !inflight.empty()) {
        while (!exhausted && inflight.size() < window) {
            auto task = next();
            if (!task) {
                exhausted = true;
                break;
            }
            inflight.push_back(pool.submit([&work, t = std::move(*task)]() mutable { return work(t); }));
        }
        if (inflight.empty()) break;
        auto result = inflight.front().get();
        inflight.pop_front();
        consume(std::move(result));
    }
}

}  // namespace oobr
