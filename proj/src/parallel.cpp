#include "inloop/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace inloop {

int worker_count()
{
  if (const char* env = std::getenv("INLOOP_WORKERS"))
  {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0)
      return static_cast<int>(std::min<long>(n, 256));
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body, int workers)
{
  if (count == 0)
    return;
  if (workers <= 0)
    workers = worker_count();
  const auto threads = std::min<std::size_t>(static_cast<std::size_t>(workers), count);

  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    for (std::size_t i = next++; i < count; i = next++)
    {
      try
      {
        body(i);
      }
      catch (...)
      {
        errors[i] = std::current_exception();
      }
    }
  };

  if (threads <= 1)
  {
    run();
  }
  else
  {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; t++)
      pool.emplace_back(run);
    for (auto& t : pool)
      t.join();
  }
  for (auto& e : errors)
    if (e)
      std::rethrow_exception(e);
}

} // namespace inloop
