#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <mutex>
#include <thread>

#include "actevo/evolve.hpp"
#include "actevo/sock.hpp"
#include "actevo/wire.hpp"

namespace actevo {

struct WorkerOptions {
  std::string worker_id = "worker";
  double heartbeat_seconds = 1.0;
  int connect_attempts = 5;
  double retry_backoff_seconds = 0.5;
  // The coordinator answers hello/result messages immediately, so a long
  // silence while waiting for one means it is gone.
  double io_timeout_seconds = 30.0;
};

struct WorkerStats {
  long tasks_completed = 0;
};

/// Pull-evaluate-report loop: request work via hello, train, report the
/// result, repeat; a side thread heartbeats at a fixed interval while an
/// evaluation runs.  On coordinator disconnect the worker retries with a
/// bounded backoff, then exits.
inline WorkerStats run_worker(const std::string& host, std::uint16_t port,
                              const FitnessFn& fitness_fn, const WorkerOptions& options = {}) {
  WorkerStats stats;
  for (int attempt = 0; attempt < options.connect_attempts; ++attempt) {
    Fd sock;
    try {
      sock = tcp_connect(host, port);
    } catch (const std::exception&) {
      std::this_thread::sleep_for(
          std::chrono::duration<double>(options.retry_backoff_seconds * (attempt + 1)));
      continue;
    }
    set_recv_timeout(sock.get(), options.io_timeout_seconds);

    std::mutex write_mutex;
    auto send_locked = [&](const WireMessage& m) {
      std::lock_guard<std::mutex> lock(write_mutex);
      return send_all(sock.get(), encode_message(m));
    };

    if (!send_locked(hello_message(options.worker_id))) continue;
    LineReader reader(sock.get());
    std::string line;
    bool graceful = false;
    while (reader.read_line(line)) {
      const auto msg = decode_message(line);
      if (!msg) break;
      if (msg->kind == WireMessage::Kind::shutdown) {
        graceful = true;
        break;
      }
      if (msg->kind != WireMessage::Kind::task) continue;

      // Heartbeat while the evaluation runs.
      std::atomic<bool> done{false};
      std::mutex hb_mutex;
      std::condition_variable hb_cv;
      std::thread heartbeat([&] {
        std::unique_lock<std::mutex> lock(hb_mutex);
        while (!done.load()) {
          hb_cv.wait_for(lock, std::chrono::duration<double>(options.heartbeat_seconds));
          if (done.load()) break;
          WireMessage hb;
          hb.kind = WireMessage::Kind::heartbeat;
          hb.worker_id = options.worker_id;
          send_locked(hb);
        }
      });

      WireMessage result;
      result.kind = WireMessage::Kind::result;
      result.task_id = msg->task_id;
      try {
        const ActivationGraph graph = parse_expr(msg->expr);
        const FitnessRecord rec = fitness_fn(graph, msg->seed);
        result.fitness = rec.status == FitnessStatus::unstable ? 0.0 : rec.fitness;
        result.status = rec.status;
        result.runtime_seconds = rec.runtime_seconds;
      } catch (const std::exception&) {
        // Unparseable task or a crashed evaluation: report it unstable
        // rather than dropping the connection.
        result.fitness = 0.0;
        result.status = FitnessStatus::unstable;
        result.runtime_seconds = 0.0;
      }

      {
        std::lock_guard<std::mutex> lock(hb_mutex);
        done.store(true);
      }
      hb_cv.notify_all();
      heartbeat.join();

      if (!send_locked(result)) break;
      ++stats.tasks_completed;
    }
    if (graceful) return stats;
  }
  return stats;
}

}  // namespace actevo
