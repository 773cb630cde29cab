#pragma once

#include <algorithm>
#include <chrono>
#include <deque>
#include <map>
#include <memory>
#include <vector>

#include "actevo/evolve.hpp"
#include "actevo/sock.hpp"
#include "actevo/wire.hpp"

namespace actevo {

struct CoordinatorOptions {
  double task_timeout_seconds = 30.0;  // without heartbeats a task is reassigned
  std::string spec_ref = "default";
};

/// Asynchronous regularized evolution over a worker pool.
///
/// Workers connect, say hello, and receive tasks; each result triggers the
/// next task on the same connection.  Parent selection samples S with
/// replacement from the P most recently completed evaluations; results below
/// the threshold V (and unstable ones) stay in that window but are never
/// chosen as parents.  Before P completions, fresh random candidates are
/// issued.  All mutation and parameterization randomness lives here, so a
/// task reassigned after a worker failure is reissued bit-identically.
///
/// Everything runs on one event loop: connection handling is multiplexed
/// with poll(), and every state transition is totally ordered.
class Coordinator {
 public:
  Coordinator(EvolutionConfig config, CoordinatorOptions options, const std::string& host,
              std::uint16_t port)
      : config_(config), options_(options), rng_(config.seed), listener_(host, port) {
    config_.validate();
  }

  std::uint16_t port() const { return listener_.port(); }

  /// Runs until C results are recorded; returns the completed history.
  SearchHistory run() {
    while (completed_ < config_.budget) {
      poll_once();
    }
    // Stop accepting, then tell every connected worker to shut down.  A
    // worker that misses the message (it was mid-evaluation when its socket
    // closed) reconnects against a refused port and exits after its bounded
    // retries.
    listener_.close();
    for (auto& [fd, conn] : conns_) {
      send_all(fd, encode_message(shutdown_message()));
    }
    conns_.clear();
    return std::move(history_);
  }

 private:
  using Clock = std::chrono::steady_clock;

  struct Task {
    long task_id = -1;
    ActivationGraph graph;
    std::string expr;
    std::uint64_t seed = 0;
    std::optional<long> parent_seq;
    std::string mutation;
    bool completed = false;
  };

  struct Assignment {
    long task_id = -1;
    int fd = -1;
    Clock::time_point deadline;
  };

  struct Conn {
    Fd fd;
    std::string inbuf;
    std::string worker_id;
    bool hello_done = false;
  };

  EvolutionConfig config_;
  CoordinatorOptions options_;
  Rng rng_;
  TcpListener listener_;

  std::map<int, Conn> conns_;
  std::map<long, Task> tasks_;
  std::vector<Assignment> assignments_;
  std::deque<long> pending_;  // reassignable task ids
  long fresh_issued_ = 0;
  long completed_ = 0;
  SearchHistory history_;

  void poll_once() {
    std::vector<pollfd> fds;
    fds.push_back({listener_.fd(), POLLIN, 0});
    for (auto& [fd, conn] : conns_) {
      fds.push_back({fd, POLLIN, 0});
    }
    // Wake up at the earliest deadline.
    int timeout_ms = 200;
    const auto now = Clock::now();
    for (const Assignment& a : assignments_) {
      const auto ms =
          std::chrono::duration_cast<std::chrono::milliseconds>(a.deadline - now).count();
      timeout_ms = std::min<int>(timeout_ms, std::max<int>(1, static_cast<int>(ms)));
    }
    ::poll(fds.data(), fds.size(), timeout_ms);

    if (fds[0].revents & POLLIN) {
      Fd client = listener_.accept();
      if (client.valid()) {
        const int fd = client.get();
        conns_.emplace(fd, Conn{std::move(client), {}, {}, false});
      }
    }
    for (std::size_t i = 1; i < fds.size(); ++i) {
      if (fds[i].revents & (POLLIN | POLLHUP | POLLERR)) {
        handle_readable(fds[i].fd);
        if (completed_ >= config_.budget) return;
      }
    }
    expire_deadlines();
  }

  void handle_readable(int fd) {
    const auto it = conns_.find(fd);
    if (it == conns_.end()) return;
    char chunk[4096];
    const ssize_t n = ::recv(fd, chunk, sizeof(chunk), 0);
    if (n <= 0) {
      drop_conn(fd);
      return;
    }
    it->second.inbuf.append(chunk, static_cast<std::size_t>(n));
    std::size_t pos;
    while ((pos = it->second.inbuf.find('\n')) != std::string::npos) {
      const std::string line = it->second.inbuf.substr(0, pos);
      it->second.inbuf.erase(0, pos + 1);
      if (!handle_message(fd, line)) {
        drop_conn(fd);
        return;
      }
      if (conns_.find(fd) == conns_.end() || completed_ >= config_.budget) return;
    }
  }

  // Returns false when the connection must be dropped.
  bool handle_message(int fd, const std::string& line) {
    const auto msg = decode_message(line);
    if (!msg) return false;  // malformed: drop, tasks get reassigned
    Conn& conn = conns_.at(fd);
    switch (msg->kind) {
      case WireMessage::Kind::hello:
        if (msg->protocol_version != kProtocolVersion) return false;
        conn.hello_done = true;
        conn.worker_id = msg->worker_id;
        return issue_task_to(fd);
      case WireMessage::Kind::heartbeat: {
        const auto deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                                 std::chrono::duration<double>(
                                                     options_.task_timeout_seconds));
        for (Assignment& a : assignments_) {
          if (a.fd == fd) a.deadline = deadline;
        }
        return true;
      }
      case WireMessage::Kind::result:
        if (!conn.hello_done) return false;
        handle_result(*msg);
        if (completed_ >= config_.budget) return true;
        return issue_task_to(fd);
      case WireMessage::Kind::task:
      case WireMessage::Kind::shutdown:
        return false;  // nonsense from a worker
    }
    return false;
  }

  void handle_result(const WireMessage& msg) {
    const auto it = tasks_.find(msg.task_id);
    if (it == tasks_.end() || it->second.completed) {
      return;  // late duplicate: idempotently discarded
    }
    Task& task = it->second;
    task.completed = true;
    // Remove every assignment of this task (including backups).
    std::erase_if(assignments_, [&](const Assignment& a) { return a.task_id == msg.task_id; });
    std::erase_if(pending_, [&](long id) { return id == msg.task_id; });

    Candidate cand;
    cand.graph = task.graph;
    cand.parent_seq = task.parent_seq;
    cand.mutation = task.mutation;
    FitnessRecord rec;
    rec.fitness = msg.fitness;
    rec.status = msg.status;
    rec.runtime_seconds = msg.runtime_seconds;
    if (rec.status == FitnessStatus::unstable) rec.fitness = 0.0;
    cand.fitness = rec;
    history_.record(std::move(cand), config_.population);
    ++completed_;
  }

  // Picks or generates work for the connection; false drops the connection.
  bool issue_task_to(int fd) {
    long task_id = -1;
    if (!pending_.empty()) {
      task_id = pending_.front();
      pending_.pop_front();
    } else if (fresh_issued_ < config_.budget) {
      task_id = generate_task();
    } else {
      // Budget fully issued: duplicate the outstanding task with the
      // earliest deadline so a straggler cannot stall termination.
      const Assignment* earliest = nullptr;
      for (const Assignment& a : assignments_) {
        if (!tasks_.at(a.task_id).completed &&
            (earliest == nullptr || a.deadline < earliest->deadline)) {
          earliest = &a;
        }
      }
      if (earliest == nullptr) return true;  // everything done; run() will shut down
      task_id = earliest->task_id;
    }
    const Task& task = tasks_.at(task_id);
    WireMessage m;
    m.kind = WireMessage::Kind::task;
    m.task_id = task.task_id;
    m.expr = task.expr;
    m.param_count = task.graph.param_count();
    m.spec_ref = options_.spec_ref;
    m.seed = task.seed;
    if (!send_all(fd, encode_message(m))) {
      pending_.push_front(task_id);
      return false;
    }
    assignments_.push_back(Assignment{
        task_id, fd,
        Clock::now() + std::chrono::duration_cast<Clock::duration>(
                           std::chrono::duration<double>(options_.task_timeout_seconds))});
    return true;
  }

  // Draws the next candidate.  Mirrors the sequential loop's use of the
  // random stream: before P completions fresh random candidates, afterwards
  // tournament selection over the window of the P most recently completed.
  long generate_task() {
    Task task;
    task.task_id = fresh_issued_++;
    task.seed = evaluation_seed(config_.seed, task.task_id);
    const long window = std::min<long>(completed_, config_.population);
    bool fresh = completed_ < config_.population;
    if (!fresh) {
      const auto begin = history_.entries.size() - static_cast<std::size_t>(window);
      const std::span<const Candidate> view(history_.entries.data() + begin,
                                            static_cast<std::size_t>(window));
      const auto parent =
          detail::pick_parent(view, config_.tournament, config_.threshold, rng_);
      if (parent) {
        const Candidate& p = view[*parent];
        auto [g, kind] = detail::make_child_graph(p.graph, rng_, config_.parameterize);
        task.graph = std::move(g);
        task.mutation = std::string(mutation_name(kind));
        task.parent_seq = p.seq;
      } else {
        fresh = true;  // no sampled candidate cleared the gate
      }
    }
    if (fresh) {
      task.graph = detail::make_seed_graph(rng_, config_.parameterize);
      task.mutation = "init";
    }
    task.expr = print_expr(task.graph);
    const long id = task.task_id;
    tasks_.emplace(id, std::move(task));
    return id;
  }

  void drop_conn(int fd) {
    reassign_for_fd(fd);
    conns_.erase(fd);
  }

  void reassign_for_fd(int fd) {
    std::vector<long> orphaned;
    std::erase_if(assignments_, [&](const Assignment& a) {
      if (a.fd != fd) return false;
      orphaned.push_back(a.task_id);
      return true;
    });
    requeue_orphans(orphaned);
  }

  void expire_deadlines() {
    const auto now = Clock::now();
    std::vector<long> orphaned;
    std::erase_if(assignments_, [&](const Assignment& a) {
      if (a.deadline > now) return false;
      orphaned.push_back(a.task_id);
      return true;
    });
    requeue_orphans(orphaned);
  }

  void requeue_orphans(const std::vector<long>& orphaned) {
    for (long id : orphaned) {
      if (tasks_.at(id).completed) continue;
      const bool still_assigned = std::any_of(
          assignments_.begin(), assignments_.end(),
          [&](const Assignment& a) { return a.task_id == id; });
      const bool already_pending =
          std::find(pending_.begin(), pending_.end(), id) != pending_.end();
      if (!still_assigned && !already_pending) pending_.push_back(id);
    }
  }
};

/// Convenience entry point: binds, serves until the budget is exhausted, and
/// returns the history.
inline SearchHistory serve(const EvolutionConfig& config, const std::string& host,
                           std::uint16_t port, const CoordinatorOptions& options = {}) {
  Coordinator coordinator(config, options, host, port);
  return coordinator.run();
}

}  // namespace actevo
