#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "actevo/fitness.hpp"

namespace actevo {

inline constexpr const char* kProtocolVersion = "1";

/// Messages exchanged between coordinator and workers: one JSON object per
/// line, UTF-8, no embedded newlines.
struct WireMessage {
  enum class Kind { hello, task, result, heartbeat, shutdown };

  Kind kind = Kind::heartbeat;

  // hello
  std::string worker_id;
  std::string protocol_version;

  // task
  long task_id = -1;
  std::string expr;
  int param_count = 0;
  std::string spec_ref;
  std::uint64_t seed = 0;  // serialized as a decimal string: JSON doubles
                           // cannot carry full 64-bit seeds

  // result
  double fitness = 0.0;
  FitnessStatus status = FitnessStatus::ok;
  double runtime_seconds = 0.0;
};

inline WireMessage hello_message(std::string worker_id) {
  WireMessage m;
  m.kind = WireMessage::Kind::hello;
  m.worker_id = std::move(worker_id);
  m.protocol_version = kProtocolVersion;
  return m;
}

inline WireMessage shutdown_message() {
  WireMessage m;
  m.kind = WireMessage::Kind::shutdown;
  return m;
}

inline std::string encode_message(const WireMessage& m) {
  nlohmann::json j;
  switch (m.kind) {
    case WireMessage::Kind::hello:
      j = {{"kind", "hello"},
           {"worker_id", m.worker_id},
           {"protocol_version", m.protocol_version}};
      break;
    case WireMessage::Kind::task:
      j = {{"kind", "task"}, {"task_id", m.task_id},  {"expr", m.expr},
           {"k", m.param_count}, {"spec_ref", m.spec_ref},
           {"seed", std::to_string(m.seed)}};
      break;
    case WireMessage::Kind::result:
      j = {{"kind", "result"},
           {"task_id", m.task_id},
           {"fitness", m.fitness},
           {"status", std::string(status_name(m.status))},
           {"runtime_seconds", m.runtime_seconds}};
      break;
    case WireMessage::Kind::heartbeat:
      j = {{"kind", "heartbeat"}, {"worker_id", m.worker_id}};
      break;
    case WireMessage::Kind::shutdown:
      j = {{"kind", "shutdown"}};
      break;
  }
  return j.dump() + "\n";
}

/// Decodes one line.  Returns nothing for malformed input (the peer is then
/// dropped by the caller).
inline std::optional<WireMessage> decode_message(const std::string& line) {
  nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    return std::nullopt;
  }
  WireMessage m;
  const std::string kind = j["kind"].get<std::string>();
  try {
    if (kind == "hello") {
      m.kind = WireMessage::Kind::hello;
      m.worker_id = j.at("worker_id").get<std::string>();
      m.protocol_version = j.at("protocol_version").get<std::string>();
    } else if (kind == "task") {
      m.kind = WireMessage::Kind::task;
      m.task_id = j.at("task_id").get<long>();
      m.expr = j.at("expr").get<std::string>();
      m.param_count = j.at("k").get<int>();
      m.spec_ref = j.at("spec_ref").get<std::string>();
      m.seed = std::stoull(j.at("seed").get<std::string>());
    } else if (kind == "result") {
      m.kind = WireMessage::Kind::result;
      m.task_id = j.at("task_id").get<long>();
      m.fitness = j.at("fitness").get<double>();
      m.status = j.at("status").get<std::string>() == "unstable" ? FitnessStatus::unstable
                                                                 : FitnessStatus::ok;
      m.runtime_seconds = j.at("runtime_seconds").get<double>();
    } else if (kind == "heartbeat") {
      m.kind = WireMessage::Kind::heartbeat;
      if (j.contains("worker_id")) m.worker_id = j["worker_id"].get<std::string>();
    } else if (kind == "shutdown") {
      m.kind = WireMessage::Kind::shutdown;
    } else {
      return std::nullopt;
    }
  } catch (const std::exception&) {
    return std::nullopt;
  }
  return m;
}

}  // namespace actevo
