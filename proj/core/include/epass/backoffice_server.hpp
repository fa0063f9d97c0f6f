// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>

#include "epass/backoffice.hpp"

// Line-delimited JSON over a Unix domain socket. One request per line:
//   {"op":"authorize","request":"<hex>"}       -> {"ok":true,"grant":"<hex>"}
//   {"op":"register","id":..,"public_key":..,"rights":[..]}
//   {"op":"revoke","k_ta":"<hex>"} / {"op":"reinstate","k_ta":"<hex>"}
//   {"op":"list"}                               -> {"ok":true,"registry":{..}}
// Failures answer {"ok":false,"error":"..."}.
namespace epass::backoffice {

/// Executes one request line; never throws.
std::string handle_request(Backoffice& office, std::string_view line);

class BackofficeServer {
 public:
  /// Registry changes are written to `registry_file` when one is given.
  BackofficeServer(Backoffice& office, std::filesystem::path socket_path,
                   std::optional<std::filesystem::path> registry_file = {});
  ~BackofficeServer();

  BackofficeServer(const BackofficeServer&) = delete;
  BackofficeServer& operator=(const BackofficeServer&) = delete;

  /// Binds the socket; afterwards clients may connect.
  void bind();
  /// Accepts connections until stop(); each connection gets its own thread.
  void serve();
  void stop();

 private:
  void handle_connection(int fd);

  Backoffice& office_;
  std::filesystem::path socket_path_;
  std::optional<std::filesystem::path> registry_file_;
  std::mutex persist_mutex_;
  std::atomic<bool> stopping_{false};
  int listen_fd_ = -1;
};

/// Sends one request line and returns the response line.
std::string call_backoffice(const std::filesystem::path& socket_path,
                            std::string_view request_line,
                            std::chrono::milliseconds timeout = std::chrono::seconds(5));

/// Grant relay through a running server; nullopt on timeout or transport
/// failure.
class SocketGrantService : public GrantService {
 public:
  explicit SocketGrantService(std::filesystem::path socket_path,
                              std::chrono::milliseconds timeout = std::chrono::seconds(5))
      : socket_path_(std::move(socket_path)), timeout_(timeout) {}

  std::optional<Bytes> relay(ByteView request) override;

 private:
  std::filesystem::path socket_path_;
  std::chrono::milliseconds timeout_;
};

}  // namespace epass::backoffice
