// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

#include "epass/backoffice_server.hpp"

#include <nlohmann/json.hpp>
#include <poll.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <functional>
#include <thread>
#include <vector>

#include "epass/io.hpp"

namespace epass::backoffice {

using nlohmann::json;

namespace {

crypto::VerifyKey key_field(const json& j, const char* field) {
  if (!j.contains(field) || !j[field].is_string())
    throw InvalidInput(std::string(field) + ": missing");
  Bytes b = from_hex(j[field].get<std::string>());
  if (b.size() != crypto::kVerifyKeySize)
    throw InvalidInput(std::string(field) + ": expected 32 bytes");
  crypto::VerifyKey k{};
  std::copy(b.begin(), b.end(), k.begin());
  return k;
}

sockaddr_un address(const std::filesystem::path& path) {
  sockaddr_un addr{};
  addr.sun_family = AF_UNIX;
  std::string s = path.string();
  if (s.size() >= sizeof(addr.sun_path))
    throw InvalidInput("socket: path too long");
  std::memcpy(addr.sun_path, s.c_str(), s.size() + 1);
  return addr;
}

class Fd {
 public:
  explicit Fd(int fd) : fd_(fd) {}
  ~Fd() {
    if (fd_ >= 0) ::close(fd_);
  }
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  int get() const { return fd_; }

 private:
  int fd_;
};

bool write_all(int fd, std::string_view data) {
  while (!data.empty()) {
    ssize_t n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    data.remove_prefix(static_cast<std::size_t>(n));
  }
  return true;
}

std::string handle(Backoffice& office, std::string_view line,
                   const std::function<void()>& changed) {
  json out;
  try {
    json req;
    try {
      req = json::parse(line);
    } catch (const json::exception&) {
      throw InvalidInput("request: not valid JSON");
    }
    if (!req.is_object() || !req.contains("op") || !req["op"].is_string())
      throw InvalidInput("op: missing");
    std::string op = req["op"].get<std::string>();

    if (op == "authorize") {
      if (!req.contains("request") || !req["request"].is_string())
        throw InvalidInput("request: missing");
      out["grant"] = to_hex(office.authorize_wire(from_hex(req["request"].get<std::string>())));
    } else if (op == "register") {
      if (!req.contains("id") || !req["id"].is_string()) throw InvalidInput("id: missing");
      DgSet rights;
      if (!req.contains("rights") || !req["rights"].is_array())
        throw InvalidInput("rights: missing");
      for (const auto& r : req["rights"]) {
        if (!r.is_number_integer()) throw InvalidInput("rights: expected integers");
        rights.insert(r.get<int>());
      }
      office.register_authority(req["id"].get<std::string>(),
                                key_field(req, "public_key"), rights);
      changed();
    } else if (op == "revoke") {
      office.revoke_terminal(key_field(req, "k_ta"));
      changed();
    } else if (op == "reinstate") {
      office.reinstate_terminal(key_field(req, "k_ta"));
      changed();
    } else if (op == "list") {
      out["registry"] = json::parse(registry_to_json(office.snapshot()));
    } else {
      throw InvalidInput("op: unknown operation '" + op + "'");
    }
    out["ok"] = true;
  } catch (const std::exception& e) {
    out = json{{"ok", false}, {"error", e.what()}};
  }
  return out.dump();
}

}  // namespace

std::string handle_request(Backoffice& office, std::string_view line) {
  return handle(office, line, [] {});
}

BackofficeServer::BackofficeServer(Backoffice& office,
                                   std::filesystem::path socket_path,
                                   std::optional<std::filesystem::path> registry_file)
    : office_(office),
      socket_path_(std::move(socket_path)),
      registry_file_(std::move(registry_file)) {}

BackofficeServer::~BackofficeServer() {
  if (listen_fd_ >= 0) {
    ::close(listen_fd_);
    std::error_code ec;
    std::filesystem::remove(socket_path_, ec);
  }
}

void BackofficeServer::bind() {
  auto addr = address(socket_path_);
  std::error_code ec;
  std::filesystem::remove(socket_path_, ec);
  listen_fd_ = ::socket(AF_UNIX, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw ProtocolError("socket: " + std::string(std::strerror(errno)));
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 ||
      ::listen(listen_fd_, 16) != 0)
    throw ProtocolError("socket " + socket_path_.string() + ": " +
                        std::strerror(errno));
}

void BackofficeServer::stop() { stopping_ = true; }

void BackofficeServer::serve() {
  if (listen_fd_ < 0) bind();
  std::vector<std::jthread> workers;
  while (!stopping_) {
    pollfd p{listen_fd_, POLLIN, 0};
    int ready = ::poll(&p, 1, 100);
    if (ready <= 0) continue;
    int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) continue;
    workers.emplace_back([this, fd] { handle_connection(fd); });
  }
}

void BackofficeServer::handle_connection(int raw_fd) {
  Fd fd(raw_fd);
  auto persist = [this] {
    if (!registry_file_) return;
    std::lock_guard lock(persist_mutex_);
    io::write_file(*registry_file_, registry_to_json(office_.snapshot()));
  };
  std::string buffer;
  char chunk[4096];
  while (!stopping_) {
    pollfd p{fd.get(), POLLIN, 0};
    int ready = ::poll(&p, 1, 100);
    if (ready < 0 && errno != EINTR) return;
    if (ready <= 0) continue;
    ssize_t n = ::recv(fd.get(), chunk, sizeof(chunk), 0);
    if (n <= 0) return;
    buffer.append(chunk, static_cast<std::size_t>(n));
    std::size_t nl;
    while ((nl = buffer.find('\n')) != std::string::npos) {
      std::string line = buffer.substr(0, nl);
      buffer.erase(0, nl + 1);
      if (!write_all(fd.get(), handle(office_, line, persist) + "\n")) return;
    }
  }
}

std::string call_backoffice(const std::filesystem::path& socket_path,
                            std::string_view request_line,
                            std::chrono::milliseconds timeout) {
  auto addr = address(socket_path);
  Fd fd(::socket(AF_UNIX, SOCK_STREAM, 0));
  if (fd.get() < 0) throw ProtocolError("socket: " + std::string(std::strerror(errno)));
  if (::connect(fd.get(), reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0)
    throw ProtocolError("cannot connect to " + socket_path.string() + ": " +
                        std::strerror(errno));
  std::string line(request_line);
  line.push_back('\n');
  if (!write_all(fd.get(), line)) throw ProtocolError("back office: send failed");

  auto deadline = std::chrono::steady_clock::now() + timeout;
  std::string buffer;
  char chunk[4096];
  while (buffer.find('\n') == std::string::npos) {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) throw ProtocolError("back office: timed out");
    pollfd p{fd.get(), POLLIN, 0};
    int ready = ::poll(&p, 1, static_cast<int>(left.count()));
    if (ready < 0 && errno == EINTR) continue;
    if (ready <= 0) continue;
    ssize_t n = ::recv(fd.get(), chunk, sizeof(chunk), 0);
    if (n <= 0) throw ProtocolError("back office: connection closed");
    buffer.append(chunk, static_cast<std::size_t>(n));
  }
  return buffer.substr(0, buffer.find('\n'));
}

std::optional<Bytes> SocketGrantService::relay(ByteView request) {
  try {
    json req{{"op", "authorize"}, {"request", to_hex(request)}};
    json resp = json::parse(call_backoffice(socket_path_, req.dump(), timeout_));
    if (!resp.value("ok", false)) return std::nullopt;
    return from_hex(resp.at("grant").get<std::string>());
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace epass::backoffice
