// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

// backoffice serve|register|revoke|reinstate|list

#include <nlohmann/json.hpp>

#include <atomic>
#include <csignal>
#include <filesystem>
#include <iostream>
#include <memory>

#include "cli_common.hpp"
#include "epass/backoffice_server.hpp"
#include "epass/io.hpp"

namespace epasslab {

namespace {

using namespace epass;

struct BackofficeOptions {
  std::string socket;
  std::string country_keys;
  std::string registry;
  std::string today = "2026-01-01";
  std::string id;
  std::string public_key;
  std::string key_file;
  std::string rights;
};

std::atomic<backoffice::BackofficeServer*> g_running{nullptr};

extern "C" void on_signal(int) {
  if (auto* s = g_running.load()) s->stop();
}

int serve(const BackofficeOptions& o) {
  auto country = io::country_from_json(io::read_file(o.country_keys));
  SimClock clock(parse_date_flag(o.today, "--today"));
  backoffice::Backoffice office(country.backoffice, clock);
  std::optional<std::filesystem::path> registry;
  if (!o.registry.empty()) {
    registry = o.registry;
    if (std::filesystem::exists(*registry))
      office.restore(backoffice::registry_from_json(io::read_file(*registry)));
  }

  backoffice::BackofficeServer server(office, o.socket, registry);
  server.bind();
  g_running = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cerr << "back office listening on " << o.socket << "\n";
  server.serve();
  g_running = nullptr;
  return kExitOk;
}

std::string key_hex(const BackofficeOptions& o) {
  if (!o.public_key.empty() == !o.key_file.empty())
    throw InvalidInput("give exactly one of --public-key and --key");
  if (!o.public_key.empty()) return o.public_key;
  return to_hex(io::key_from_json(io::read_file(o.key_file)).key.public_key);
}

int call(const Globals& g, const BackofficeOptions& o, const nlohmann::json& request) {
  auto response = nlohmann::json::parse(backoffice::call_backoffice(o.socket, request.dump()));
  emit(g, response.dump(2) + "\n");
  return response.value("ok", false) ? kExitOk : kExitFailure;
}

int register_authority(const Globals& g, const BackofficeOptions& o) {
  std::string key = key_hex(o);
  std::string id = o.id;
  if (id.empty()) {
    if (o.key_file.empty()) throw InvalidInput("--id: required with --public-key");
    id = io::key_from_json(io::read_file(o.key_file)).id;
  }
  nlohmann::json req{{"op", "register"}, {"id", id}, {"public_key", key}};
  req["rights"] = parse_dgs_flag(o.rights, "--rights");
  return call(g, o, req);
}

}  // namespace

void add_backoffice_commands(CLI::App& app, Globals& g, Action& action) {
  auto o = std::make_shared<BackofficeOptions>();
  auto* bo = app.add_subcommand("backoffice", "Online terminal-authentication back office");
  bo->require_subcommand(1);

  auto* cmd = bo->add_subcommand("serve", "Serve grant requests on a Unix socket");
  cmd->add_option("--socket", o->socket, "Unix socket path")->required();
  cmd->add_option("--country-keys", o->country_keys, "Supplies the back-office signing key")
      ->required();
  cmd->add_option("--registry", o->registry, "Load and persist the registry here");
  cmd->add_option("--today", o->today, "Date stamped into grants");
  cmd->callback([&action, o] { action = [o] { return serve(*o); }; });

  cmd = bo->add_subcommand("register", "Register an application authority");
  cmd->add_option("--socket", o->socket, "Unix socket path")->required();
  cmd->add_option("--id", o->id, "Authority identifier (default: from --key)");
  cmd->add_option("--public-key", o->public_key, "C_AA public key (hex)");
  cmd->add_option("--key", o->key_file, "Authority key file");
  cmd->add_option("--rights", o->rights, "Data groups it may grant, e.g. 3,4")->required();
  cmd->callback(
      [&g, &action, o] { action = [&g, o] { return register_authority(g, *o); }; });

  for (const char* op : {"revoke", "reinstate"}) {
    cmd = bo->add_subcommand(op, std::string(op) == "revoke" ? "Revoke a terminal key"
                                                             : "Reinstate a terminal key");
    cmd->add_option("--socket", o->socket, "Unix socket path")->required();
    cmd->add_option("--public-key", o->public_key, "K_TA public key (hex)");
    cmd->add_option("--key", o->key_file, "Terminal key file");
    std::string name = op;
    cmd->callback([&g, &action, o, name] {
      action = [&g, o, name] {
        return call(g, *o, {{"op", name}, {"k_ta", key_hex(*o)}});
      };
    });
  }

  cmd = bo->add_subcommand("list", "Show registered authorities and revoked keys");
  cmd->add_option("--socket", o->socket, "Unix socket path")->required();
  cmd->callback([&g, &action, o] {
    action = [&g, o] { return call(g, *o, {{"op", "list"}}); };
  });
}

}  // namespace epasslab
