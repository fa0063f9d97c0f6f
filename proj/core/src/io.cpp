// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

#include "epass/io.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

namespace epass::io {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// Field accessor that reports the JSON path of whatever is wrong.
class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw InvalidInput(path_ + ": expected an object");
  }

  bool has(const char* key) const {
    return j_.contains(key) && !j_.at(key).is_null();
  }
  std::string where(const char* key) const {
    return path_.empty() ? key : path_ + "." + key;
  }
  const json& at(const char* key) const {
    if (!has(key)) throw InvalidInput(where(key) + ": missing");
    return j_.at(key);
  }
  Obj obj(const char* key) const { return Obj(at(key), where(key)); }

  std::string str(const char* key) const {
    const auto& v = at(key);
    if (!v.is_string()) throw InvalidInput(where(key) + ": expected a string");
    return v.get<std::string>();
  }
  Bytes hex(const char* key) const {
    try {
      return from_hex(str(key));
    } catch (const InvalidInput& e) {
      if (std::string(e.what()).starts_with(where(key))) throw;
      throw InvalidInput(where(key) + ": not a hex string");
    }
  }
  template <std::size_t N>
  ByteArray<N> fixed_hex(const char* key) const {
    Bytes b = hex(key);
    if (b.size() != N)
      throw InvalidInput(where(key) + ": expected " + std::to_string(N) + " bytes");
    ByteArray<N> out{};
    std::copy(b.begin(), b.end(), out.begin());
    return out;
  }
  std::int64_t integer(const char* key) const {
    const auto& v = at(key);
    if (!v.is_number_integer())
      throw InvalidInput(where(key) + ": expected an integer");
    return v.get<std::int64_t>();
  }
  bool boolean(const char* key) const {
    const auto& v = at(key);
    if (!v.is_boolean()) throw InvalidInput(where(key) + ": expected true or false");
    return v.get<bool>();
  }
  Date date(const char* key) const {
    try {
      return Date::parse_iso(str(key));
    } catch (const InvalidInput& e) {
      if (std::string(e.what()).starts_with(where(key))) throw;
      throw InvalidInput(where(key) + ": expected YYYY-MM-DD");
    }
  }
  DgSet dgs(const char* key) const {
    const auto& v = at(key);
    if (!v.is_array()) throw InvalidInput(where(key) + ": expected an array");
    DgSet out;
    for (const auto& x : v) {
      if (!x.is_number_integer() || !is_valid_dg(x.get<int>()))
        throw InvalidInput(where(key) + ": data group ids must be 1..16");
      out.insert(x.get<int>());
    }
    return out;
  }

 private:
  const json& j_;
  std::string path_;
};

json parse(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception&) {
    throw InvalidInput(std::string(what) + ": not valid JSON");
  }
}

std::string sw_hex(std::uint16_t sw) {
  Bytes b;
  append_u16(b, sw);
  return to_hex(b);
}

std::uint16_t sw_from(const Obj& o, const char* key) {
  Bytes b = o.hex(key);
  if (b.size() != 2) throw InvalidInput(o.where(key) + ": expected 2 bytes");
  return static_cast<std::uint16_t>(b[0] << 8 | b[1]);
}

ordered_json profile_json(const chip::ChipProfile& p) {
  return {{"name", p.name},
          {"atr", to_hex(p.atr)},
          {"sw_unknown_ins", sw_hex(p.sw_unknown_ins)},
          {"sw_wrong_class", sw_hex(p.sw_wrong_class)},
          {"sw_select_unknown", sw_hex(p.sw_select_unknown)},
          {"sw_read_unprotected", sw_hex(p.sw_read_unprotected)},
          {"sw_malformed", sw_hex(p.sw_malformed)},
          {"select_ms", p.select_time.count()},
          {"challenge_ms", p.challenge_time.count()},
          {"auth_ms", p.auth_time.count()},
          {"sm_ms", p.sm_time.count()},
          {"error_ms", p.error_time.count()},
          {"supports_eke", p.supports_eke}};
}

chip::ChipProfile profile_from(const Obj& root) {
  const json& v = root.at("profile");
  if (v.is_string()) return chip::ChipProfile::named(v.get<std::string>());
  Obj o = root.obj("profile");
  chip::ChipProfile p;
  p.name = o.str("name");
  p.atr = o.hex("atr");
  p.sw_unknown_ins = sw_from(o, "sw_unknown_ins");
  p.sw_wrong_class = sw_from(o, "sw_wrong_class");
  p.sw_select_unknown = sw_from(o, "sw_select_unknown");
  p.sw_read_unprotected = sw_from(o, "sw_read_unprotected");
  p.sw_malformed = sw_from(o, "sw_malformed");
  p.select_time = chip::Millis{o.integer("select_ms")};
  p.challenge_time = chip::Millis{o.integer("challenge_ms")};
  p.auth_time = chip::Millis{o.integer("auth_ms")};
  p.sm_time = chip::Millis{o.integer("sm_ms")};
  p.error_time = chip::Millis{o.integer("error_ms")};
  p.supports_eke = o.has("supports_eke") && o.boolean("supports_eke");
  return p;
}

ordered_json uid_policy_json(const chip::UidPolicy& u) {
  ordered_json j{{"kind", chip::to_string(u.kind)}};
  if (u.kind == chip::UidPolicy::Kind::kFixed) j["uid"] = to_hex(u.fixed_uid);
  if (u.kind == chip::UidPolicy::Kind::kSubliminal) {
    j["modulus"] = to_hex(u.subliminal_key.modulus);
    j["exponent"] = u.subliminal_key.exponent;
  }
  return j;
}

chip::UidPolicy uid_policy_from(const Obj& o) {
  std::string kind = o.str("kind");
  if (kind == "random") return chip::UidPolicy::random();
  if (kind == "fixed") {
    Bytes uid = o.hex("uid");
    if (uid.empty() || uid.size() > 16)
      throw InvalidInput(o.where("uid") + ": expected 1..16 bytes");
    return chip::UidPolicy::fixed(uid);
  }
  if (kind == "subliminal") {
    crypto::UidPublicKey key;
    key.modulus = o.fixed_hex<16>("modulus");
    key.exponent = static_cast<std::uint32_t>(o.integer("exponent"));
    return chip::UidPolicy::subliminal(key);
  }
  throw InvalidInput(o.where("kind") + ": expected fixed, random or subliminal");
}

ordered_json cert_json(const pki::CvCertificate& c) {
  return {{"hex", to_hex(c.encode())},
          {"subject_id", c.subject_id},
          {"issuer_id", c.issuer_id},
          {"role", pki::to_string(c.role)},
          {"rights", c.rights},
          {"effective_date", c.effective_date.iso()},
          {"expiry_date", c.expiry_date.iso()}};
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput(path.string() + ": cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidInput(path.string() + ": cannot open for writing");
  out << content;
  if (!out) throw InvalidInput(path.string() + ": write failed");
}

std::string personalization_to_json(const chip::Personalization& p) {
  ordered_json j;
  j["mrz"] = mrz::render_td3(p.mrz);
  j["country"] = p.country;
  j["current_date"] = p.current_date.iso();
  j["profile"] = profile_json(p.profile);
  j["uid_policy"] = uid_policy_json(p.uid_policy);
  ordered_json dgs = ordered_json::object();
  for (const auto& [dg, bytes] : p.lds.data_groups)
    dgs[std::to_string(dg)] = to_hex(bytes);
  j["data_groups"] = dgs;
  j["security_object"] = to_hex(p.lds.security_object.encode());
  ordered_json keys;
  const auto& k = p.keys;
  keys["active_auth_seed"] =
      k.active_auth ? ordered_json(to_hex(k.active_auth->private_seed)) : ordered_json(nullptr);
  keys["chip_auth_private"] =
      k.chip_auth ? ordered_json(to_hex(k.chip_auth->private_key)) : ordered_json(nullptr);
  keys["cvca_public"] = k.cvca_public ? ordered_json(to_hex(*k.cvca_public)) : ordered_json(nullptr);
  keys["backoffice_public"] =
      k.backoffice_public ? ordered_json(to_hex(*k.backoffice_public)) : ordered_json(nullptr);
  j["keys"] = keys;
  return j.dump(2) + "\n";
}

chip::Personalization personalization_from_json(std::string_view text) {
  json j = parse(text, "personalization");
  Obj root(j, "");
  chip::Personalization p;
  try {
    p.mrz = mrz::parse_td3(root.str("mrz"));
  } catch (const InvalidInput& e) {
    throw InvalidInput(std::string("mrz: ") + e.what());
  }
  p.country = root.str("country");
  p.current_date = root.has("current_date") ? root.date("current_date")
                                            : p.mrz.expiry_date.plus_years(-5);
  p.profile = profile_from(root);
  p.uid_policy = uid_policy_from(root.obj("uid_policy"));

  Obj dgs = root.obj("data_groups");
  for (const auto& [key, value] : root.at("data_groups").items()) {
    int dg = 0;
    try {
      dg = std::stoi(key);
    } catch (const std::exception&) {
      dg = 0;
    }
    if (!is_valid_dg(dg) || std::to_string(dg) != key)
      throw InvalidInput("data_groups." + key + ": keys must be 1..16");
    p.lds.data_groups[dg] = dgs.hex(key.c_str());
  }
  try {
    p.lds.security_object = chip::SecurityObject::decode(root.hex("security_object"));
  } catch (const ProtocolError& e) {
    throw InvalidInput(std::string("security_object: ") + e.what());
  }

  Obj keys = root.obj("keys");
  if (keys.has("active_auth_seed"))
    p.keys.active_auth =
        crypto::signature_from_seed(keys.fixed_hex<32>("active_auth_seed"));
  if (keys.has("chip_auth_private")) {
    Bytes priv = keys.hex("chip_auth_private");
    if (priv.size() != crypto::kDhPrivateSize)
      throw InvalidInput("keys.chip_auth_private: expected 32 bytes");
    p.keys.chip_auth = crypto::DhKeyPair{priv, crypto::dh_public_from_private(priv)};
  }
  if (keys.has("cvca_public")) p.keys.cvca_public = keys.fixed_hex<32>("cvca_public");
  if (keys.has("backoffice_public"))
    p.keys.backoffice_public = keys.fixed_hex<32>("backoffice_public");
  return p;
}

std::string country_to_json(const pki::CountryPki& c) {
  ordered_json j;
  j["country"] = c.country;
  j["document_signer_seed"] = to_hex(c.document_signer.private_seed);
  j["cvca_seed"] = to_hex(c.cvca.private_seed);
  j["backoffice_seed"] = to_hex(c.backoffice.private_seed);
  j["document_signer_public"] = to_hex(c.document_signer.public_key);
  j["cvca_public"] = to_hex(c.cvca.public_key);
  j["backoffice_public"] = to_hex(c.backoffice.public_key);
  return j.dump(2) + "\n";
}

pki::CountryPki country_from_json(std::string_view text) {
  json j = parse(text, "country");
  Obj o(j, "");
  pki::CountryPki c;
  c.country = o.str("country");
  c.document_signer = crypto::signature_from_seed(o.fixed_hex<32>("document_signer_seed"));
  c.cvca = crypto::signature_from_seed(o.fixed_hex<32>("cvca_seed"));
  c.backoffice = crypto::signature_from_seed(o.fixed_hex<32>("backoffice_seed"));
  return c;
}

std::string certificates_to_json(std::span<const pki::CvCertificate> certs) {
  ordered_json j = ordered_json::array();
  for (const auto& c : certs) j.push_back(cert_json(c));
  return j.dump(2) + "\n";
}

std::vector<pki::CvCertificate> certificates_from_json(std::string_view text) {
  json j = parse(text, "certificates");
  if (j.is_object()) j = json::array({j});
  if (!j.is_array()) throw InvalidInput("certificates: expected an array");
  std::vector<pki::CvCertificate> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    std::string path = "certificates[" + std::to_string(i) + "]";
    Obj o(j[i], path);
    try {
      out.push_back(pki::CvCertificate::decode(o.hex("hex")));
    } catch (const ProtocolError& e) {
      throw InvalidInput(path + ".hex: " + e.what());
    }
  }
  return out;
}

std::string key_to_json(const KeyFile& key) {
  ordered_json j;
  j["id"] = key.id;
  j["role"] = pki::to_string(key.role);
  j["rights"] = key.rights;
  j["seed"] = to_hex(key.key.private_seed);
  j["public_key"] = to_hex(key.key.public_key);
  return j.dump(2) + "\n";
}

KeyFile key_from_json(std::string_view text) {
  json j = parse(text, "key");
  Obj o(j, "");
  KeyFile k;
  k.id = o.str("id");
  try {
    k.role = pki::parse_role(o.str("role"));
  } catch (const InvalidInput&) {
    throw InvalidInput("role: unknown role '" + o.str("role") + "'");
  }
  k.rights = o.has("rights") ? o.dgs("rights") : DgSet{};
  k.key = crypto::signature_from_seed(o.fixed_hex<32>("seed"));
  return k;
}

PolicyFile policy_from_json(std::string_view text) {
  json j = parse(text, "policy");
  Obj o(j, "");
  PolicyFile f;
  auto& p = f.policy;
  if (o.has("validity_years")) p.validity_years = static_cast<int>(o.integer("validity_years"));
  if (o.has("working_days_only")) p.working_days_only = o.boolean("working_days_only");
  if (o.has("number_scheme")) {
    std::string s = o.str("number_scheme");
    if (s == "uniform-alphanumeric")
      p.number_scheme = mrz::NumberScheme::kUniformAlphanumeric;
    else if (s == "sequential-numeric")
      p.number_scheme = mrz::NumberScheme::kSequentialNumeric;
    else
      throw InvalidInput(
          "number_scheme: expected uniform-alphanumeric or sequential-numeric");
  }
  if (o.has("sequential")) {
    Obj s = o.obj("sequential");
    auto pop = s.integer("max_population");
    if (pop <= 0) throw InvalidInput("sequential.max_population: must be positive");
    p.sequential.max_population = static_cast<std::uint64_t>(pop);
    if (s.has("first_number"))
      p.sequential.first_number = static_cast<std::uint64_t>(s.integer("first_number"));
    if (s.has("prefix")) p.sequential.prefix = s.str("prefix");
  }
  if (o.has("known_pairs")) {
    const auto& arr = o.at("known_pairs");
    if (!arr.is_array()) throw InvalidInput("known_pairs: expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Obj kp(arr[i], "known_pairs[" + std::to_string(i) + "]");
      p.known_pairs.push_back({kp.str("document_number"), kp.date("expiry_date")});
    }
  }
  mrz::validate(p);

  if (o.has("attacker")) {
    Obj a = o.obj("attacker");
    auto& as = f.assumptions;
    if (a.has("age_known_within_years"))
      as.age_known_within_years = static_cast<int>(a.integer("age_known_within_years"));
    if (a.has("as_of")) as.as_of = a.date("as_of");
    if (a.has("birth_window_start")) as.birth_window_start = a.date("birth_window_start");
    if (a.has("known_birth_date")) as.known_birth_date = a.date("known_birth_date");
    if (a.has("expiry_window")) {
      Obj w = a.obj("expiry_window");
      as.expiry_window = DateRange{w.date("first"), static_cast<int>(w.integer("days"))};
    }
    if (a.has("number_window")) {
      Obj w = a.obj("number_window");
      auto first = w.integer("first");
      auto count = w.integer("count");
      if (first < 0 || count <= 0)
        throw InvalidInput("attacker.number_window: first >= 0 and count > 0");
      as.number_window = {{static_cast<std::uint64_t>(first),
                           static_cast<std::uint64_t>(count)}};
    }
  }
  return f;
}

std::string policy_to_json(const PolicyFile& f) {
  ordered_json j;
  const auto& p = f.policy;
  j["validity_years"] = p.validity_years;
  j["working_days_only"] = p.working_days_only;
  j["number_scheme"] = p.number_scheme == mrz::NumberScheme::kSequentialNumeric
                           ? "sequential-numeric"
                           : "uniform-alphanumeric";
  if (p.number_scheme == mrz::NumberScheme::kSequentialNumeric)
    j["sequential"] = {{"max_population", p.sequential.max_population},
                       {"first_number", p.sequential.first_number},
                       {"prefix", p.sequential.prefix}};
  j["known_pairs"] = ordered_json::array();
  for (const auto& kp : p.known_pairs)
    j["known_pairs"].push_back(
        {{"document_number", kp.document_number}, {"expiry_date", kp.expiry_date.iso()}});
  ordered_json a;
  const auto& as = f.assumptions;
  if (as.age_known_within_years) a["age_known_within_years"] = *as.age_known_within_years;
  a["as_of"] = as.as_of.iso();
  if (as.birth_window_start) a["birth_window_start"] = as.birth_window_start->iso();
  if (as.known_birth_date) a["known_birth_date"] = as.known_birth_date->iso();
  if (as.expiry_window)
    a["expiry_window"] = {{"first", as.expiry_window->first.iso()},
                          {"days", as.expiry_window->days}};
  if (as.number_window)
    a["number_window"] = {{"first", as.number_window->first},
                          {"count", as.number_window->second}};
  j["attacker"] = a;
  return j.dump(2) + "\n";
}

}  // namespace epass::io
