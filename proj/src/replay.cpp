#include "opal/replay.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "opal/parser.hpp"
#include "opal/printer.hpp"

namespace opal {

using ojson = nlohmann::ordered_json;

std::string ReplayKey::describe() const { return fn + " " + arg + " #" + std::to_string(occ); }

ReplayMiss::ReplayMiss(const ReplayKey& key)
    : std::runtime_error("replay miss: no recorded call for " + key.describe()), key_(key) {}

void ReplayStore::add(ReplayRecord r) {
  ReplayKey k = r.key;
  records_.insert_or_assign(std::move(k), std::move(r));
}

const ReplayRecord* ReplayStore::find(const ReplayKey& k) const {
  auto it = records_.find(k);
  return it == records_.end() ? nullptr : &it->second;
}

namespace {

ojson payload_json(const PrimValue& v) {
  if (auto* s = std::get_if<std::string>(&v)) return *s;
  if (auto* i = std::get_if<std::int64_t>(&v)) return *i;
  if (auto* b = std::get_if<bool>(&v)) return *b;
  const std::string lit = render_literal(v);
  return ojson{{"lit", lit.substr(1, lit.size() - 2)}};
}

PrimValue payload_value(const ojson& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_object() && j.contains("lit")) return parse_literal(j.at("lit").get<std::string>());
  throw std::runtime_error("bad chunk payload " + j.dump());
}

ProviderKind kind_from(const std::string& s) {
  if (s == "sync") return ProviderKind::Sync;
  if (s == "async") return ProviderKind::Async;
  if (s == "stream") return ProviderKind::Streaming;
  throw std::runtime_error("unknown provider kind '" + s + "'");
}

}  // namespace

std::string ReplayStore::serialize() const {
  std::string out;
  for (const auto& [k, r] : records_) {
    ojson j;
    j["fn"] = k.fn;
    j["arg"] = k.arg;
    j["occ"] = k.occ;
    j["kind"] = provider_kind_name(r.provider_kind);
    switch (r.reply.kind) {
      case ProviderReply::Value:
        j["result"] = pretty(r.reply.value);
        j["done_ms"] = r.reply.latency_ms;
        break;
      case ProviderReply::Stream: {
        ojson chunks = ojson::array();
        for (const auto& c : r.reply.chunks) chunks.push_back(ojson{{"at_ms", c.at_ms}, {"payload", payload_json(c.payload)}});
        j["chunks"] = std::move(chunks);
        j["done_ms"] = r.reply.done_ms;
        break;
      }
      case ProviderReply::Failure:
        j["error"] = r.reply.error;
        break;
    }
    out += j.dump();
    out += '\n';
  }
  return out;
}

ReplayStore ReplayStore::parse(const std::string& text) {
  ReplayStore store;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      ojson j = ojson::parse(line);
      ReplayRecord r;
      r.key = ReplayKey{j.at("fn").get<std::string>(), j.at("arg").get<std::string>(), j.at("occ").get<std::uint64_t>()};
      r.provider_kind = kind_from(j.at("kind").get<std::string>());
      if (j.contains("error")) {
        r.reply = ProviderReply::failure(j.at("error").get<std::string>());
      } else if (j.contains("chunks")) {
        std::vector<Chunk> chunks;
        for (const auto& c : j.at("chunks")) chunks.push_back(Chunk{c.at("at_ms").get<std::int64_t>(), payload_value(c.at("payload"))});
        r.reply = ProviderReply::stream(std::move(chunks), j.at("done_ms").get<std::int64_t>());
      } else {
        r.reply = ProviderReply::of(opal::parse(j.at("result").get<std::string>()), j.value("done_ms", std::int64_t{0}));
      }
      store.add(std::move(r));
    } catch (const std::exception& e) {
      throw std::runtime_error("replay store line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return store;
}

void ReplayStore::save(const std::string& path) const { write_file(path, serialize()); }

ReplayStore ReplayStore::load(const std::string& path) { return parse(read_file(path)); }

void RecordingInterceptor::observe(const std::string& fn, const std::string& arg, std::uint64_t occ,
                                   ProviderKind kind, const ProviderReply& reply) {
  out_.add(ReplayRecord{ReplayKey{fn, arg, occ}, kind, reply});
}

std::optional<ProviderReply> ReplayingInterceptor::lookup(const std::string& fn, const std::string& arg,
                                                          std::uint64_t occ) {
  ReplayKey k{fn, arg, occ};
  const ReplayRecord* r = in_.find(k);
  if (!r) throw ReplayMiss(k);
  ++hits_;
  if (out_) out_->add(*r);
  return r->reply;
}

// ---------------------------------------------------------------------------

Label parse_label(const std::string& dotted) {
  std::vector<std::uint32_t> path;
  std::size_t i = 0;
  while (i <= dotted.size()) {
    std::size_t j = dotted.find('.', i);
    if (j == std::string::npos) j = dotted.size();
    const std::string part = dotted.substr(i, j - i);
    if (part.empty() || part.find_first_not_of("0123456789") != std::string::npos) {
      throw std::runtime_error("bad label '" + dotted + "'");
    }
    const unsigned long v = std::stoul(part);
    if (v == 0) throw std::runtime_error("bad label '" + dotted + "'");
    path.push_back(static_cast<std::uint32_t>(v));
    i = j + 1;
  }
  return Label(std::move(path));
}

std::string serialize_trace(const std::vector<StepRecord>& log) {
  std::map<Label, ojson> lines;
  for (const auto& r : log) {
    if (r.kind != StepKind::Resolve || !r.raw_result) continue;
    ojson j;
    j["label"] = r.label.path();
    j["fn"] = r.fn ? r.fn->name : "";
    j["arg"] = r.arg ? render_prim_expr(*r.arg) : "";
    j["result"] = pretty(*r.raw_result);
    lines.emplace(r.label, std::move(j));
  }
  std::string out;
  for (const auto& [_, j] : lines) out += j.dump() + "\n";
  return out;
}

Trace parse_trace(const std::string& text) {
  Trace t;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      ojson j = ojson::parse(line);
      const auto& lj = j.at("label");
      Label l = lj.is_string() ? parse_label(lj.get<std::string>()) : Label(lj.get<std::vector<std::uint32_t>>());
      if (l.empty()) throw std::runtime_error("empty label");
      t.emplace(std::move(l), opal::parse(j.at("result").get<std::string>()));
    } catch (const std::exception& e) {
      throw std::runtime_error("trace line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return t;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

}  // namespace opal
