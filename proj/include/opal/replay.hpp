#pragma once

// Record/replay of external calls (JSON lines keyed by function, canonical
// argument and occurrence index) and trace files keyed by task label.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "opal/runtime.hpp"

namespace opal {

struct ReplayKey {
  std::string fn;
  std::string arg;
  std::uint64_t occ = 0;
  auto operator<=>(const ReplayKey&) const = default;
  std::string describe() const;
};

struct ReplayRecord {
  ReplayKey key;
  ProviderKind provider_kind = ProviderKind::Sync;
  ProviderReply reply;
};

class ReplayMiss : public std::runtime_error {
 public:
  explicit ReplayMiss(const ReplayKey& key);
  const ReplayKey& key() const { return key_; }

 private:
  ReplayKey key_;
};

class ReplayStore {
 public:
  void add(ReplayRecord r);
  const ReplayRecord* find(const ReplayKey& k) const;
  std::size_t size() const { return records_.size(); }
  const std::map<ReplayKey, ReplayRecord>& records() const { return records_; }

  /// One JSON object per line, sorted by key; equal stores serialize to
  /// equal bytes.
  std::string serialize() const;
  static ReplayStore parse(const std::string& text);
  void save(const std::string& path) const;
  static ReplayStore load(const std::string& path);

 private:
  std::map<ReplayKey, ReplayRecord> records_;
};

/// Captures every reply of a recordable provider.
class RecordingInterceptor : public CallInterceptor {
 public:
  explicit RecordingInterceptor(ReplayStore& out) : out_(out) {}
  std::optional<ProviderReply> lookup(const std::string&, const std::string&, std::uint64_t) override {
    return std::nullopt;
  }
  void observe(const std::string& fn, const std::string& arg, std::uint64_t occ, ProviderKind kind,
               const ProviderReply& reply) override;

 private:
  ReplayStore& out_;
};

/// Answers recordable calls from a store; a missing key throws ReplayMiss.
/// With `rerecord` set, every answered call is copied there as well.
class ReplayingInterceptor : public CallInterceptor {
 public:
  explicit ReplayingInterceptor(const ReplayStore& in, ReplayStore* rerecord = nullptr) : in_(in), out_(rerecord) {}
  std::optional<ProviderReply> lookup(const std::string& fn, const std::string& arg, std::uint64_t occ) override;
  void observe(const std::string&, const std::string&, std::uint64_t, ProviderKind, const ProviderReply&) override {}
  std::size_t hits() const { return hits_; }

 private:
  const ReplayStore& in_;
  ReplayStore* out_;
  std::size_t hits_ = 0;
};

// ---------------------------------------------------------------------------
// Trace files

/// Inverse of `Label::dotted`.
Label parse_label(const std::string& dotted);

/// One line per resolution: label, function, argument and result.
std::string serialize_trace(const std::vector<StepRecord>& log);
Trace parse_trace(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace opal
