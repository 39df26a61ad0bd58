#pragma once

// HTTPS support is enabled by the build (CPPHTTPLIB_OPENSSL_SUPPORT).
#include "httplib.h"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "json.hpp"
#include "seqfam/exact.hpp"
#include "seqfam/families.hpp"

#ifndef SEQFAM_DEFAULT_FIXTURES
#define SEQFAM_DEFAULT_FIXTURES "data/oeis_fixtures.jsonl"
#endif

namespace seqfam::oeis {

using Terms = std::vector<mpz_class>;

enum class Source { network, cache, fixture };

inline std::string_view to_string(Source s) {
  switch (s) {
    case Source::network: return "network";
    case Source::cache: return "cache";
    case Source::fixture: return "fixture";
  }
  return "?";
}

/// Leading terms need to pin a sequence down; shorter queries are rejected.
inline constexpr std::size_t kMinQueryTerms = 8;

struct Entry {
  std::string id;
  std::string name;
  Terms terms;
};

struct OeisMatch {
  Terms query;
  std::vector<std::string> ids;
  Source source = Source::fixture;
  /// Degenerate query (fewer than three distinct values): any match says
  /// little about the sequence.
  bool ambiguous = false;
};

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed catalog response; the raw payload is kept for diagnostics.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::string raw) : std::runtime_error(what), raw_(std::move(raw)) {}
  const std::string& raw() const { return raw_; }

 private:
  std::string raw_;
};

inline std::string join_terms(const Terms& terms) {
  std::string out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i) out += ',';
    out += terms[i].get_str();
  }
  return out;
}

/// Parses "0,1,-4, 9" into integers.
inline Terms parse_terms(std::string_view csv) {
  Terms out;
  std::string token;
  std::stringstream ss{std::string(csv)};
  while (std::getline(ss, token, ',')) {
    token.erase(std::remove_if(token.begin(), token.end(), [](unsigned char c) { return std::isspace(c); }),
                token.end());
    if (token.empty()) continue;
    mpz_class v;
    if (token.front() == '+') token.erase(0, 1);
    if (v.set_str(token, 10) != 0) throw std::invalid_argument("not an integer term: '" + token + "'");
    out.push_back(v);
  }
  return out;
}

inline bool contains_consecutive(const Terms& haystack, const Terms& needle) {
  if (needle.empty()) return true;
  return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) != haystack.end();
}

inline bool is_degenerate(const Terms& terms) {
  std::set<mpz_class> distinct(terms.begin(), terms.end());
  return distinct.size() < 3;
}

inline std::string format_id(std::int64_t number) {
  std::string digits = std::to_string(number);
  if (digits.size() < 6) digits.insert(0, 6 - digits.size(), '0');
  return "A" + digits;
}

/**
 * Parses a search response in either catalog JSON layout: a bare array of
 * entries, or an object whose "results" member holds the array (or null).
 */
inline std::vector<Entry> parse_search_response(const std::string& body) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("OEIS response is not JSON: ") + e.what(), body);
  }
  const nlohmann::json* results = &j;
  if (j.is_object()) {
    if (!j.contains("results")) throw ParseError("OEIS response object lacks 'results'", body);
    results = &j["results"];
  }
  std::vector<Entry> out;
  if (results->is_null()) return out;
  if (!results->is_array()) throw ParseError("OEIS 'results' is not an array", body);
  for (const auto& r : *results) {
    if (!r.is_object() || !r.contains("number") || !r["number"].is_number_integer())
      throw ParseError("OEIS result lacks an integer 'number'", body);
    Entry e;
    e.id = format_id(r["number"].get<std::int64_t>());
    e.name = r.value("name", "");
    try {
      e.terms = parse_terms(r.value("data", ""));
    } catch (const std::invalid_argument& ex) {
      throw ParseError(std::string("OEIS result has malformed data: ") + ex.what(), body);
    }
    out.push_back(std::move(e));
  }
  return out;
}

/// Parses a b-file ("index value" per line, '#' comments) into its values.
inline Terms parse_bfile(const std::string& text) {
  Terms out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::string index, value;
    if (!(fields >> index >> value)) throw ParseError("malformed b-file line: '" + line + "'", text);
    mpz_class v;
    if (value.front() == '+') value.erase(0, 1);
    if (v.set_str(value, 10) != 0) throw ParseError("malformed b-file value: '" + value + "'", text);
    out.push_back(v);
  }
  return out;
}

/// Offline catalog: one JSON object per line, {"id", "name", "data"}.
class FixtureCatalog {
 public:
  FixtureCatalog() = default;

  static FixtureCatalog load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open OEIS fixtures: " + path.string());
    FixtureCatalog cat;
    std::string line;
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      auto j = nlohmann::json::parse(line);
      cat.entries_.push_back({j.at("id").get<std::string>(), j.value("name", ""),
                              parse_terms(j.at("data").get<std::string>())});
    }
    return cat;
  }

  std::vector<std::string> search(const Terms& terms) const {
    std::vector<std::string> ids;
    for (const auto& e : entries_)
      if (contains_consecutive(e.terms, terms)) ids.push_back(e.id);
    std::sort(ids.begin(), ids.end());
    return ids;
  }

  const Entry* find(std::string_view id) const {
    for (const auto& e : entries_)
      if (e.id == id) return &e;
    return nullptr;
  }

  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::vector<Entry> entries_;
};

/**
 * Search-result cache keyed by the exact term list, stored as one JSON
 * object per line in `<dir>/search.jsonl`. Entries are never rewritten;
 * each store replaces the file through write-temp-then-rename.
 */
class ResultCache {
 public:
  explicit ResultCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path file() const { return dir_ / "search.jsonl"; }

  std::optional<std::vector<std::string>> lookup(const Terms& terms) const {
    const std::string key = join_terms(terms);
    std::ifstream in(file());
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded()) continue;
      if (j.value("terms", "") == key) return j.at("ids").get<std::vector<std::string>>();
    }
    return std::nullopt;
  }

  void store(const Terms& terms, const std::vector<std::string>& ids) {
    std::lock_guard lock(write_mutex());
    if (lookup(terms)) return;
    std::filesystem::create_directories(dir_);
    std::string existing;
    {
      std::ifstream in(file(), std::ios::binary);
      existing.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }
    nlohmann::json rec{{"terms", join_terms(terms)}, {"ids", ids}};
    existing += rec.dump() + "\n";
    write_atomically(file(), existing);
  }

  std::optional<std::string> lookup_bfile(std::string_view id) const {
    std::ifstream in(dir_ / "bfiles" / (std::string(id) + ".txt"), std::ios::binary);
    if (!in) return std::nullopt;
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }

  void store_bfile(std::string_view id, const std::string& text) {
    std::lock_guard lock(write_mutex());
    const auto path = dir_ / "bfiles" / (std::string(id) + ".txt");
    if (std::filesystem::exists(path)) return;
    std::filesystem::create_directories(path.parent_path());
    write_atomically(path, text);
  }

 private:
  static std::mutex& write_mutex() {
    static std::mutex m;
    return m;
  }

  static void write_atomically(const std::filesystem::path& target, const std::string& content) {
    auto tmp = target;
    tmp += ".tmp." + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw std::runtime_error("cannot write cache file: " + tmp.string());
      out << content;
    }
    std::filesystem::rename(tmp, target);
  }

  std::filesystem::path dir_;
};

/// SEQFAM_CACHE_DIR, else $XDG_CACHE_HOME/seqfam, else ~/.cache/seqfam.
inline std::filesystem::path default_cache_dir() {
  if (const char* d = std::getenv("SEQFAM_CACHE_DIR"); d && *d) return d;
  if (const char* x = std::getenv("XDG_CACHE_HOME"); x && *x) return std::filesystem::path(x) / "seqfam";
  if (const char* h = std::getenv("HOME"); h && *h) return std::filesystem::path(h) / ".cache" / "seqfam";
  return std::filesystem::temp_directory_path() / "seqfam-cache";
}

inline std::filesystem::path default_fixture_file() {
  if (const char* f = std::getenv("SEQFAM_FIXTURES"); f && *f) return f;
  return SEQFAM_DEFAULT_FIXTURES;
}

struct ClientConfig {
  bool offline = false;
  std::filesystem::path cache_dir = default_cache_dir();
  std::filesystem::path fixture_file = default_fixture_file();
  std::string base_url = "https://oeis.org";
  std::chrono::milliseconds min_interval{1000};
  int max_attempts = 3;
};

/// Process-wide gate: one request at a time, spaced by the minimum interval.
class NetworkGate {
 public:
  static NetworkGate& instance() {
    static NetworkGate gate;
    return gate;
  }

  template <class F>
  auto run(std::chrono::milliseconds min_interval, F&& request) {
    std::lock_guard lock(mutex_);
    if (last_) {
      auto ready = *last_ + min_interval;
      auto now = std::chrono::steady_clock::now();
      if (now < ready) std::this_thread::sleep_for(ready - now);
    }
    struct Stamp {
      std::optional<std::chrono::steady_clock::time_point>& last;
      ~Stamp() { last = std::chrono::steady_clock::now(); }
    } stamp{last_};
    return request();
  }

 private:
  std::mutex mutex_;
  std::optional<std::chrono::steady_clock::time_point> last_;
};

class Client {
 public:
  explicit Client(ClientConfig config = {}) : config_(std::move(config)), cache_(config_.cache_dir) {
    if (config_.offline || std::filesystem::exists(config_.fixture_file))
      fixtures_ = FixtureCatalog::load(config_.fixture_file);
  }

  const ClientConfig& config() const { return config_; }
  const FixtureCatalog& fixtures() const { return fixtures_; }

  /**
   * Catalog entries containing `terms` consecutively. Offline: fixtures
   * only. Online: cache, then fixtures, then the network (results are
   * cached). Network trouble raises TransportError, never an empty match.
   */
  OeisMatch search_by_terms(const Terms& terms) {
    if (terms.size() < kMinQueryTerms)
      throw ContractError("OEIS search needs at least " + std::to_string(kMinQueryTerms) + " terms");
    OeisMatch match{terms, {}, Source::fixture, is_degenerate(terms)};
    if (config_.offline) {
      match.ids = fixtures_.search(terms);
      return match;
    }
    if (auto cached = cache_.lookup(terms)) {
      match.ids = *cached;
      match.source = Source::cache;
      return match;
    }
    if (auto ids = fixtures_.search(terms); !ids.empty()) {
      match.ids = std::move(ids);
      return match;
    }
    const std::string body = http_get("/search?q=" + join_terms(terms) + "&fmt=json");
    for (const auto& e : parse_search_response(body))
      if (e.terms.empty() || contains_consecutive(e.terms, terms)) match.ids.push_back(e.id);
    std::sort(match.ids.begin(), match.ids.end());
    cache_.store(terms, match.ids);
    match.source = Source::network;
    return match;
  }

  /// Terms of one entry from its b-file (cache first; fixtures when offline).
  Terms fetch_bfile(std::string_view id) {
    if (config_.offline) {
      if (const Entry* e = fixtures_.find(id)) return e->terms;
      throw TransportError("offline: no fixture for " + std::string(id));
    }
    if (auto cached = cache_.lookup_bfile(id)) return parse_bfile(*cached);
    if (id.size() < 2 || id.front() != 'A') throw ContractError("not a catalog id: " + std::string(id));
    const std::string digits(id.substr(1));
    const std::string text = http_get("/" + std::string(id) + "/b" + digits + ".txt");
    Terms terms = parse_bfile(text);
    cache_.store_bfile(id, text);
    return terms;
  }

 private:
  std::string http_get(const std::string& target) {
    std::string last_error;
    for (int attempt = 0; attempt < config_.max_attempts; ++attempt) {
      if (attempt > 0) std::this_thread::sleep_for(config_.min_interval * (1 << attempt));
      auto outcome = NetworkGate::instance().run(config_.min_interval, [&]() -> std::optional<std::string> {
        httplib::Client cli(config_.base_url);
        cli.set_connection_timeout(10);
        cli.set_read_timeout(30);
        cli.set_follow_location(true);
        auto res = cli.Get(target);
        if (!res) {
          last_error = "request to " + config_.base_url + target + " failed: " + httplib::to_string(res.error());
          return std::nullopt;
        }
        if (res->status == 200) return res->body;
        last_error = "HTTP " + std::to_string(res->status) + " from " + config_.base_url + target;
        if (res->status != 429 && res->status < 500) throw TransportError(last_error);
        return std::nullopt;
      });
      if (outcome) return *outcome;
    }
    throw TransportError(last_error);
  }

  ClientConfig config_;
  ResultCache cache_;
  FixtureCatalog fixtures_;
};

enum class Axis { row, column };

/// Row: n fixed, m over `range`. Column: m fixed, n over `range`.
inline Terms window_terms(const FamilySpec& family, Axis axis, std::int64_t fixed, IntRange range) {
  if (range.size() < static_cast<std::int64_t>(kMinQueryTerms))
    throw ContractError("cross-check range must yield at least " + std::to_string(kMinQueryTerms) + " terms");
  Terms terms;
  FamilyEvaluator eval(family);
  for (std::int64_t i = range.lo; i <= range.hi; ++i) {
    const ExactScalar& v = axis == Axis::row ? eval.X(fixed, i) : eval.X(i, fixed);
    if (!v.is_integer()) throw ContractError("OEIS cross-check needs integer terms, got " + v.str());
    terms.push_back(v.numerator());
  }
  return terms;
}

struct CrossCheck {
  OeisMatch match;
  bool verdict = false;
};

inline CrossCheck cross_check(Client& client, const FamilySpec& family, Axis axis, std::int64_t fixed,
                              IntRange range) {
  CrossCheck out{client.search_by_terms(window_terms(family, axis, fixed, range)), false};
  out.verdict = !out.match.ids.empty();
  return out;
}

inline nlohmann::ordered_json to_json(const OeisMatch& m) {
  nlohmann::ordered_json terms = nlohmann::ordered_json::array();
  for (const auto& t : m.query) terms.push_back(t.get_str());
  return {{"query", terms}, {"ids", m.ids}, {"source", std::string(to_string(m.source))}, {"ambiguous", m.ambiguous}};
}

}  // namespace seqfam::oeis
