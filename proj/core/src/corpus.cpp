#include "chainforge/corpus.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "chainforge/error.hpp"

namespace chainforge {

using nlohmann::json;

Corpus Corpus::from_posts(std::string forum_name, std::vector<Post> posts) {
  Corpus c;
  c.forum_name_ = std::move(forum_name);
  std::sort(posts.begin(), posts.end(), [](const Post& a, const Post& b) {
    if (a.thread_id != b.thread_id) return a.thread_id < b.thread_id;
    return a.position < b.position;
  });
  c.posts_ = std::move(posts);

  for (std::size_t i = 0; i < c.posts_.size(); ++i) {
    const Post& p = c.posts_[i];
    if (!c.by_id_.emplace(p.post_id, i).second) {
      throw SchemaError("duplicate post id: " + p.post_id);
    }
    c.user_index_[p.author].push_back(i);
  }

  std::size_t begin = 0;
  while (begin < c.posts_.size()) {
    std::size_t end = begin + 1;
    const auto& tid = c.posts_[begin].thread_id;
    while (end < c.posts_.size() && c.posts_[end].thread_id == tid) ++end;
    if (c.posts_[begin].position != 0) {
      throw SchemaError("thread " + tid + " has no product post (position 0)");
    }
    bool out_of_order = false;
    for (std::size_t k = begin + 1; k < end; ++k) {
      if (c.posts_[k].position == c.posts_[k - 1].position) {
        throw SchemaError("thread " + tid + " has two posts at position " +
                          std::to_string(c.posts_[k].position));
      }
      if (c.posts_[k].timestamp < c.posts_[k - 1].timestamp) out_of_order = true;
    }
    if (out_of_order) ++c.out_of_order_;
    c.threads_.emplace(tid, std::make_pair(begin, end));
    begin = end;
  }
  return c;
}

const Post* Corpus::find(std::string_view post_id) const {
  auto it = by_id_.find(post_id);
  return it == by_id_.end() ? nullptr : &posts_[it->second];
}

std::vector<ThreadId> Corpus::thread_ids() const {
  std::vector<ThreadId> out;
  out.reserve(threads_.size());
  for (const auto& [id, range] : threads_) out.push_back(id);
  return out;
}

std::span<const Post> Corpus::thread(std::string_view thread_id) const {
  auto it = threads_.find(thread_id);
  if (it == threads_.end()) return {};
  return std::span<const Post>(posts_).subspan(it->second.first,
                                              it->second.second - it->second.first);
}

std::span<const std::size_t> Corpus::posts_by(std::string_view user) const {
  auto it = user_index_.find(user);
  if (it == user_index_.end()) return {};
  return it->second;
}

// ---------------------------------------------------------------------------

ForumStats corpus_stats(const Corpus& corpus) {
  ForumStats s;
  s.total_messages = corpus.size();
  s.total_threads = corpus.thread_count();
  s.total_replies = s.total_messages - s.total_threads;
  s.unique_authors = corpus.user_index().size();
  if (!corpus.empty()) {
    DateRange r{corpus.posts().front().timestamp, corpus.posts().front().timestamp};
    for (const auto& p : corpus.posts()) {
      r.min = std::min(r.min, p.timestamp);
      r.max = std::max(r.max, p.timestamp);
    }
    s.date_range = r;
  }
  return s;
}

json to_json(const ForumStats& s) {
  json j{{"total_threads", s.total_threads},
         {"total_replies", s.total_replies},
         {"unique_authors", s.unique_authors},
         {"total_messages", s.total_messages}};
  if (s.date_range) {
    j["date_range"] = {{"min", s.date_range->min}, {"max", s.date_range->max}};
  } else {
    j["date_range"] = nullptr;
  }
  return j;
}

ForumStats forum_stats_from_json(const json& j) {
  ForumStats s;
  s.total_threads = j.at("total_threads").get<std::size_t>();
  s.total_replies = j.at("total_replies").get<std::size_t>();
  s.unique_authors = j.at("unique_authors").get<std::size_t>();
  s.total_messages = j.at("total_messages").get<std::size_t>();
  if (auto it = j.find("date_range"); it != j.end() && !it->is_null()) {
    s.date_range = DateRange{it->at("min").get<Timestamp>(), it->at("max").get<Timestamp>()};
  }
  return s;
}

std::string format_stats_table(const std::string& forum_name, const ForumStats& s) {
  std::ostringstream out;
  auto row = [&](const char* name, const std::string& value) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%-16s %24s\n", name, value.c_str());
    out << buf;
  };
  row("forum", forum_name);
  row("threads", std::to_string(s.total_threads));
  row("replies", std::to_string(s.total_replies));
  row("authors", std::to_string(s.unique_authors));
  row("messages", std::to_string(s.total_messages));
  row("first post", s.date_range ? format_iso8601(s.date_range->min) : "-");
  row("last post", s.date_range ? format_iso8601(s.date_range->max) : "-");
  return out.str();
}

// ---------------------------------------------------------------------------

SchemaConfig SchemaConfig::from_json(const json& j) {
  SchemaConfig s;
  auto get = [&](const char* key, std::string& field) {
    if (auto it = j.find(key); it != j.end()) field = it->get<std::string>();
  };
  get("forum_name", s.forum_name);
  const json& fields = j.contains("fields") ? j.at("fields") : j;
  auto getf = [&](const char* key, std::string& field) {
    if (auto it = fields.find(key); it != fields.end()) field = it->get<std::string>();
  };
  getf("id", s.id_field);
  getf("thread", s.thread_field);
  getf("author", s.author_field);
  getf("time", s.time_field);
  getf("body", s.body_field);
  getf("position", s.position_field);
  return s;
}

SchemaConfig SchemaConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open schema config: " + path);
  try {
    return from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw SchemaError("schema config " + path + ": " + e.what());
  }
}

namespace {

std::optional<Timestamp> parse_iso(const std::string& s) {
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
  int consumed = 0;
  if (std::sscanf(s.c_str(), "%4d-%2d-%2d%n", &y, &mo, &d, &consumed) != 3) return std::nullopt;
  std::size_t pos = static_cast<std::size_t>(consumed);
  if (pos < s.size()) {
    if (s[pos] != 'T' && s[pos] != ' ') return std::nullopt;
    int c2 = 0;
    if (std::sscanf(s.c_str() + pos + 1, "%2d:%2d:%2d%n", &h, &mi, &sec, &c2) != 3) {
      return std::nullopt;
    }
    pos += 1 + static_cast<std::size_t>(c2);
    if (pos < s.size() && !(s[pos] == 'Z' && pos + 1 == s.size())) return std::nullopt;
  }
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || sec > 60) return std::nullopt;
  const auto days = sys_days{ymd}.time_since_epoch().count();
  return static_cast<Timestamp>(days) * 86400 + h * 3600 + mi * 60 + sec;
}

std::optional<std::string> id_string(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  return std::nullopt;
}

struct RawRecord {
  Post post;
  bool has_position = false;
  std::size_t line = 0;
};

IngestResult assemble(std::vector<RawRecord> records, IngestReport report,
                      const SchemaConfig& schema) {
  if (report.accepted == 0) {
    throw SchemaError("zero valid lines in input (" + std::to_string(report.lines_read) +
                      " lines read, " + std::to_string(report.rejected.size()) + " rejected)");
  }
  std::map<ThreadId, std::vector<std::size_t>> by_thread;
  for (std::size_t i = 0; i < records.size(); ++i) {
    by_thread[records[i].post.thread_id].push_back(i);
  }
  std::vector<Post> posts;
  posts.reserve(records.size());
  std::set<PostId> seen_ids;
  for (auto& [tid, idx] : by_thread) {
    const bool explicit_positions = std::all_of(
        idx.begin(), idx.end(), [&](std::size_t i) { return records[i].has_position; });
    if (!explicit_positions) {
      std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return records[a].post.timestamp < records[b].post.timestamp;
      });
      for (std::size_t k = 0; k < idx.size(); ++k) {
        records[idx[k]].post.position = static_cast<std::uint32_t>(k);
      }
    }
    std::set<std::uint32_t> positions;
    std::vector<std::size_t> kept;
    for (std::size_t i : idx) {
      auto& r = records[i];
      if (!positions.insert(r.post.position).second) {
        report.rejected.push_back({r.line, "duplicate position " + std::to_string(r.post.position) +
                                               " in thread " + tid});
        continue;
      }
      kept.push_back(i);
    }
    if (!positions.contains(0)) {
      ++report.orphan_threads;
      report.orphan_posts += kept.size();
      continue;
    }
    for (std::size_t i : kept) {
      auto& r = records[i];
      if (!seen_ids.insert(r.post.post_id).second) {
        report.rejected.push_back({r.line, "duplicate post id " + r.post.post_id});
        continue;
      }
      posts.push_back(std::move(r.post));
    }
  }
  report.accepted = posts.size();
  if (posts.empty()) throw SchemaError("zero valid lines in input after thread assembly");
  std::sort(report.rejected.begin(), report.rejected.end(),
            [](const LineError& a, const LineError& b) { return a.line < b.line; });
  IngestResult result{Corpus::from_posts(schema.forum_name, std::move(posts)), std::move(report)};
  result.report.out_of_order_threads = result.corpus.out_of_order_threads();
  return result;
}

// Converts one JSON record; returns an error message on rejection.
std::optional<std::string> to_record(const json& obj, const SchemaConfig& schema, RawRecord& out) {
  if (!obj.is_object()) return "not a JSON object";
  auto field = [&](const std::string& name) -> const json* {
    auto it = obj.find(name);
    return it == obj.end() || it->is_null() ? nullptr : &*it;
  };
  const json* id = field(schema.id_field);
  const json* thread = field(schema.thread_field);
  const json* author = field(schema.author_field);
  const json* time = field(schema.time_field);
  const json* body = field(schema.body_field);
  if (!id) return "missing field '" + schema.id_field + "'";
  if (!thread) return "missing field '" + schema.thread_field + "'";
  if (!author) return "missing field '" + schema.author_field + "'";
  if (!time) return "missing field '" + schema.time_field + "'";
  if (!body) return "missing field '" + schema.body_field + "'";
  auto id_s = id_string(*id);
  auto thread_s = id_string(*thread);
  auto author_s = id_string(*author);
  if (!id_s) return "field '" + schema.id_field + "' must be a string or integer";
  if (!thread_s) return "field '" + schema.thread_field + "' must be a string or integer";
  if (!author_s) return "field '" + schema.author_field + "' must be a string or integer";
  auto ts = parse_timestamp(*time);
  if (!ts) return "field '" + schema.time_field + "' is not a timestamp";
  if (!body->is_string()) return "field '" + schema.body_field + "' must be a string";
  out.post.post_id = std::move(*id_s);
  out.post.thread_id = std::move(*thread_s);
  out.post.author = std::move(*author_s);
  out.post.timestamp = *ts;
  out.post.body = body->get<std::string>();
  if (const json* pos = field(schema.position_field)) {
    if (!pos->is_number_unsigned() && !(pos->is_number_integer() && pos->get<std::int64_t>() >= 0)) {
      return "field '" + schema.position_field + "' must be a non-negative integer";
    }
    out.post.position = pos->get<std::uint32_t>();
    out.has_position = true;
  }
  return std::nullopt;
}

}  // namespace

std::optional<Timestamp> parse_timestamp(const json& value) {
  if (value.is_number_integer() || value.is_number_unsigned()) return value.get<Timestamp>();
  if (value.is_number_float()) {
    const double d = value.get<double>();
    if (d != static_cast<double>(static_cast<Timestamp>(d))) return std::nullopt;
    return static_cast<Timestamp>(d);
  }
  if (value.is_string()) {
    const auto s = value.get<std::string>();
    if (!s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return (c >= '0' && c <= '9') || c == '-'; }) &&
        s.find('-', 1) == std::string::npos) {
      try {
        return std::stoll(s);
      } catch (...) {
        return std::nullopt;
      }
    }
    return parse_iso(s);
  }
  return std::nullopt;
}

std::string format_iso8601(Timestamp t) {
  using namespace std::chrono;
  const auto days = static_cast<int>((t >= 0 ? t : t - 86399) / 86400);
  const auto secs = t - static_cast<Timestamp>(days) * 86400;
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(secs / 3600), static_cast<int>(secs / 60 % 60),
                static_cast<int>(secs % 60));
  return buf;
}

IngestResult ingest_jsonl(std::istream& in, const SchemaConfig& schema) {
  IngestReport report;
  std::vector<RawRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++report.lines_read;
    RawRecord rec;
    rec.line = line_no;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      report.rejected.push_back({line_no, std::string("malformed JSON: ") + e.what()});
      continue;
    }
    if (auto err = to_record(obj, schema, rec)) {
      report.rejected.push_back({line_no, *err});
      continue;
    }
    ++report.accepted;
    records.push_back(std::move(rec));
  }
  if (in.bad()) throw IoError("read error while ingesting");
  return assemble(std::move(records), std::move(report), schema);
}

IngestResult ingest_jsonl(const std::string& path, const SchemaConfig& schema) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open corpus file: " + path);
  return ingest_jsonl(in, schema);
}

namespace {

// RFC 4180 record reader; returns false at end of input.
bool read_csv_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line_no) {
  fields.clear();
  std::string field;
  bool in_quotes = false;
  bool any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line_no;
        field.push_back(c);
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      ++line_no;
      fields.push_back(std::move(field));
      return true;
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  if (!any) return false;
  fields.push_back(std::move(field));
  return true;
}

}  // namespace

IngestResult ingest_csv(const std::string& path, const SchemaConfig& schema) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open corpus file: " + path);
  std::vector<std::string> header;
  std::size_t line_no = 0;
  if (!read_csv_record(in, header, line_no)) {
    throw SchemaError("zero valid lines in input (empty CSV)");
  }
  IngestReport report;
  std::vector<RawRecord> records;
  std::vector<std::string> row;
  while (true) {
    const std::size_t start_line = line_no + 1;
    if (!read_csv_record(in, row, line_no)) break;
    if (row.size() == 1 && row[0].empty()) continue;
    ++report.lines_read;
    if (row.size() != header.size()) {
      report.rejected.push_back({start_line, "expected " + std::to_string(header.size()) +
                                                 " columns, found " + std::to_string(row.size())});
      continue;
    }
    json obj = json::object();
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == schema.position_field) {
        if (row[i].empty()) continue;
        try {
          obj[header[i]] = std::stoll(row[i]);
        } catch (...) {
          obj[header[i]] = row[i];
        }
      } else {
        obj[header[i]] = row[i];
      }
    }
    RawRecord rec;
    rec.line = start_line;
    if (auto err = to_record(obj, schema, rec)) {
      report.rejected.push_back({start_line, *err});
      continue;
    }
    ++report.accepted;
    records.push_back(std::move(rec));
  }
  return assemble(std::move(records), std::move(report), schema);
}

void export_jsonl(const Corpus& corpus, std::ostream& out) {
  for (const auto& p : corpus.posts()) {
    json j{{"post_id", p.post_id},   {"thread_id", p.thread_id}, {"author", p.author},
           {"timestamp", p.timestamp}, {"body", p.body},         {"position", p.position}};
    out << j.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
  }
}

void export_jsonl(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write corpus file: " + path);
  export_jsonl(corpus, out);
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace chainforge
