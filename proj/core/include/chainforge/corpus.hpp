#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace chainforge {

using UserId = std::string;
using PostId = std::string;
using ThreadId = std::string;

/// UTC epoch seconds.
using Timestamp = std::int64_t;

/// One forum message. Position 0 is the thread's product post, every other
/// position is a reply.
struct Post {
  PostId post_id;
  ThreadId thread_id;
  UserId author;
  Timestamp timestamp = 0;
  std::string body;
  std::uint32_t position = 0;

  bool is_product_post() const noexcept { return position == 0; }
  friend bool operator==(const Post&, const Post&) = default;
};

/// Immutable, validated collection of posts ordered by (thread_id, position).
class Corpus {
 public:
  Corpus() = default;

  /// Sorts and indexes `posts`. Throws SchemaError on duplicate post ids,
  /// duplicate (thread, position) pairs or a thread without position 0.
  static Corpus from_posts(std::string forum_name, std::vector<Post> posts);

  const std::string& forum_name() const noexcept { return forum_name_; }
  std::span<const Post> posts() const noexcept { return posts_; }
  std::size_t size() const noexcept { return posts_.size(); }
  bool empty() const noexcept { return posts_.empty(); }

  const Post* find(std::string_view post_id) const;

  /// Thread ids in sorted order.
  std::vector<ThreadId> thread_ids() const;
  std::size_t thread_count() const noexcept { return threads_.size(); }

  /// Posts of one thread ordered by position; empty span if unknown.
  std::span<const Post> thread(std::string_view thread_id) const;

  /// Indices into posts() authored by `user`.
  std::span<const std::size_t> posts_by(std::string_view user) const;
  const std::map<UserId, std::vector<std::size_t>, std::less<>>& user_index()
      const noexcept {
    return user_index_;
  }

  /// Threads whose reply timestamps decrease somewhere along position order.
  std::size_t out_of_order_threads() const noexcept { return out_of_order_; }

 private:
  std::string forum_name_;
  std::vector<Post> posts_;
  std::map<ThreadId, std::pair<std::size_t, std::size_t>, std::less<>> threads_;
  std::map<PostId, std::size_t, std::less<>> by_id_;
  std::map<UserId, std::vector<std::size_t>, std::less<>> user_index_;
  std::size_t out_of_order_ = 0;
};

struct DateRange {
  Timestamp min = 0;
  Timestamp max = 0;
  friend bool operator==(const DateRange&, const DateRange&) = default;
};

struct ForumStats {
  std::size_t total_threads = 0;
  std::size_t total_replies = 0;
  std::size_t unique_authors = 0;
  std::size_t total_messages = 0;
  std::optional<DateRange> date_range;
  friend bool operator==(const ForumStats&, const ForumStats&) = default;
};

ForumStats corpus_stats(const Corpus& corpus);
nlohmann::json to_json(const ForumStats& stats);
ForumStats forum_stats_from_json(const nlohmann::json& j);
std::string format_stats_table(const std::string& forum_name, const ForumStats& stats);

/// Maps canonical Post fields onto the field names used by a dump.
/// `position` is optional: when a thread's records lack it, positions follow
/// timestamp order (ties by file order).
struct SchemaConfig {
  std::string forum_name = "forum";
  std::string id_field = "post_id";
  std::string thread_field = "thread_id";
  std::string author_field = "author";
  std::string time_field = "timestamp";
  std::string body_field = "body";
  std::string position_field = "position";

  static SchemaConfig from_json(const nlohmann::json& j);
  static SchemaConfig load(const std::string& path);
};

struct LineError {
  std::size_t line = 0;
  std::string message;
};

struct IngestReport {
  std::size_t lines_read = 0;
  std::size_t accepted = 0;
  std::vector<LineError> rejected;
  /// Threads dropped because no record carried position 0.
  std::size_t orphan_threads = 0;
  std::size_t orphan_posts = 0;
  std::size_t out_of_order_threads = 0;
};

struct IngestResult {
  Corpus corpus;
  IngestReport report;
};

/// Reads one JSON object per line. Malformed lines are reported per line;
/// an unreadable file throws IoError and zero valid lines throws SchemaError.
IngestResult ingest_jsonl(const std::string& path, const SchemaConfig& schema = {});
IngestResult ingest_jsonl(std::istream& in, const SchemaConfig& schema = {});

/// CSV adapter: header row names the columns, mapped through `schema`.
IngestResult ingest_csv(const std::string& path, const SchemaConfig& schema = {});

/// Writes the corpus in canonical field names, one post per line.
void export_jsonl(const Corpus& corpus, std::ostream& out);
void export_jsonl(const Corpus& corpus, const std::string& path);

/// Parses epoch seconds from an integer or an ISO-8601 UTC string
/// ("YYYY-MM-DD", "YYYY-MM-DDTHH:MM:SS[Z]").
std::optional<Timestamp> parse_timestamp(const nlohmann::json& value);
std::string format_iso8601(Timestamp t);

// ---------------------------------------------------------------------------
// Quote removal

struct QuoteConfig {
  /// Shortest normalized run (in code points) treated as a quote.
  std::size_t min_quote_chars = 40;
  /// Optional per-forum pass applied to every body before matching,
  /// e.g. a BBCode [quote] stripper.
  std::function<std::string(std::string_view)> pre_pass;
};

/// Deletes from `reply.body` every maximal run that also occurs, after
/// whitespace collapsing and case folding, as a substring of at least
/// `min_quote_chars` code points in one of `prior_posts`. Surviving pieces
/// are joined with single spaces. The result is a fixed point: applying the
/// function to its own output changes nothing.
std::string remove_quotes(const Post& reply, std::span<const Post> prior_posts,
                          const QuoteConfig& config = {});

/// Quote-stripped body for every reply of a corpus (product posts map to
/// their whitespace-collapsed body).
std::map<PostId, std::string> clean_corpus_text(const Corpus& corpus,
                                                const QuoteConfig& config = {});

}  // namespace chainforge
