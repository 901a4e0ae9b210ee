#include <algorithm>
#include <unordered_map>

#include "chainforge/corpus.hpp"
#include "chainforge/text.hpp"

namespace chainforge {
namespace {

constexpr std::uint64_t kBase = 0x100000001b3ULL;

struct WindowRef {
  std::uint32_t source;
  std::uint32_t offset;
};

// Prefix hashes: h[i] = hash of s[0, i).
std::vector<std::uint64_t> prefix_hashes(const std::u32string& s) {
  std::vector<std::uint64_t> h(s.size() + 1, 0);
  for (std::size_t i = 0; i < s.size(); ++i) h[i + 1] = h[i] * kBase + s[i] + 1;
  return h;
}

class WindowIndex {
 public:
  WindowIndex(std::vector<std::u32string> sources, std::size_t width)
      : sources_(std::move(sources)), width_(width) {
    power_ = 1;
    for (std::size_t i = 0; i < width_; ++i) power_ *= kBase;
    for (std::uint32_t s = 0; s < sources_.size(); ++s) {
      const auto& src = sources_[s];
      if (src.size() < width_) continue;
      const auto h = prefix_hashes(src);
      for (std::size_t i = 0; i + width_ <= src.size(); ++i) {
        table_[window_hash(h, i)].push_back({s, static_cast<std::uint32_t>(i)});
      }
    }
  }

  bool empty() const noexcept { return table_.empty(); }

  std::uint64_t window_hash(const std::vector<std::uint64_t>& h, std::size_t i) const {
    return h[i + width_] - h[i] * power_;
  }

  bool contains(const std::u32string& text, std::size_t at, std::uint64_t hash) const {
    auto it = table_.find(hash);
    if (it == table_.end()) return false;
    const std::u32string_view needle(text.data() + at, width_);
    return std::any_of(it->second.begin(), it->second.end(), [&](const WindowRef& r) {
      return std::u32string_view(sources_[r.source]).substr(r.offset, width_) == needle;
    });
  }

 private:
  std::vector<std::u32string> sources_;
  std::size_t width_;
  std::uint64_t power_ = 1;
  std::unordered_map<std::uint64_t, std::vector<WindowRef>> table_;
};

std::u32string prepare(const std::string& body, const QuoteConfig& config) {
  if (config.pre_pass) return text::collapse_whitespace(text::decode_utf8(config.pre_pass(body)));
  return text::collapse_whitespace(text::decode_utf8(body));
}

// One deletion pass; returns false when nothing matched.
bool strip_once(std::u32string& original, const WindowIndex& index, std::size_t width) {
  if (original.size() < width) return false;
  const auto folded = text::fold_case(original);
  const auto h = prefix_hashes(folded);
  std::vector<bool> covered(folded.size(), false);
  bool any = false;
  for (std::size_t i = 0; i + width <= folded.size(); ++i) {
    if (index.contains(folded, i, index.window_hash(h, i))) {
      std::fill(covered.begin() + static_cast<std::ptrdiff_t>(i),
                covered.begin() + static_cast<std::ptrdiff_t>(i + width), true);
      any = true;
    }
  }
  if (!any) return false;
  std::u32string joined;
  std::size_t i = 0;
  while (i < original.size()) {
    if (covered[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < original.size() && !covered[j]) ++j;
    auto piece = text::collapse_whitespace(std::u32string_view(original).substr(i, j - i));
    if (!piece.empty()) {
      if (!joined.empty()) joined.push_back(U' ');
      joined += piece;
    }
    i = j;
  }
  original = std::move(joined);
  return true;
}

}  // namespace

std::string remove_quotes(const Post& reply, std::span<const Post> prior_posts,
                          const QuoteConfig& config) {
  auto body = prepare(reply.body, config);
  const std::size_t width = std::max<std::size_t>(config.min_quote_chars, 1);
  std::vector<std::u32string> sources;
  sources.reserve(prior_posts.size());
  for (const auto& p : prior_posts) {
    auto s = text::fold_case(prepare(p.body, config));
    if (s.size() >= width) sources.push_back(std::move(s));
  }
  if (sources.empty()) return text::encode_utf8(body);
  const WindowIndex index(std::move(sources), width);
  while (strip_once(body, index, width)) {
  }
  return text::encode_utf8(body);
}

std::map<PostId, std::string> clean_corpus_text(const Corpus& corpus, const QuoteConfig& config) {
  std::map<PostId, std::string> out;
  for (const auto& tid : corpus.thread_ids()) {
    const auto posts = corpus.thread(tid);
    for (std::size_t i = 0; i < posts.size(); ++i) {
      if (i == 0) {
        out.emplace(posts[i].post_id, text::encode_utf8(prepare(posts[i].body, config)));
      } else {
        out.emplace(posts[i].post_id, remove_quotes(posts[i], posts.first(i), config));
      }
    }
  }
  return out;
}

}  // namespace chainforge
