#include <doctest.h>

#include "chainforge/corpus.hpp"
#include "chainforge/rng.hpp"
#include "chainforge/text.hpp"

using namespace chainforge;
namespace text = chainforge::text;

namespace {

Post post(std::string id, std::uint32_t pos, std::string body) {
  return {std::move(id), "t", "u" + std::to_string(pos), pos, std::move(body), pos};
}

// Naive reference: mark every reply position inside some width-m window that
// occurs verbatim (after normalization) in a prior post, delete, repeat.
std::string naive_strip(std::string reply, const std::vector<std::string>& priors, std::size_t m) {
  std::vector<std::u32string> folded_priors;
  for (const auto& p : priors) folded_priors.push_back(text::fold_case(text::collapse_whitespace(text::decode_utf8(p))));
  auto body = text::collapse_whitespace(text::decode_utf8(reply));
  while (true) {
    const auto folded = text::fold_case(body);
    std::vector<bool> covered(body.size(), false);
    bool any = false;
    for (std::size_t i = 0; i + m <= folded.size(); ++i) {
      const auto w = folded.substr(i, m);
      for (const auto& p : folded_priors) {
        if (p.find(w) != std::u32string::npos) {
          for (std::size_t k = i; k < i + m; ++k) covered[k] = true;
          any = true;
          break;
        }
      }
    }
    if (!any) break;
    std::u32string out, piece;
    auto flush = [&] {
      auto c = text::collapse_whitespace(piece);
      if (!c.empty()) {
        if (!out.empty()) out.push_back(U' ');
        out += c;
      }
      piece.clear();
    };
    for (std::size_t i = 0; i < body.size(); ++i) {
      if (covered[i]) flush();
      else piece.push_back(body[i]);
    }
    flush();
    body = out;
  }
  return text::encode_utf8(body);
}

}  // namespace

TEST_CASE("no overlap leaves the body alone apart from whitespace") {
  const auto product = post("p0", 0, "Selling crypter, fully undetectable, lifetime updates included for all buyers");
  const auto reply = post("r1", 1, "  does it   bypass\nwindows defender?  ");
  CHECK(remove_quotes(reply, std::span(&product, 1)) == "does it bypass windows defender?");
}

TEST_CASE("copy of the product post plus original text") {
  const auto product = post("p0", 0, "Selling crypter, fully undetectable, lifetime updates included for all buyers");
  const auto reply = post("r1", 1, product.body + " i bought this");
  CHECK(remove_quotes(reply, std::span(&product, 1)) == "i bought this");
}

TEST_CASE("quote matching ignores case and whitespace layout") {
  const auto product = post("p0", 0, "Selling   Crypter, fully UNDETECTABLE,\nlifetime updates included for all buyers");
  const auto reply = post("r1", 1, "selling crypter, fully undetectable, lifetime updates included for all buyers\n\nVouch!");
  CHECK(remove_quotes(reply, std::span(&product, 1)) == "Vouch!");
}

TEST_CASE("two quoted replies interleaved with original text") {
  std::vector<Post> priors{
      post("p0", 0, "Cheap socks5 proxies, residential, rotating every five minutes, worldwide"),
      post("r1", 1, "I have been using these proxies for two months and never had a single ban"),
      post("r2", 2, "Does anyone know whether the rotating pool includes mobile carrier addresses?"),
  };
  const auto reply = post("r3", 3,
                          "I have been using these proxies for two months and never had a single ban "
                          "agreed, same here. "
                          "Does anyone know whether the rotating pool includes mobile carrier addresses? "
                          "yes it does");
  CHECK(remove_quotes(reply, priors) == "agreed, same here. yes it does");
}

TEST_CASE("short common phrases survive below the threshold") {
  const auto product = post("p0", 0, "PM me for the price");
  const auto reply = post("r1", 1, "PM me for the price, I want two");
  CHECK(remove_quotes(reply, std::span(&product, 1)) == "PM me for the price, I want two");
  QuoteConfig tight;
  tight.min_quote_chars = 10;
  CHECK(remove_quotes(reply, std::span(&product, 1), tight) == ", I want two");
}

TEST_CASE("nothing is deleted without prior posts") {
  const auto reply = post("r1", 1, "Selling crypter, fully undetectable, lifetime updates included");
  CHECK(remove_quotes(reply, {}) == reply.body);
}

TEST_CASE("pre-pass hook runs before matching") {
  const auto product = post("p0", 0, "Bulletproof hosting in the Netherlands, DMCA ignored, crypto only");
  const auto reply = post("r1", 1, "[quote]Bulletproof hosting in the Netherlands, DMCA ignored, crypto only[/quote] nice");
  QuoteConfig cfg;
  cfg.pre_pass = [](std::string_view s) {
    std::string out(s);
    for (const std::string tag : {"[quote]", "[/quote]"}) {
      for (auto p = out.find(tag); p != std::string::npos; p = out.find(tag)) out.replace(p, tag.size(), " ");
    }
    return out;
  };
  CHECK(remove_quotes(reply, std::span(&product, 1), cfg) == "nice");
}

TEST_CASE("matches the naive reference and is idempotent on random text") {
  Rng rng(11);
  const std::u32string alphabet = U"ab c\nAБб";
  auto random_text = [&](std::size_t n) {
    std::u32string s;
    for (std::size_t i = 0; i < n; ++i) s.push_back(alphabet[rng.below(alphabet.size())]);
    return text::encode_utf8(s);
  };
  for (int trial = 0; trial < 200; ++trial) {
    QuoteConfig cfg;
    cfg.min_quote_chars = 3 + rng.below(6);
    std::vector<Post> priors;
    std::vector<std::string> prior_text;
    const auto n_priors = rng.below(3);
    for (std::uint32_t i = 0; i < n_priors; ++i) {
      priors.push_back(post("p" + std::to_string(i), i, random_text(5 + rng.below(30))));
      prior_text.push_back(priors.back().body);
    }
    std::string body = random_text(rng.below(40));
    // splice in pieces of the priors so matches actually happen
    if (!prior_text.empty()) body += prior_text[rng.below(prior_text.size())] + random_text(rng.below(5));
    const auto reply = post("r", static_cast<std::uint32_t>(n_priors), body);
    const auto once = remove_quotes(reply, priors, cfg);
    CHECK(once == naive_strip(body, prior_text, cfg.min_quote_chars));
    auto again = reply;
    again.body = once;
    CHECK(remove_quotes(again, priors, cfg) == once);
  }
}

TEST_CASE("clean_corpus_text strips replies against their own thread only") {
  const std::string product_a = "Instagram followers, real looking accounts, refill guarantee thirty days";
  std::vector<Post> posts{
      {"a0", "a", "s", 1, product_a, 0},
      {"a1", "a", "b", 2, product_a + " bought 5k", 1},
      {"b0", "b", "s", 3, "something else entirely for sale here", 0},
      {"b1", "b", "c", 4, product_a + " wrong thread", 1},
  };
  const auto clean = clean_corpus_text(Corpus::from_posts("f", posts));
  CHECK(clean.at("a0") == product_a);
  CHECK(clean.at("a1") == "bought 5k");
  CHECK(clean.at("b1") == product_a + " wrong thread");
}
