#include "chainforge/synth.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "chainforge/error.hpp"
#include "chainforge/rng.hpp"

namespace chainforge {

using nlohmann::json;

namespace {

std::map<ProductCategory, std::vector<std::string>> builtin_category_vocabulary() {
  using C = ProductCategory;
  return {
      {C::account, {"account", "login", "aged", "og", "handle", "username", "gmail", "steamid",
                    "credentials", "verified", "fullaccess", "registered"}},
      {C::botnet, {"botnet", "bots", "zombies", "infected", "loader", "installs", "panel",
                   "c2", "rentbots", "bothost", "slaves", "worldwide"}},
      {C::crypter, {"crypter", "fud", "stub", "scantime", "runtime", "obfuscate", "undetectable",
                    "antivirus", "bypass", "crypted", "polymorphic", "encrypt"}},
      {C::ddos_service, {"ddos", "stresser", "booter", "flood", "gbps", "layer7", "takedown",
                         "udpflood", "attack", "offline", "synflood", "amplification"}},
      {C::hacked_server, {"rdp", "shell", "root", "cpanel", "vps", "hacked", "webshell",
                          "ssh", "compromised", "adminpanel", "dedicated", "smtpaccess"}},
      {C::hack_for_hire, {"hire", "hacker", "target", "coding", "custom", "jobs", "recover",
                          "pentest", "commission", "task", "freelance", "contract"}},
      {C::hosting, {"hosting", "bulletproof", "offshore", "dmca", "uptime", "domain", "webhost",
                    "gameserver", "mitigation", "resellerhost", "nameserver", "colocation"}},
      {C::malware, {"rat", "keylogger", "stealer", "ransomware", "miner", "trojan", "payload",
                    "backdoor", "grabber", "spyware", "worm", "dropper"}},
      {C::proxy, {"proxy", "vpn", "socks5", "residential", "anonymous", "rotating", "ipv4",
                  "tunnel", "nolog", "backconnect", "proxylist", "elite"}},
      {C::social_booster, {"followers", "likes", "instagram", "youtube", "views", "subscribers",
                           "twitter", "retweets", "engagement", "viral", "tiktok", "vkontakte"}},
      {C::spam_tool, {"spam", "mailer", "bulk", "inbox", "emails", "smtp", "sender", "leads",
                      "autoposter", "spammer", "newsletter", "blast"}},
      {C::traffic, {"traffic", "visitors", "hits", "seo", "clicks", "organic", "ranking",
                    "backlinks", "pageviews", "conversions", "adsense", "referral"}},
      {C::video_game_service, {"minecraft", "runescape", "gold", "powerleveling", "mods",
                               "csgo", "skins", "boosting", "fortnite", "vbucks", "elo", "wow"}},
      {C::other, {"tutorial", "ebook", "guide", "question", "discussion", "news", "method",
                  "giveaway", "lounge", "opinion", "politics", "music"}},
  };
}

std::map<ReplyLabel, std::vector<std::string>> builtin_reply_vocabulary() {
  return {
      {ReplyLabel::buy, {"bought", "purchased", "paid", "received", "works", "thanks", "delivered",
                         "pmed", "ordered", "got", "sent", "btc"}},
      {ReplyLabel::sell, {"offering", "wts", "selling", "cheaper", "stock", "myshop", "discount",
                          "available", "supply", "wholesale", "providing", "deal"}},
      {ReplyLabel::other, {"bump", "how", "what", "scam", "interesting", "lol", "why", "price",
                           "when", "wait", "questionmark", "nice"}},
  };
}

std::vector<std::string> builtin_vouch_vocabulary() {
  return {"vouch", "trusted", "legit", "reputable", "recommend", "honest", "reliable", "respected",
          "vouched", "trustworthy", "longtime", "friend"};
}

std::vector<std::string> builtin_filler_vocabulary() {
  return {"the", "a", "for", "and", "best", "quality", "fast", "contact", "me", "on", "skype",
          "jabber", "today", "cheap", "only", "now", "with", "you", "this", "is"};
}

Timestamp json_time(const json& v) {
  auto t = parse_timestamp(v);
  if (!t) throw SchemaError("synth config: bad timestamp " + v.dump());
  return *t;
}

struct PlannedReply {
  UserId author;
  ReplyLabel label = ReplyLabel::other;
  Timestamp time = 0;
  bool vouch = false;
  bool quotes = false;
};

struct PlannedThread {
  ThreadId id;
  ProductCategory category = ProductCategory::other;
  UserId author;
  Timestamp time = 0;
  std::vector<PlannedReply> replies;
};

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& v) {
  return v[static_cast<std::size_t>(rng.below(v.size()))];
}

std::string words(Rng& rng, const std::vector<std::string>& primary, std::size_t n_primary,
                  const std::vector<std::string>& filler, std::size_t n_filler) {
  std::vector<std::string> ws;
  for (std::size_t i = 0; i < n_primary; ++i) ws.push_back(pick(rng, primary));
  for (std::size_t i = 0; i < n_filler; ++i) ws.push_back(pick(rng, filler));
  rng.shuffle(std::span<std::string>(ws));
  std::string out;
  for (const auto& w : ws) {
    if (!out.empty()) out.push_back(' ');
    out += w;
  }
  return out;
}

std::string pad(std::size_t v, int width) {
  auto s = std::to_string(v);
  if (static_cast<int>(s.size()) < width) s.insert(0, static_cast<std::size_t>(width) - s.size(), '0');
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

SynthConfig SynthConfig::defaults() {
  SynthConfig c;
  c.category_vocabulary = builtin_category_vocabulary();
  c.reply_vocabulary = builtin_reply_vocabulary();
  c.vouch_vocabulary = builtin_vouch_vocabulary();
  c.filler_vocabulary = builtin_filler_vocabulary();
  return c;
}

SynthConfig SynthConfig::from_json(const json& j) {
  SynthConfig c = defaults();
  c.seed = j.value("seed", c.seed);
  c.forum_name = j.value("forum_name", c.forum_name);
  c.docs_per_category = j.value("docs_per_category", c.docs_per_category);
  c.n_sellers = j.value("n_sellers", c.n_sellers);
  c.n_buyers = j.value("n_buyers", c.n_buyers);
  c.min_replies = j.value("min_replies", c.min_replies);
  c.max_replies = j.value("max_replies", c.max_replies);
  c.buy_rate = j.value("buy_rate", c.buy_rate);
  c.sell_rate = j.value("sell_rate", c.sell_rate);
  c.vouch_rate = j.value("vouch_rate", c.vouch_rate);
  c.quote_rate = j.value("quote_rate", c.quote_rate);
  c.product_words_min = j.value("product_words_min", c.product_words_min);
  c.product_words_max = j.value("product_words_max", c.product_words_max);
  c.keyword_share = j.value("keyword_share", c.keyword_share);
  if (j.contains("start_time")) c.start_time = json_time(j.at("start_time"));
  if (j.contains("end_time")) c.end_time = json_time(j.at("end_time"));
  c.reply_window_seconds = j.value("reply_window_seconds", c.reply_window_seconds);
  c.planted_sale_buys = j.value("planted_sale_buys", c.planted_sale_buys);
  if (auto it = j.find("planted_chains"); it != j.end()) {
    c.planted_chains.clear();
    for (const auto& p : *it) {
      auto src = parse_product_category(p.at("src").get<std::string>());
      auto dst = parse_product_category(p.at("dst").get<std::string>());
      if (!src || !dst) throw SchemaError("synth config: unknown planted chain category");
      c.planted_chains.push_back({*src, *dst, p.at("count").get<std::size_t>()});
    }
  }
  if (auto it = j.find("category_vocabulary"); it != j.end()) {
    for (const auto& [name, ws] : it->items()) {
      auto cat = parse_product_category(name);
      if (!cat) throw SchemaError("synth config: unknown category '" + name + "'");
      c.category_vocabulary[*cat] = ws.get<std::vector<std::string>>();
    }
  }
  if (auto it = j.find("reply_vocabulary"); it != j.end()) {
    for (const auto& [name, ws] : it->items()) {
      auto label = parse_reply_label(name);
      if (!label) throw SchemaError("synth config: unknown reply label '" + name + "'");
      c.reply_vocabulary[*label] = ws.get<std::vector<std::string>>();
    }
  }
  if (j.contains("vouch_vocabulary")) c.vouch_vocabulary = j.at("vouch_vocabulary").get<std::vector<std::string>>();
  if (j.contains("filler_vocabulary")) c.filler_vocabulary = j.at("filler_vocabulary").get<std::vector<std::string>>();
  c.validate();
  return c;
}

SynthConfig SynthConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open synth config: " + path);
  try {
    return from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw SchemaError("synth config " + path + ": " + e.what());
  }
}

json SynthConfig::to_json() const {
  json planted = json::array();
  for (const auto& p : planted_chains) {
    planted.push_back({{"src", to_string(p.src)}, {"dst", to_string(p.dst)}, {"count", p.count}});
  }
  json cats = json::object();
  for (const auto& [c, ws] : category_vocabulary) cats[std::string(to_string(c))] = ws;
  json replies = json::object();
  for (const auto& [r, ws] : reply_vocabulary) replies[std::string(to_string(r))] = ws;
  return {{"seed", seed},
          {"forum_name", forum_name},
          {"docs_per_category", docs_per_category},
          {"n_sellers", n_sellers},
          {"n_buyers", n_buyers},
          {"min_replies", min_replies},
          {"max_replies", max_replies},
          {"buy_rate", buy_rate},
          {"sell_rate", sell_rate},
          {"vouch_rate", vouch_rate},
          {"quote_rate", quote_rate},
          {"product_words_min", product_words_min},
          {"product_words_max", product_words_max},
          {"keyword_share", keyword_share},
          {"start_time", start_time},
          {"end_time", end_time},
          {"reply_window_seconds", reply_window_seconds},
          {"planted_sale_buys", planted_sale_buys},
          {"planted_chains", planted},
          {"category_vocabulary", cats},
          {"reply_vocabulary", replies},
          {"vouch_vocabulary", vouch_vocabulary},
          {"filler_vocabulary", filler_vocabulary}};
}

void SynthConfig::validate() const {
  if (docs_per_category == 0) throw InvalidArgument("docs_per_category must be > 0");
  if (n_sellers < 2 || n_buyers < 1) throw InvalidArgument("need at least 2 sellers and 1 buyer");
  if (min_replies > max_replies) throw InvalidArgument("min_replies > max_replies");
  if (product_words_min < 1 || product_words_min > product_words_max) {
    throw InvalidArgument("bad product word range");
  }
  for (double r : {buy_rate, sell_rate, vouch_rate, quote_rate, keyword_share}) {
    if (!(r >= 0.0 && r <= 1.0)) throw InvalidArgument("rates must lie in [0, 1]");
  }
  if (buy_rate + sell_rate > 1.0) throw InvalidArgument("buy_rate + sell_rate exceeds 1");
  if (end_time - start_time <= 2 * reply_window_seconds || reply_window_seconds < 60) {
    throw InvalidArgument("date range too short for the reply window");
  }
  if (planted_sale_buys < 1) throw InvalidArgument("planted_sale_buys must be >= 1");

  std::map<std::string, std::string> owner;
  auto claim = [&](const std::vector<std::string>& ws, const std::string& who) {
    if (ws.empty()) throw InvalidArgument("vocabulary '" + who + "' is empty");
    for (const auto& w : ws) {
      auto [it, inserted] = owner.emplace(w, who);
      if (!inserted && it->second != who) {
        throw InvalidArgument("word '" + w + "' appears in vocabularies '" + it->second +
                              "' and '" + who + "'");
      }
    }
  };
  for (auto c : kAllProductCategories) {
    auto it = category_vocabulary.find(c);
    if (it == category_vocabulary.end()) {
      throw InvalidArgument("missing vocabulary for category " + std::string(to_string(c)));
    }
    claim(it->second, "category:" + std::string(to_string(c)));
  }
  for (auto r : kAllReplyLabels) {
    auto it = reply_vocabulary.find(r);
    if (it == reply_vocabulary.end()) {
      throw InvalidArgument("missing vocabulary for reply label " + std::string(to_string(r)));
    }
    claim(it->second, "reply:" + std::string(to_string(r)));
  }
  claim(vouch_vocabulary, "vouch");
  claim(filler_vocabulary, "filler");
}

// ---------------------------------------------------------------------------
// Generation

SynthCorpus generate(const SynthConfig& config) {
  config.validate();
  Rng rng(config.seed);

  std::vector<UserId> sellers, buyers;
  for (std::size_t i = 0; i < config.n_sellers; ++i) sellers.push_back("seller" + pad(i, 4));
  for (std::size_t i = 0; i < config.n_buyers; ++i) buyers.push_back("buyer" + pad(i, 5));

  const Timestamp thread_span = config.end_time - config.start_time - config.reply_window_seconds;

  auto plan_reply_time = [&](const PlannedThread& t) {
    return t.time + 1 + static_cast<Timestamp>(rng.below(static_cast<std::uint64_t>(config.reply_window_seconds)));
  };

  // Phase 1: threads with ordinary replies.
  std::vector<PlannedThread> threads;
  std::map<ProductCategory, std::vector<std::size_t>> by_category;
  for (auto cat : kAllProductCategories) {
    for (std::size_t i = 0; i < config.docs_per_category; ++i) {
      PlannedThread t;
      t.id = "t" + pad(index_of(cat), 2) + "-" + pad(i, 5);
      t.category = cat;
      t.author = pick(rng, sellers);
      t.time = config.start_time + static_cast<Timestamp>(rng.below(static_cast<std::uint64_t>(thread_span)));
      const auto n = static_cast<std::size_t>(
          rng.between(static_cast<std::int64_t>(config.min_replies), static_cast<std::int64_t>(config.max_replies)));
      for (std::size_t r = 0; r < n; ++r) {
        PlannedReply reply;
        const double u = rng.uniform();
        reply.label = u < config.buy_rate                      ? ReplyLabel::buy
                      : u < config.buy_rate + config.sell_rate ? ReplyLabel::sell
                                                               : ReplyLabel::other;
        reply.author = pick(rng, buyers);
        reply.time = plan_reply_time(t);
        reply.quotes = rng.bernoulli(config.quote_rate);
        t.replies.push_back(std::move(reply));
      }
      if (rng.bernoulli(config.vouch_rate)) {
        PlannedReply v;
        do {
          v.author = pick(rng, sellers);
        } while (v.author == t.author);
        v.label = ReplyLabel::other;
        v.vouch = true;
        v.time = plan_reply_time(t);
        t.replies.push_back(std::move(v));
      }
      by_category[cat].push_back(threads.size());
      threads.push_back(std::move(t));
    }
  }

  // Phase 2: planted chains.
  GroundTruth truth;
  truth.seed = config.seed;
  std::vector<bool> used(threads.size(), false);
  for (auto& [cat, idx] : by_category) rng.shuffle(std::span<std::size_t>(idx));
  std::size_t broker = 0;
  for (const auto& spec : config.planted_chains) {
    for (std::size_t k = 0; k < spec.count; ++k) {
      const UserId middle = "broker" + pad(broker++, 3);
      auto& src_pool = by_category[spec.src];
      auto src_it = std::find_if(src_pool.begin(), src_pool.end(), [&](std::size_t i) {
        return !used[i] && threads[i].time < config.end_time - 3 * config.reply_window_seconds;
      });
      if (src_it == src_pool.end()) {
        throw InvalidArgument("cannot place planted chain " + std::string(to_string(spec.src)) +
                              " -> " + std::string(to_string(spec.dst)) + ": not enough source threads");
      }
      auto& t1 = threads[*src_it];
      used[*src_it] = true;
      PlannedReply buy;
      buy.author = middle;
      buy.label = ReplyLabel::buy;
      buy.time = plan_reply_time(t1);
      t1.replies.push_back(buy);

      auto& dst_pool = by_category[spec.dst];
      auto dst_it = std::find_if(dst_pool.begin(), dst_pool.end(), [&](std::size_t i) {
        return !used[i] && threads[i].time > buy.time;
      });
      if (dst_it == dst_pool.end()) {
        throw InvalidArgument("cannot place planted chain " + std::string(to_string(spec.src)) +
                              " -> " + std::string(to_string(spec.dst)) + ": not enough later sale threads");
      }
      auto& t2 = threads[*dst_it];
      used[*dst_it] = true;
      t2.author = middle;
      for (auto& r : t2.replies) {
        if (r.label == ReplyLabel::buy) r.label = ReplyLabel::other;
      }
      for (std::size_t b = 0; b < config.planted_sale_buys; ++b) {
        PlannedReply sale;
        sale.author = pick(rng, buyers);
        sale.label = ReplyLabel::buy;
        sale.time = plan_reply_time(t2);
        t2.replies.push_back(sale);
      }
      PlantedLink link;
      link.middle_user = middle;
      link.src_category = spec.src;
      link.dst_category = spec.dst;
      link.src_thread = t1.id;
      link.purchase_time = buy.time;
      link.dst_thread = t2.id;
      truth.planted.push_back(std::move(link));
    }
  }

  // Phase 3: render text, order replies by time, assign ids and positions.
  std::vector<Post> posts;
  std::set<UserId> authors;
  std::size_t replies_total = 0;
  Timestamp tmin = threads.front().time, tmax = threads.front().time;
  std::map<ThreadId, std::size_t> thread_index;
  for (std::size_t i = 0; i < threads.size(); ++i) thread_index[threads[i].id] = i;
  std::map<ThreadId, std::vector<Post>> rendered;
  for (auto& t : threads) {
    std::stable_sort(t.replies.begin(), t.replies.end(),
                     [](const PlannedReply& a, const PlannedReply& b) { return a.time < b.time; });
    const auto n_words = static_cast<std::size_t>(rng.between(
        static_cast<std::int64_t>(config.product_words_min), static_cast<std::int64_t>(config.product_words_max)));
    const auto n_key = std::max<std::size_t>(
        1, static_cast<std::size_t>(config.keyword_share * static_cast<double>(n_words) + 0.5));
    Post product{t.id + "-p0", t.id, t.author, t.time,
                 words(rng, config.category_vocabulary.at(t.category), n_key, config.filler_vocabulary,
                       n_words > n_key ? n_words - n_key : 0),
                 0};
    truth.labels.products[product.post_id] = t.category;
    authors.insert(product.author);
    tmin = std::min(tmin, product.timestamp);
    tmax = std::max(tmax, product.timestamp);
    auto& out = rendered[t.id];
    out.push_back(product);
    for (std::size_t r = 0; r < t.replies.size(); ++r) {
      const auto& plan = t.replies[r];
      std::string body;
      if (plan.vouch) {
        body = words(rng, config.vouch_vocabulary, 4 + rng.below(4), config.filler_vocabulary, 2);
      } else {
        body = words(rng, config.reply_vocabulary.at(plan.label), 3 + rng.below(4),
                     config.filler_vocabulary, 1 + rng.below(3));
      }
      if (plan.quotes) body = product.body + " " + body;
      Post reply{t.id + "-r" + pad(r + 1, 2), t.id, plan.author, plan.time, std::move(body),
                 static_cast<std::uint32_t>(r + 1)};
      truth.labels.replies[reply.post_id] = plan.label;
      authors.insert(reply.author);
      tmin = std::min(tmin, reply.timestamp);
      tmax = std::max(tmax, reply.timestamp);
      ++replies_total;
      out.push_back(std::move(reply));
    }
  }
  for (auto& link : truth.planted) {
    for (const auto& p : rendered.at(link.src_thread)) {
      if (p.author == link.middle_user && p.position > 0) link.purchase_reply = p.post_id;
    }
    const auto& dst = rendered.at(link.dst_thread);
    link.sale_post = dst.front().post_id;
    link.sale_time = 0;
    for (const auto& p : dst) {
      if (p.position > 0 && truth.labels.replies.at(p.post_id) == ReplyLabel::buy) {
        link.sale_replies.push_back(p.post_id);
        if (link.sale_time == 0) link.sale_time = p.timestamp;
      }
    }
  }
  for (auto& [tid, ps] : rendered) {
    for (auto& p : ps) posts.push_back(std::move(p));
  }

  truth.declared_stats.total_threads = threads.size();
  truth.declared_stats.total_replies = replies_total;
  truth.declared_stats.total_messages = threads.size() + replies_total;
  truth.declared_stats.unique_authors = authors.size();
  truth.declared_stats.date_range = DateRange{tmin, tmax};

  return {Corpus::from_posts(config.forum_name, std::move(posts)), std::move(truth)};
}

// ---------------------------------------------------------------------------
// Truth file

json GroundTruth::to_json() const {
  json planted_json = json::array();
  for (const auto& p : planted) {
    planted_json.push_back({{"middle_user", p.middle_user},
                            {"src_category", to_string(p.src_category)},
                            {"dst_category", to_string(p.dst_category)},
                            {"src_thread", p.src_thread},
                            {"purchase_reply", p.purchase_reply},
                            {"purchase_time", p.purchase_time},
                            {"dst_thread", p.dst_thread},
                            {"sale_post", p.sale_post},
                            {"sale_replies", p.sale_replies},
                            {"sale_time", p.sale_time}});
  }
  json j = labels.to_json();
  j["format"] = "chainforge.truth";
  j["version"] = 1;
  j["seed"] = seed;
  j["stats"] = chainforge::to_json(declared_stats);
  j["planted_links"] = planted_json;
  return j;
}

GroundTruth GroundTruth::from_json(const json& j) {
  if (j.value("format", "") != "chainforge.truth") throw SchemaError("not a truth file");
  GroundTruth t;
  t.labels = LabelSet::from_json(j);
  t.seed = j.value("seed", std::uint64_t{0});
  t.declared_stats = forum_stats_from_json(j.at("stats"));
  for (const auto& p : j.at("planted_links")) {
    PlantedLink l;
    l.middle_user = p.at("middle_user").get<std::string>();
    l.src_category = parse_product_category(p.at("src_category").get<std::string>()).value();
    l.dst_category = parse_product_category(p.at("dst_category").get<std::string>()).value();
    l.src_thread = p.at("src_thread").get<std::string>();
    l.purchase_reply = p.at("purchase_reply").get<std::string>();
    l.purchase_time = p.at("purchase_time").get<Timestamp>();
    l.dst_thread = p.at("dst_thread").get<std::string>();
    l.sale_post = p.at("sale_post").get<std::string>();
    l.sale_replies = p.at("sale_replies").get<std::vector<std::string>>();
    l.sale_time = p.at("sale_time").get<Timestamp>();
    t.planted.push_back(std::move(l));
  }
  return t;
}

GroundTruth GroundTruth::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open truth file: " + path);
  try {
    return from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw SchemaError("truth file " + path + ": " + e.what());
  }
}

void write_synth(const SynthCorpus& synth, const std::string& dir) {
  std::filesystem::create_directories(dir);
  export_jsonl(synth.corpus, (std::filesystem::path(dir) / "corpus.jsonl").string());
  std::ofstream out(std::filesystem::path(dir) / "truth.json", std::ios::binary);
  if (!out) throw IoError("cannot write truth file in " + dir);
  out << synth.truth.to_json().dump(1) << '\n';
}

// ---------------------------------------------------------------------------
// Scoring against ground truth

namespace {

struct PlantedKey {
  std::string middle, purchase_reply, sale_post;
  friend auto operator<=>(const PlantedKey&, const PlantedKey&) = default;
};

std::map<PlantedKey, std::size_t> planted_index(const GroundTruth& truth) {
  std::map<PlantedKey, std::size_t> out;
  for (std::size_t i = 0; i < truth.planted.size(); ++i) {
    const auto& p = truth.planted[i];
    out.emplace(PlantedKey{p.middle_user, p.purchase_reply, p.sale_post}, i);
  }
  return out;
}

}  // namespace

LinkLabels label_links_from_truth(std::span<const SupplyChainLink> links, const GroundTruth& truth) {
  const auto planted = planted_index(truth);
  LinkLabels out;
  auto true_category = [&](const PostId& id) {
    auto it = truth.labels.products.find(id);
    return it == truth.labels.products.end() ? ProductCategory::other : it->second;
  };
  auto true_reply = [&](const PostId& id) {
    auto it = truth.labels.replies.find(id);
    return it == truth.labels.replies.end() ? ReplyLabel::other : it->second;
  };
  for (const auto& l : links) {
    LinkValidationLabel label;
    if (true_category(l.purchase.sell_post) == ProductCategory::other ||
        true_category(l.sale.sell_post) == ProductCategory::other) {
      label = LinkValidationLabel::lack_of_product;
    } else if (true_reply(l.purchase.buy_reply) != ReplyLabel::buy ||
               true_reply(l.sale.buy_reply) != ReplyLabel::buy) {
      label = LinkValidationLabel::lack_of_purchase;
    } else if (planted.contains({l.middle_user, l.purchase.buy_reply, l.sale.sell_post})) {
      label = true_category(l.purchase.sell_post) == true_category(l.sale.sell_post)
                  ? LinkValidationLabel::resell
                  : LinkValidationLabel::related;
    } else {
      label = LinkValidationLabel::unrelated;
    }
    out.emplace(l.id, label);
  }
  return out;
}

PlantedRecovery planted_recovery(std::span<const SupplyChainLink> links, const GroundTruth& truth) {
  const auto planted = planted_index(truth);
  PlantedRecovery r;
  r.planted = truth.planted.size();
  r.found = links.size();
  std::set<std::size_t> hit;
  for (const auto& l : links) {
    auto it = planted.find({l.middle_user, l.purchase.buy_reply, l.sale.sell_post});
    if (it != planted.end()) {
      ++r.found_matching;
      hit.insert(it->second);
    }
  }
  r.recovered = hit.size();
  return r;
}

}  // namespace chainforge
