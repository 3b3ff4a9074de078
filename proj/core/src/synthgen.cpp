// Copyright 2026 The hetgdt Authors
// SPDX-License-Identifier: Apache-2.0

#include "hetgdt/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include "hetgdt/augment/text.hpp"
#include "hetgdt/graph_io.hpp"

namespace hetgdt::synth {

namespace {

using Rng = std::mt19937_64;

const std::vector<std::string> kGreetings = {"hey", "hello", "welcome", "hi all", "good vibes",
                                             "new here", "follow me", "stay blessed"};
const std::vector<std::string> kPromoPhrases = {
    "discreet shipping on", "dm to order", "fresh restock of", "best prices on", "your plug for",
    "same day delivery of", "menu updated with", "stealth orders of"};
const std::vector<std::string> kDrugChatter = {"nothing beats", "tried some", "who has",
                                               "looking for", "cant wait for", "deals on"};
const std::vector<std::string> kBenignDrugPhrases = {"news about", "recovery from", "research on",
                                                     "stay away from", "documentary on"};
const std::vector<std::string> kNeutralPhrases = {"fan of", "love", "talking about", "big on",
                                                  "daily posts on", "learning", "thoughts on",
                                                  "weekend plans with"};
const std::vector<std::string> kFillers = {"what a day", "break time", "long week",
                                           "good morning everyone", "cant sleep",
                                           "just finished work", "weekend mood",
                                           "thanks for the follow"};
const std::vector<std::string> kNameA = {"sunny", "lucky", "blue", "wild", "quiet", "rapid",
                                         "happy", "silver", "urban", "cosmic", "gentle", "bold"};
const std::vector<std::string> kNameB = {"fox", "river", "panda", "cloud", "rider", "owl",
                                         "chef", "coder", "wave", "garden", "pixel", "falcon"};

template <class T>
const T& pick(const std::vector<T>& v, Rng& rng) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

bool coin(double p, Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p; }

/// Poisson-like count with the given mean, at least `floor`.
int draw_count(double mean, int floor, Rng& rng) {
  if (mean <= 0.0) return floor;
  return std::max(floor, static_cast<int>(std::poisson_distribution<int>(mean)(rng)));
}

std::string keyword_id(const std::string& term) { return "k:" + term; }

struct Builder {
  const SynthConfig& cfg;
  Rng rng;
  std::set<std::string> drug;
  std::set<std::string> neutral;
  std::vector<NodeRecord> nodes;
  std::vector<EdgeRecord> edges;
  std::set<std::string> used_keywords;

  /// R4/R5/R6 edges for every pool keyword in `text`.
  void link_keywords(const std::string& id, const std::string& text, Relation plain,
                     Relation tagged) {
    const auto tags = augment::hashtags(text);
    std::set<std::string> tagset(tags.begin(), tags.end());
    std::set<std::string> seen;
    for (const auto& tok : augment::tokenize(text)) {
      if (!drug.contains(tok) && !neutral.contains(tok)) continue;
      if (!seen.insert(tok).second) continue;
      used_keywords.insert(tok);
      edges.push_back({id, keyword_id(tok), tagset.contains(tok) ? tagged : plain});
    }
  }

  std::string neutral_clause() {
    return pick(kNeutralPhrases, rng) + " " + pick(cfg.neutral_terms, rng);
  }

  std::string profile(bool participant) {
    std::string s = pick(kGreetings, rng) + "! ";
    const int extra = draw_count(cfg.profile_keywords - 1.0, 0, rng);
    if (participant) {
      const auto& d = pick(cfg.drug_terms, rng);
      if (coin(cfg.promo_rate, rng)) s += pick(kPromoPhrases, rng) + " " + d;
      else s += pick(kDrugChatter, rng) + " " + d;
      for (int i = 0; i < extra; ++i)
        s += coin(0.5, rng) ? ", " + neutral_clause() : " #" + pick(cfg.drug_terms, rng);
    } else {
      s += neutral_clause();
      for (int i = 0; i < extra; ++i) s += ", " + neutral_clause();
      if (coin(cfg.contamination, rng))
        s += ", " + pick(kBenignDrugPhrases, rng) + " " + pick(cfg.drug_terms, rng);
    }
    return s;
  }

  std::string tweet(bool participant) {
    const bool drug_post = coin(participant ? cfg.participant_signal : cfg.contamination, rng);
    std::string s;
    if (drug_post && participant) {
      s = pick(coin(0.5, rng) ? kPromoPhrases : kDrugChatter, rng) + " " + pick(cfg.drug_terms, rng);
      if (coin(cfg.tweet_hashtag_rate, rng)) s += " #" + pick(cfg.drug_terms, rng);
    } else if (drug_post) {
      s = pick(kBenignDrugPhrases, rng) + " " + pick(cfg.drug_terms, rng);
    } else {
      s = pick(kFillers, rng);
      if (coin(cfg.tweet_keyword_rate, rng)) s += ", " + neutral_clause();
      if (coin(cfg.tweet_hashtag_rate, rng)) s += " #" + pick(cfg.neutral_terms, rng);
    }
    return s;
  }

  /// Partner for `u` under the homophily acceptance rule.
  std::size_t partner(std::size_t u, const std::vector<bool>& is_p) {
    const double top = 1.0 + cfg.homophily * cfg.kappa;
    std::uniform_int_distribution<std::size_t> any(0, is_p.size() - 1);
    for (;;) {
      const std::size_t v = any(rng);
      if (v == u) continue;
      const double w = is_p[u] && is_p[v] ? top : 1.0;
      if (coin(w / top, rng)) return v;
    }
  }
};

}  // namespace

const std::vector<std::string>& default_drug_terms() {
  static const std::vector<std::string> terms = {
      "cannabis", "weed",    "kush",   "thc",      "edibles",     "oxycodone", "codeine",
      "percocet", "fentanyl", "lean",  "lsd",      "mdma",        "shrooms",   "dmt",
      "molly",    "cocaine", "coke",   "amphetamine", "meth",     "adderall",  "xanax",
      "valium",   "halcion", "benzos", "ketamine", "pills",       "dabs",      "tabs"};
  return terms;
}

const std::vector<std::string>& default_neutral_terms() {
  static const std::vector<std::string> terms = {
      "football", "basketball", "soccer", "tennis",  "golf",     "hiking",   "camping",  "fishing",
      "cooking",  "baking",     "pizza",  "tacos",   "coffee",   "tea",      "brunch",   "vegan",
      "music",    "guitar",     "piano",  "concert", "jazz",     "hiphop",   "movies",   "netflix",
      "anime",    "gaming",     "xbox",   "nintendo", "books",   "poetry",   "writing",  "history",
      "science",  "space",      "nasa",   "physics", "math",     "coding",   "python",   "startup",
      "crypto",   "stocks",     "travel", "beach",   "mountains", "paris",   "tokyo",    "london",
      "fashion",  "sneakers",   "makeup", "skincare", "fitness", "yoga",     "running",  "cycling",
      "dogs",     "cats",       "garden", "plants",  "weather",  "news",     "politics", "election",
      "family",   "kids",       "school", "college", "teacher",  "nursing",  "church",   "art",
      "painting", "photo",      "design", "cars",    "racing",   "trucks",   "diy",      "woodwork",
      "podcast",  "comedy",     "memes",  "sunset",  "birthday", "wedding",  "holiday",  "summer",
      "winter",   "rain",       "snow",   "ocean",   "nature",   "wildlife", "birds",    "horses",
      "chess",    "puzzles",    "lego",   "robots",  "drones",   "museums",  "theater",  "dance",
      "karaoke",  "bbq",        "wine",   "smoothie", "salad",   "burgers",  "sushi",    "ramen",
      "baseball", "hockey",     "boxing", "wrestling", "surfing", "skating", "climbing", "swimming"};
  return terms;
}

void SynthConfig::validate() const {
  if (n_users < 2) throw GraphError("synth: n_users must be >= 2");
  if (!(minority_fraction > 0.0 && minority_fraction < 1.0))
    throw GraphError("synth: minority_fraction must lie in (0, 1)");
  if (tweets_min < 0 || tweets_max < tweets_min) throw GraphError("synth: bad tweets per user range");
  if (drug_terms.empty()) throw GraphError("synth: drug keyword pool is empty");
  if (neutral_terms.empty()) throw GraphError("synth: neutral keyword pool is empty");
  if (homophily < 0.0 || homophily > 1.0) throw GraphError("synth: homophily must lie in [0, 1]");
  for (double v : {kappa, contamination, participant_signal, promo_rate, follows_per_user,
                   engagements_per_user, profile_keywords, tweet_keyword_rate, tweet_hashtag_rate})
    if (!(v >= 0.0) || !std::isfinite(v)) throw GraphError("synth: densities and rates must be >= 0");
  for (double v : {contamination, participant_signal, promo_rate, tweet_keyword_rate, tweet_hashtag_rate})
    if (v > 1.0) throw GraphError("synth: probabilities must be <= 1");
  const auto participants =
      static_cast<std::size_t>(std::llround(static_cast<double>(n_users) * minority_fraction));
  if (participants == 0 || participants == n_users)
    throw GraphError("synth: minority_fraction leaves a class empty");
}

nlohmann::json SynthConfig::to_json() const {
  return {{"n_users", n_users},
          {"minority_fraction", minority_fraction},
          {"tweets_min", tweets_min},
          {"tweets_max", tweets_max},
          {"drug_terms", drug_terms},
          {"neutral_terms", neutral_terms},
          {"homophily", homophily},
          {"kappa", kappa},
          {"contamination", contamination},
          {"participant_signal", participant_signal},
          {"promo_rate", promo_rate},
          {"follows_per_user", follows_per_user},
          {"engagements_per_user", engagements_per_user},
          {"profile_keywords", profile_keywords},
          {"tweet_keyword_rate", tweet_keyword_rate},
          {"tweet_hashtag_rate", tweet_hashtag_rate},
          {"seed", seed}};
}

SynthConfig SynthConfig::from_json(const nlohmann::json& j) {
  SynthConfig c;
  const auto known = c.to_json();
  for (const auto& [key, value] : j.items())
    if (!known.contains(key)) throw GraphError("synth: unknown config key '" + key + "'");
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  get("n_users", c.n_users);
  get("minority_fraction", c.minority_fraction);
  get("tweets_min", c.tweets_min);
  get("tweets_max", c.tweets_max);
  get("drug_terms", c.drug_terms);
  get("neutral_terms", c.neutral_terms);
  get("homophily", c.homophily);
  get("kappa", c.kappa);
  get("contamination", c.contamination);
  get("participant_signal", c.participant_signal);
  get("promo_rate", c.promo_rate);
  get("follows_per_user", c.follows_per_user);
  get("engagements_per_user", c.engagements_per_user);
  get("profile_keywords", c.profile_keywords);
  get("tweet_keyword_rate", c.tweet_keyword_rate);
  get("tweet_hashtag_rate", c.tweet_hashtag_rate);
  get("seed", c.seed);
  c.validate();
  return c;
}

std::string user_id(std::size_t i, std::size_t n_users) {
  const auto width = std::to_string(n_users > 0 ? n_users - 1 : 0).size();
  auto s = std::to_string(i);
  return "u" + std::string(width > s.size() ? width - s.size() : 0, '0') + s;
}

HeteroGraph generate(const SynthConfig& cfg) {
  cfg.validate();
  Builder b{cfg, Rng(cfg.seed), {}, {}, {}, {}, {}};
  b.drug.insert(cfg.drug_terms.begin(), cfg.drug_terms.end());
  b.neutral.insert(cfg.neutral_terms.begin(), cfg.neutral_terms.end());
  for (const auto& t : b.drug)
    if (b.neutral.contains(t)) throw GraphError("synth: keyword '" + t + "' is in both pools");

  const std::size_t n = cfg.n_users;
  const auto m = static_cast<std::size_t>(std::llround(static_cast<double>(n) * cfg.minority_fraction));
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), b.rng);
  std::vector<bool> is_p(n, false);
  for (std::size_t i = 0; i < m; ++i) is_p[order[i]] = true;

  std::map<std::string, Label> labels;
  std::vector<std::vector<std::string>> tweets_of(n);
  std::size_t tweet_counter = 0;
  for (std::size_t u = 0; u < n; ++u) {
    const auto id = user_id(u, n);
    const auto name = pick(kNameA, b.rng) + " " + pick(kNameB, b.rng);
    const auto handle = "@" + pick(kNameA, b.rng) + pick(kNameB, b.rng) + std::to_string(u);
    const auto profile = b.profile(is_p[u]);
    b.nodes.push_back({id, NodeType::kUser, augment::format_user_text({name, handle, profile})});
    b.link_keywords(id, profile, Relation::kR4, Relation::kR4);
    labels.emplace(id, is_p[u] ? Label::kParticipant : Label::kBenign);

    const int count = std::uniform_int_distribution<int>(cfg.tweets_min, cfg.tweets_max)(b.rng);
    for (int k = 0; k < count; ++k) {
      const auto tid = "t" + std::to_string(tweet_counter++);
      const auto text = b.tweet(is_p[u]);
      b.nodes.push_back({tid, NodeType::kTweet, text});
      b.edges.push_back({id, tid, Relation::kR2});
      b.link_keywords(tid, text, Relation::kR5, Relation::kR6);
      tweets_of[u].push_back(tid);
    }
  }

  for (std::size_t u = 0; u < n; ++u) {
    const int follows = draw_count(cfg.follows_per_user, 0, b.rng);
    for (int k = 0; k < follows; ++k)
      b.edges.push_back({user_id(u, n), user_id(b.partner(u, is_p), n), Relation::kR1});
    const int engages = draw_count(cfg.engagements_per_user, 0, b.rng);
    for (int k = 0; k < engages; ++k) {
      const auto v = b.partner(u, is_p);
      if (tweets_of[v].empty()) continue;
      b.edges.push_back({user_id(u, n), pick(tweets_of[v], b.rng), Relation::kR3});
    }
  }

  for (const auto& term : b.used_keywords) b.nodes.push_back({keyword_id(term), NodeType::kKeyword, term});
  return build_graph(std::move(b.nodes), std::move(b.edges), std::move(labels));
}

nlohmann::json GraphStats::to_json() const {
  nlohmann::json e;
  for (std::size_t r = 0; r < kNumRelations; ++r)
    e[std::string(to_string(static_cast<Relation>(r)))] = edges[r];
  return {{"node", {{"user", users}, {"tweet", tweets}, {"keyword", keywords}}},
          {"class", {{"participant", participants}, {"benign", benign}}},
          {"edge", e},
          {"cir", cir}};
}

GraphStats stats(const HeteroGraph& g) {
  GraphStats s;
  s.users = g.num_nodes(NodeType::kUser);
  s.tweets = g.num_nodes(NodeType::kTweet);
  s.keywords = g.num_nodes(NodeType::kKeyword);
  for (const auto& [id, l] : g.labels()) (l == Label::kParticipant ? s.participants : s.benign)++;
  for (std::size_t r = 0; r < kNumRelations; ++r) s.edges[r] = g.num_edges(static_cast<Relation>(r));
  if (s.participants > 0 && s.benign > 0) s.cir = cir(g, Label::kBenign, Label::kParticipant);
  return s;
}

void write_synthetic(const HeteroGraph& g, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_graph_jsonl(g, dir / "graph.jsonl");
  write_labels_csv(g, dir / "labels.csv");
  std::ofstream out(dir / "stats.json", std::ios::binary);
  if (!out) throw GraphError("cannot write " + (dir / "stats.json").string());
  out << stats(g).to_json().dump(2) << "\n";
}

}  // namespace hetgdt::synth
