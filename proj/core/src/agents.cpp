// SPDX-License-Identifier: Apache-2.0
#include "rankarena/agents.hpp"

#include <algorithm>
#include <sstream>

#include "rankarena/error.hpp"
#include "rankarena/providers.hpp"

namespace rankarena {
namespace {

constexpr std::string_view kQuoteChars[] = {"\"", "'", "\xE2\x80\x9C", "\xE2\x80\x9D",
                                            "\xE2\x80\x98", "\xE2\x80\x99"};

// Labels chat models echo back from the end of our prompts.
constexpr std::string_view kEchoLabels[] = {"edited document:", "the document:", "document:"};

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

bool istarts_with(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    char c = s[i];
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    if (c != prefix[i]) return false;
  }
  return true;
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  std::istringstream in{std::string(text)};
  std::string w;
  while (in >> w) words.push_back(w);
  return words;
}

std::string join(const std::vector<std::string>& words, std::size_t begin, std::size_t end) {
  std::string out;
  for (std::size_t i = begin; i < end && i < words.size(); ++i) {
    if (!out.empty()) out += ' ';
    out += words[i];
  }
  return out;
}

void validate(const PromptContext& ctx) {
  if (ctx.word_target > ctx.word_max) {
    throw ValidationError("word_target " + std::to_string(ctx.word_target) +
                          " exceeds word_max " + std::to_string(ctx.word_max));
  }
  if (ctx.word_max < 1) throw ValidationError("word_max must be positive");
  for (std::size_t i = 1; i < ctx.history.size(); ++i) {
    if (ctx.history[i].round <= ctx.history[i - 1].round) {
      throw ValidationError("prompt history is not ordered by round");
    }
  }
}

std::string own_marker(bool own) { return own ? " (your document)" : ""; }

std::string render_listwise(const PromptContext& ctx, std::size_t first) {
  std::string out;
  for (std::size_t i = first; i < ctx.history.size(); ++i) {
    const auto& h = ctx.history[i];
    if (!out.empty()) out += "\n\n";
    out += "Round " + std::to_string(h.round) + ":";
    for (std::size_t r = 0; r < h.ranking.entries.size(); ++r) {
      const auto& agent = h.ranking.entries[r].agent_id;
      out += "\n  Rank " + std::to_string(r + 1) + own_marker(agent == ctx.own_agent_id) + ": ";
      out += h.documents.at(agent);
    }
  }
  return out;
}

// Partner: the latest round's rank-1 competitor, or rank 2 if we hold rank 1.
std::string pairwise_partner(const PromptContext& ctx) {
  const auto& latest = ctx.history.back().ranking;
  if (latest.entries.size() < 2) {
    throw ValidationError("PAW prompt needs at least two ranked documents");
  }
  return latest.entries[0].agent_id == ctx.own_agent_id ? latest.entries[1].agent_id
                                                        : latest.entries[0].agent_id;
}

std::string render_pairwise(const PromptContext& ctx, std::size_t first) {
  const auto partner = pairwise_partner(ctx);
  std::string out;
  for (std::size_t i = first; i < ctx.history.size(); ++i) {
    const auto& h = ctx.history[i];
    const bool own_higher = h.ranking.rank_of(ctx.own_agent_id) < h.ranking.rank_of(partner);
    const auto& own_doc = h.documents.at(ctx.own_agent_id);
    const auto& other_doc = h.documents.at(partner);
    if (!out.empty()) out += "\n\n";
    out += "Round " + std::to_string(h.round) + ":";
    out += "\n  Ranked higher" + std::string(own_higher ? " (your document)" : "") + ": ";
    out += own_higher ? own_doc : other_doc;
    out += "\n  Ranked lower" + std::string(own_higher ? "" : " (your document)") + ": ";
    out += own_higher ? other_doc : own_doc;
  }
  return out;
}

}  // namespace

std::string_view to_string(PromptKind kind) {
  switch (kind) {
    case PromptKind::Lsw: return "lsw";
    case PromptKind::Paw: return "paw";
    case PromptKind::NoFeedback: return "nofeedback";
    case PromptKind::Init: return "init";
  }
  return "unknown";
}

PromptKind prompt_kind_from_string(std::string_view name) {
  if (name == "lsw") return PromptKind::Lsw;
  if (name == "paw") return PromptKind::Paw;
  if (name == "nofeedback") return PromptKind::NoFeedback;
  if (name == "init") return PromptKind::Init;
  throw ConfigError("unknown prompt kind '" + std::string(name) +
                    "' (expected lsw, paw, nofeedback or init)");
}

int feedback_depth(PromptKind kind) {
  switch (kind) {
    case PromptKind::Lsw: return 2;
    case PromptKind::Paw: return 3;
    default: return 0;
  }
}

int PromptContext::acting_round() const { return history.empty() ? 1 : history.back().round + 1; }

std::string PromptContext::own_document() const {
  if (current_document) return *current_document;
  if (!history.empty()) {
    const auto& docs = history.back().documents;
    if (auto it = docs.find(own_agent_id); it != docs.end()) return it->second;
  }
  throw ValidationError("no current document known for agent '" + own_agent_id + "'");
}

std::string build_prompt(const PromptContext& ctx) {
  return build_prompt(ctx, PromptTemplates::builtin());
}

std::string build_prompt(const PromptContext& ctx, const PromptTemplates& templates) {
  validate(ctx);
  std::map<std::string, std::string, std::less<>> values{
      {"query", ctx.query.text},
      {"word_target", std::to_string(ctx.word_target)},
      {"word_max", std::to_string(ctx.word_max)},
  };
  switch (ctx.kind) {
    case PromptKind::Init:
      if (!ctx.history.empty()) {
        throw ValidationError("INIT prompt takes no history; got " +
                              std::to_string(ctx.history.size()) + " round(s)");
      }
      return render_template(templates.init, values);
    case PromptKind::NoFeedback:
      values["document"] = ctx.own_document();
      return render_template(templates.nofeedback, values);
    case PromptKind::Lsw:
    case PromptKind::Paw: {
      const auto depth = static_cast<std::size_t>(feedback_depth(ctx.kind));
      if (ctx.history.empty()) {
        throw ValidationError(std::string(ctx.kind == PromptKind::Lsw ? "LSW" : "PAW") +
                              " prompt needs at least 1 past round; 0 available (full depth " +
                              std::to_string(depth) + ")");
      }
      const std::size_t first = ctx.history.size() > depth ? ctx.history.size() - depth : 0;
      values["rounds_shown"] = std::to_string(ctx.history.size() - first);
      values["document"] = ctx.own_document();
      values["history"] = ctx.kind == PromptKind::Lsw ? render_listwise(ctx, first)
                                                      : render_pairwise(ctx, first);
      return render_template(ctx.kind == PromptKind::Lsw ? templates.lsw : templates.paw,
                             values);
    }
  }
  throw ValidationError("unknown prompt kind");
}

std::string postprocess_completion(std::string_view raw) {
  std::istringstream in{std::string(raw)};
  std::string line;
  std::string kept;
  while (std::getline(in, line)) {
    const auto t = trim(line);
    if (t.rfind("```", 0) == 0) continue;
    bool labelled = false;
    std::string body = line;
    for (auto label : kEchoLabels) {
      if (istarts_with(t, label)) {
        body = trim(std::string_view(t).substr(label.size()));
        labelled = true;
        break;
      }
    }
    if (labelled && body.empty()) continue;
    if (!kept.empty()) kept += '\n';
    kept += body;
  }

  std::string text = trim(kept);
  bool changed = true;
  while (changed && !text.empty()) {
    changed = false;
    for (auto q : kQuoteChars) {
      if (text.starts_with(q)) {
        text = trim(std::string_view(text).substr(q.size()));
        changed = true;
      }
      if (text.ends_with(q)) {
        text = trim(std::string_view(text).substr(0, text.size() - q.size()));
        changed = true;
      }
    }
  }
  return text;
}

WordLimited enforce_word_limit(std::string_view text, int word_max) {
  if (word_max < 1) throw ValidationError("word_max must be positive");
  const auto prefix = first_words(text, static_cast<std::size_t>(word_max));
  if (prefix.size() == text.size()) return {std::string(text), false};
  return {trim(prefix), true};
}

AgentAction llm_agent_act(const PromptContext& ctx, ChatProvider& chat, const std::string& model,
                          double temperature, std::uint64_t sample_index,
                          const PromptTemplates& templates) {
  AgentAction action;
  action.agent_id = ctx.own_agent_id;
  action.round = ctx.acting_round();
  action.prompt = build_prompt(ctx, templates);

  ChatRequest request{model, action.prompt, temperature, sample_index};
  auto text = postprocess_completion(chat.complete(request));
  if (text.empty()) {
    if (ctx.kind == PromptKind::Init) {
      throw ProviderError("empty completion for the initial document of query '" +
                          ctx.query.id + "'");
    }
    text = ctx.own_document();
    action.kept_previous = true;
  }
  auto limited = enforce_word_limit(text, ctx.word_max);
  action.text = std::move(limited.text);
  action.truncated = limited.truncated;
  return action;
}

std::string_view to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::Noop: return "noop";
    case Strategy::CopyTop: return "copy_top";
    case Strategy::KeywordStuff: return "keyword_stuff";
    case Strategy::MimicWinnerPrefix: return "mimic_winner_prefix";
  }
  return "unknown";
}

Strategy strategy_from_string(std::string_view name) {
  if (name == "noop") return Strategy::Noop;
  if (name == "copy_top") return Strategy::CopyTop;
  if (name == "keyword_stuff") return Strategy::KeywordStuff;
  if (name == "mimic_winner_prefix") return Strategy::MimicWinnerPrefix;
  throw ConfigError("unknown scripted strategy '" + std::string(name) +
                    "' (expected noop, copy_top, keyword_stuff or mimic_winner_prefix)");
}

AgentAction scripted_agent_act(const PromptContext& ctx, Strategy strategy) {
  validate(ctx);
  AgentAction action;
  action.agent_id = ctx.own_agent_id;
  action.round = ctx.acting_round();
  const auto own = ctx.own_document();
  const auto word_max = static_cast<std::size_t>(ctx.word_max);

  std::string text;
  switch (strategy) {
    case Strategy::Noop:
      text = own;
      break;
    case Strategy::CopyTop: {
      if (ctx.history.empty()) {
        throw ValidationError("COPY_TOP needs at least one past ranking");
      }
      const auto& last = ctx.history.back();
      text = last.documents.at(last.ranking.top().agent_id);
      break;
    }
    case Strategy::KeywordStuff: {
      const auto query_words = split_words(ctx.query.text);
      auto words = split_words(own);
      if (query_words.empty()) {
        text = own;
        break;
      }
      const auto keep = word_max > query_words.size() ? word_max - query_words.size() : 0;
      if (words.size() > keep) words.resize(keep);
      for (std::size_t i = 0; words.size() < word_max; ++i) {
        words.push_back(query_words[i % query_words.size()]);
      }
      text = join(words, 0, words.size());
      break;
    }
    case Strategy::MimicWinnerPrefix: {
      if (ctx.history.empty()) {
        text = own;
        break;
      }
      const auto& last = ctx.history.back();
      const auto winner = split_words(last.documents.at(last.ranking.top().agent_id));
      const auto mine = split_words(own);
      auto head = join(winner, 0, winner.size() / 2);
      const auto tail = join(mine, mine.size() / 2, mine.size());
      if (!head.empty() && !tail.empty()) head += ' ';
      text = head + tail;
      if (text.empty()) text = own;
      break;
    }
  }
  auto limited = enforce_word_limit(text, ctx.word_max);
  action.text = std::move(limited.text);
  action.truncated = limited.truncated;
  return action;
}

}  // namespace rankarena
