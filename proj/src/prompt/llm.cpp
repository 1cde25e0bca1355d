#include "astres/prompt/llm.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "astres/error.hpp"
#include "astres/sql/parser.hpp"
#include "astres/util/io.hpp"

namespace astres::prompt {

using nlohmann::json;

RemoteChatClient::RemoteChatClient(std::string url, ChatOptions opts)
    : url_(std::move(url)), opts_(std::move(opts)) {
  if (opts_.max_in_flight == 0)
    opts_.max_in_flight = 1;
}

std::string RemoteChatClient::generate(const std::string &prompt) const {
  json body = {{"model", opts_.model},
               {"messages", json::array({{{"role", "user"}, {"content", prompt}}})},
               {"temperature", opts_.temperature},
               {"max_tokens", opts_.max_tokens}};
  {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return in_flight_ < opts_.max_in_flight; });
    ++in_flight_;
  }
  struct Release {
    const RemoteChatClient *self;
    ~Release() {
      {
        std::lock_guard lock(self->mu_);
        --self->in_flight_;
      }
      self->cv_.notify_one();
    }
  } release{this};

  ++calls_;
  json reply = util::post_json(url_, body, opts_.http);
  try {
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception &e) {
    throw EndpointError(url_ + ": unexpected chat reply: " + e.what());
  }
}

ReplayClient::ReplayClient(std::filesystem::path cache, std::shared_ptr<const LlmClient> fallback)
    : path_(std::move(cache)), fallback_(std::move(fallback)) {
  std::ifstream in(path_);
  if (!in) {
    if (!fallback_)
      throw IoError("cannot open replay cache " + path_.string());
    return;
  }
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty())
      continue;
    try {
      auto j = json::parse(line);
      entries_[j.at("key").get<std::string>()] = j.at("response").get<std::string>();
    } catch (const json::exception &e) {
      throw IoError(path_.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

std::string ReplayClient::key(const std::string &prompt) { return util::sha256_hex(prompt); }

std::size_t ReplayClient::size() const {
  std::shared_lock lock(mu_);
  return entries_.size();
}

void ReplayClient::put(const std::string &prompt, const std::string &response) const {
  std::string k = key(prompt);
  std::unique_lock lock(mu_);
  if (!entries_.emplace(k, response).second)
    return;
  if (path_.has_parent_path())
    std::filesystem::create_directories(path_.parent_path());
  std::ofstream out(path_, std::ios::app | std::ios::binary);
  if (!out)
    throw IoError("cannot append to replay cache " + path_.string());
  out << json{{"key", k}, {"response", response}}.dump() << "\n";
}

std::string ReplayClient::generate(const std::string &prompt) const {
  {
    std::shared_lock lock(mu_);
    auto it = entries_.find(key(prompt));
    if (it != entries_.end())
      return it->second;
  }
  if (!fallback_)
    throw LookupMiss("replay cache " + path_.string() + " has no entry " + key(prompt));
  std::string response = fallback_->generate(prompt);
  put(prompt, response);
  return response;
}

namespace {

std::string strip_fences(const std::string &raw) {
  auto open = raw.find("```");
  if (open == std::string::npos)
    return raw;
  auto body = raw.find('\n', open);
  if (body == std::string::npos)
    return raw.substr(open + 3);
  auto close = raw.find("```", body);
  return raw.substr(body + 1, close == std::string::npos ? std::string::npos : close - body - 1);
}

// Text up to the first ';' outside quotes, whitespace collapsed outside
// quotes.
std::string first_statement(const std::string &s) {
  std::string out;
  char quote = 0;
  bool space = false;
  for (char c : s) {
    if (quote) {
      out += c;
      if (c == quote)
        quote = 0;
      continue;
    }
    if (c == ';')
      break;
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = !out.empty();
      continue;
    }
    if (space)
      out += ' ';
    space = false;
    if (c == '\'' || c == '"' || c == '`')
      quote = c;
    else if (c == '[')
      quote = ']';
    out += c;
  }
  return out;
}

bool parses(const std::string &s) {
  try {
    sql::parse_sql(s);
    return true;
  } catch (const Error &) {
    return false;
  }
}

bool word_at(const std::string &s, std::size_t i, std::string_view w) {
  if (i + w.size() > s.size())
    return false;
  for (std::size_t k = 0; k < w.size(); ++k)
    if (std::tolower(static_cast<unsigned char>(s[i + k])) != w[k])
      return false;
  auto boundary = [&](std::size_t p) {
    return p >= s.size() || !(std::isalnum(static_cast<unsigned char>(s[p])) || s[p] == '_');
  };
  return (i == 0 || boundary(i - 1)) && boundary(i + w.size());
}

} // namespace

std::string extract_sql(const std::string &raw) {
  std::string text = first_statement(strip_fences(raw));
  std::string best;
  for (std::size_t start = 0; start < text.size(); ++start) {
    if (!word_at(text, start, "select") && !(text[start] == '(' && start + 1 < text.size()))
      continue;
    if (start > 0 && text[start] != '(' && text[start - 1] != ' ' && text[start - 1] != '(')
      continue;
    std::string cand = text.substr(start);
    if (cand.size() <= best.size())
      break;
    for (;;) {
      if (parses(cand)) {
        if (cand.size() > best.size())
          best = cand;
        break;
      }
      auto cut = cand.rfind(' ');
      if (cut == std::string::npos || cut == 0)
        break;
      cand.resize(cut);
      if (cand.size() <= best.size())
        break;
    }
  }
  if (best.empty())
    throw ExtractionError("no parseable SQL in model response", raw);
  return best;
}

Completion complete(const LlmClient &client, const PromptBundle &bundle) {
  Completion out;
  out.raw = client.generate(bundle.text);
  out.sql = extract_sql(out.raw);
  return out;
}

} // namespace astres::prompt
