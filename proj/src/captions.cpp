#include "panostitch/captions.hpp"

#include <cctype>

#include "panostitch/error.hpp"

namespace panostitch {
namespace {

std::string collapse_whitespace(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char ch : s) {
    if (std::isspace(static_cast<unsigned char>(ch))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(ch);
  }
  return out;
}

bool remove_blocked(std::string& s, const std::vector<std::string>& blocklist) {
  bool changed = false;
  for (const auto& tag : blocklist) {
    for (auto pos = s.find(tag); pos != std::string::npos; pos = s.find(tag)) {
      s.erase(pos, tag.size());
      changed = true;
    }
  }
  return changed;
}

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Comma-separated segments, trimmed, empties dropped.
std::vector<std::string> segments(const std::string& s) {
  std::vector<std::string> out;
  std::size_t begin = 0;
  while (begin <= s.size()) {
    const auto end = std::min(s.find(',', begin), s.size());
    auto part = trim(s.substr(begin, end - begin));
    if (!part.empty()) out.push_back(std::move(part));
    begin = end + 1;
  }
  return out;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

void CaptionRule::validate() const {
  if (trim(trigger).empty()) throw ConfigError("caption trigger must be non-empty");
  if (trim(separator) != ",") throw ConfigError("caption separator must be a comma");
  for (const auto& tag : blocklist) {
    if (tag.empty()) throw ConfigError("caption blocklist entries must be non-empty");
    if (trigger.find(tag) != std::string::npos) {
      throw ConfigError("caption trigger contains blocked tag '" + tag + "'");
    }
  }
}

std::string prepare_caption(const std::string& raw, const CaptionRule& rule) {
  rule.validate();
  const std::string trigger = trim(rule.trigger);

  // Removing one tag or collapsing spaces can expose another occurrence, so
  // iterate to a fixed point.
  std::string body = raw;
  for (;;) {
    std::string next = collapse_whitespace(body);
    remove_blocked(next, rule.blocklist);
    auto parts = segments(next);
    while (!parts.empty() && parts.front() == trigger) parts.erase(parts.begin());
    next = join(parts, ", ");
    if (next == body) break;
    body = std::move(next);
  }

  if (body.empty()) return trigger;
  std::string out = trigger + rule.separator + body;
  // The separator/trigger junction must not form a blocked tag either.
  for (const auto& tag : rule.blocklist) {
    if (out.find(tag) != std::string::npos) {
      throw ConfigError("caption rule produces blocked tag '" + tag + "' at the trigger junction");
    }
  }
  return out;
}

}  // namespace panostitch
