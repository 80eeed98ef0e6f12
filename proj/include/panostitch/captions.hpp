#pragma once

#include <string>
#include <vector>

namespace panostitch {

struct CaptionRule {
  std::vector<std::string> blocklist{"3 6 0 picture"};
  std::string trigger = "360-degree panoramic image";
  std::string separator = ", ";

  // ConfigError on an empty trigger, a separator that is not a comma (plus
  // optional spaces), an empty blocklist entry, or a trigger
  // that itself contains a blocked tag.
  void validate() const;
};

// Drops blocked tags, collapses whitespace and empty comma segments, then
// prepends the trigger word. Idempotent: a caption that already leads with
// the trigger does not get a second one.
std::string prepare_caption(const std::string& raw, const CaptionRule& rule = {});

}  // namespace panostitch
