#include "compogen/presets.hpp"

#include "compogen/errors.hpp"

#include <utility>

namespace compogen {

namespace {

const std::pair<const char*, const char*> kPresets[] = {
#include "presets_data.inc"
};

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [name, _] : kPresets) n.emplace_back(name);
    return n;
  }();
  return names;
}

Json preset_json(const std::string& name) {
  for (const auto& [n, text] : kPresets)
    if (name == n) return Json::parse(text);
  std::string known;
  for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
  throw ConfigError("unknown preset '" + name + "' (known: " + known + ")");
}

}  // namespace compogen
