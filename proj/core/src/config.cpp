#include "capcorpus/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "capcorpus/model.hpp"

namespace capcorpus {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool valid_key(std::string_view key) {
  if (key.empty()) return false;
  for (char c : key) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-')) return false;
  }
  return true;
}

}  // namespace

ConfigValues parse_config(std::string_view text) {
  ConfigValues values;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;

    auto error = [&](const std::string& what) {
      return ConfigError("config line " + std::to_string(line_no) + ": " + what);
    };

    auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    if (body.front() == '[') {
      if (body.back() != ']') throw error("unterminated section header");
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw error("expected 'key = value'");
    const auto key = trim(body.substr(0, eq));
    if (!valid_key(key)) throw error("invalid key '" + std::string(key) + "'");

    auto rest = trim(body.substr(eq + 1));
    std::string value;
    if (!rest.empty() && rest.front() == '"') {
      std::size_t i = 1;
      bool closed = false;
      for (; i < rest.size(); ++i) {
        if (rest[i] == '\\' && i + 1 < rest.size()) {
          value.push_back(rest[++i]);
        } else if (rest[i] == '"') {
          closed = true;
          break;
        } else {
          value.push_back(rest[i]);
        }
      }
      if (!closed) throw error("unterminated string");
      auto tail = trim(rest.substr(i + 1));
      if (!tail.empty() && tail.front() != '#') throw error("trailing characters after string");
    } else {
      const auto hash = rest.find('#');
      value = std::string(trim(rest.substr(0, hash)));
    }
    values[std::string(key)] = std::move(value);
  }
  return values;
}

ConfigValues load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void apply_env_overrides(ConfigValues& values, const std::vector<std::string>& known) {
  for (const auto& key : known) {
    std::string name(kEnvPrefix);
    for (char c : key) name.push_back(c == '.' || c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    if (const char* v = std::getenv(name.c_str())) values[key] = v;
  }
}

}  // namespace capcorpus
