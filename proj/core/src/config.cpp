#include "specsense/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace specsense {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_number(const std::string& token, int line_no) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(token, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad number '" + token + "' on line " +
                                std::to_string(line_no));
  }
  if (pos != token.size()) {
    throw std::invalid_argument("config: bad number '" + token + "' on line " +
                                std::to_string(line_no));
  }
  return v;
}

ConfigValue parse_value(const std::string& raw, int line_no) {
  const std::string token = trim(raw);
  if (token.empty()) {
    throw std::invalid_argument("config: empty value on line " + std::to_string(line_no));
  }
  if (token == "true") return true;
  if (token == "false") return false;
  if (token.front() == '"') {
    if (token.size() < 2 || token.back() != '"') {
      throw std::invalid_argument("config: unterminated string on line " + std::to_string(line_no));
    }
    return token.substr(1, token.size() - 2);
  }
  if (token.front() == '[') {
    if (token.back() != ']') {
      throw std::invalid_argument("config: unterminated array on line " + std::to_string(line_no));
    }
    std::vector<double> values;
    std::string body = token.substr(1, token.size() - 2);
    std::istringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      values.push_back(parse_number(item, line_no));
    }
    return values;
  }
  return parse_number(token, line_no);
}

std::string format_value(const ConfigValue& value) {
  std::ostringstream os;
  os.precision(17);
  if (std::holds_alternative<bool>(value)) {
    os << (std::get<bool>(value) ? "true" : "false");
  } else if (std::holds_alternative<double>(value)) {
    os << std::get<double>(value);
  } else if (std::holds_alternative<std::string>(value)) {
    os << '"' << std::get<std::string>(value) << '"';
  } else {
    os << '[';
    const auto& arr = std::get<std::vector<double>>(value);
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (i > 0) os << ", ";
      os << arr[i];
    }
    os << ']';
  }
  return os.str();
}

}  // namespace

Config Config::parse(const std::string& text) {
  Config cfg;
  std::istringstream is(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw std::invalid_argument("config: bad section header on line " + std::to_string(line_no));
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) {
        throw std::invalid_argument("config: empty section name on line " + std::to_string(line_no));
      }
      cfg.sections_[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: expected key = value on line " + std::to_string(line_no));
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) {
      throw std::invalid_argument("config: empty key on line " + std::to_string(line_no));
    }
    cfg.sections_[section][key] = parse_value(line.substr(eq + 1), line_no);
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("config: cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << is.rdbuf();
  return parse(buffer.str());
}

const ConfigValue* Config::find(const std::string& section, const std::string& key) const {
  const auto sit = sections_.find(section);
  if (sit == sections_.end()) return nullptr;
  const auto kit = sit->second.find(key);
  if (kit == sit->second.end()) return nullptr;
  return &kit->second;
}

bool Config::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

double Config::get_double(const std::string& section, const std::string& key) const {
  const ConfigValue* v = find(section, key);
  if (v == nullptr) {
    throw std::invalid_argument("config: missing [" + section + "] " + key);
  }
  if (!std::holds_alternative<double>(*v)) {
    throw std::invalid_argument("config: [" + section + "] " + key + " must be a number");
  }
  return std::get<double>(*v);
}

double Config::get_double(const std::string& section, const std::string& key,
                          double fallback) const {
  return has(section, key) ? get_double(section, key) : fallback;
}

long Config::get_int(const std::string& section, const std::string& key) const {
  const double v = get_double(section, key);
  const long i = static_cast<long>(v);
  if (static_cast<double>(i) != v) {
    throw std::invalid_argument("config: [" + section + "] " + key + " must be an integer");
  }
  return i;
}

long Config::get_int(const std::string& section, const std::string& key, long fallback) const {
  return has(section, key) ? get_int(section, key) : fallback;
}

bool Config::get_bool(const std::string& section, const std::string& key, bool fallback) const {
  const ConfigValue* v = find(section, key);
  if (v == nullptr) return fallback;
  if (!std::holds_alternative<bool>(*v)) {
    throw std::invalid_argument("config: [" + section + "] " + key + " must be a boolean");
  }
  return std::get<bool>(*v);
}

std::string Config::get_string(const std::string& section, const std::string& key) const {
  const ConfigValue* v = find(section, key);
  if (v == nullptr) {
    throw std::invalid_argument("config: missing [" + section + "] " + key);
  }
  if (!std::holds_alternative<std::string>(*v)) {
    throw std::invalid_argument("config: [" + section + "] " + key + " must be a string");
  }
  return std::get<std::string>(*v);
}

std::string Config::get_string(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
  return has(section, key) ? get_string(section, key) : fallback;
}

std::vector<double> Config::get_array(const std::string& section, const std::string& key) const {
  const ConfigValue* v = find(section, key);
  if (v == nullptr) {
    throw std::invalid_argument("config: missing [" + section + "] " + key);
  }
  if (std::holds_alternative<double>(*v)) return {std::get<double>(*v)};
  if (!std::holds_alternative<std::vector<double>>(*v)) {
    throw std::invalid_argument("config: [" + section + "] " + key + " must be an array");
  }
  return std::get<std::vector<double>>(*v);
}

std::vector<double> Config::get_array(const std::string& section, const std::string& key,
                                      std::vector<double> fallback) const {
  return has(section, key) ? get_array(section, key) : fallback;
}

void Config::set(const std::string& section, const std::string& key, ConfigValue value) {
  sections_[section][key] = std::move(value);
}

std::string Config::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [name, entries] : sections_) {
    if (!first) os << '\n';
    first = false;
    os << '[' << name << "]\n";
    for (const auto& [key, value] : entries) {
      os << key << " = " << format_value(value) << '\n';
    }
  }
  return os.str();
}

}  // namespace specsense
