#ifndef SPECSENSE_CONFIG_HPP
#define SPECSENSE_CONFIG_HPP

#include <map>
#include <string>
#include <variant>
#include <vector>

namespace specsense {

/// Value of one config entry: boolean, number, string, or numeric array.
using ConfigValue = std::variant<bool, double, std::string, std::vector<double>>;

/// Sectioned key-value configuration, the dialect used by the CLI tools:
///
///   # comment
///   [section]
///   key = 1.5
///   flag = true
///   name = "text"
///   grid = [0.0, -2.0]
///
/// Parsing and serialization round-trip.
class Config {
 public:
  static Config parse(const std::string& text);
  static Config load(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;

  double get_double(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  long get_int(const std::string& section, const std::string& key) const;
  long get_int(const std::string& section, const std::string& key, long fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  std::string get_string(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  std::vector<double> get_array(const std::string& section, const std::string& key) const;
  std::vector<double> get_array(const std::string& section, const std::string& key,
                                std::vector<double> fallback) const;

  void set(const std::string& section, const std::string& key, ConfigValue value);

  std::string to_string() const;

  const std::map<std::string, std::map<std::string, ConfigValue>>& sections() const {
    return sections_;
  }

 private:
  const ConfigValue* find(const std::string& section, const std::string& key) const;

  std::map<std::string, std::map<std::string, ConfigValue>> sections_;
};

}  // namespace specsense

#endif  // SPECSENSE_CONFIG_HPP
