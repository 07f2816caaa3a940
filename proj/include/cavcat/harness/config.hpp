#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace cavcat::harness {

struct Preset {
    std::string name;
    double kappa; // s^-1
    double g;     // s^-1
};

std::span<const Preset> presets();
// Throws ConfigError for an unknown name.
const Preset& find_preset(std::string_view name);

// Flat "key = value" text. Lines before the first [section] header belong to
// the unnamed section "". '#' and ';' start comments.
class ConfigFile {
public:
    static ConfigFile parse(std::string_view text, std::string_view origin = "<config>");
    static ConfigFile load(const std::string& path);

    // Section value, falling back to the unnamed section.
    std::optional<std::string> get(std::string_view section, std::string_view key) const;
    std::optional<double> get_number(std::string_view section, std::string_view key) const;

    const std::map<std::string, std::map<std::string, std::string>>& sections() const
    {
        return sections_;
    }

private:
    std::string origin_;
    std::map<std::string, std::map<std::string, std::string>> sections_;
};

} // namespace cavcat::harness
