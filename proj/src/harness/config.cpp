#include "cavcat/harness/config.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include "cavcat/errors.hpp"

namespace cavcat::harness {

namespace {

const std::array<Preset, 2> kPresets{{
    {"benson97", 8.33, 36000.0},
    {"brune96", 2500.0, 24000.0},
}};

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

} // namespace

std::span<const Preset> presets()
{
    return kPresets;
}

const Preset& find_preset(std::string_view name)
{
    for (const auto& p : kPresets)
        if (p.name == name)
            return p;
    std::string known;
    for (const auto& p : kPresets)
        known += (known.empty() ? "" : ", ") + p.name;
    throw ConfigError("unknown preset '" + std::string(name) + "' (known: " + known + ")");
}

ConfigFile ConfigFile::parse(std::string_view text, std::string_view origin)
{
    ConfigFile file;
    file.origin_ = origin;
    std::string section;
    file.sections_[section];
    int line_no = 0;
    std::istringstream in{std::string(text)};
    for (std::string raw; std::getline(in, raw);) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find_first_of("#;"); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto where = [&] { return std::string(origin) + ":" + std::to_string(line_no) + ": "; };
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(where() + "unterminated section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (section.empty())
                throw ConfigError(where() + "empty section name");
            file.sections_[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(where() + "expected 'key = value'");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError(where() + "missing key");
        file.sections_[section][std::string(key)] = std::string(value);
    }
    return file;
}

ConfigFile ConfigFile::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse(text.str(), path);
}

std::optional<std::string> ConfigFile::get(std::string_view section, std::string_view key) const
{
    for (const std::string_view s : {section, std::string_view{}}) {
        const auto sec = sections_.find(std::string(s));
        if (sec == sections_.end())
            continue;
        const auto it = sec->second.find(std::string(key));
        if (it != sec->second.end())
            return it->second;
    }
    return std::nullopt;
}

std::optional<double> ConfigFile::get_number(std::string_view section, std::string_view key) const
{
    const auto text = get(section, key);
    if (!text)
        return std::nullopt;
    double value = 0.0;
    const char* end = text->data() + text->size();
    const auto [ptr, ec] = std::from_chars(text->data(), end, value);
    if (ec != std::errc() || ptr != end)
        throw ConfigError(origin_ + ": '" + std::string(key) + "' is not a number: '" + *text + "'");
    return value;
}

} // namespace cavcat::harness
