// Flat key=value configuration with optional [section] headers. Keys are
// reported as "section.key" ("key" before any header). '#' and ';' start
// comments; surrounding whitespace is trimmed.
#pragma once

#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hbsc {

inline std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::map<std::string, std::string> parse_ini(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t cmt = line.find_first_of("#;");
        if (cmt != std::string::npos) line = line.substr(0, cmt);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw std::runtime_error("config: unterminated section at line " + std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos) throw std::runtime_error("config: missing '=' at line " + std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw std::runtime_error("config: empty key at line " + std::to_string(lineno));
        out[section.empty() ? key : section + "." + key] = trim(line.substr(eq + 1));
    }
    return out;
}

inline std::string cfg_str(const std::map<std::string, std::string>& m, const std::string& key,
                           const std::string& fallback) {
    auto it = m.find(key);
    return it == m.end() ? fallback : it->second;
}

inline long cfg_long(const std::map<std::string, std::string>& m, const std::string& key, long fallback) {
    auto it = m.find(key);
    return it == m.end() ? fallback : std::stol(it->second);
}

inline double cfg_double(const std::map<std::string, std::string>& m, const std::string& key, double fallback) {
    auto it = m.find(key);
    return it == m.end() ? fallback : std::stod(it->second);
}

inline bool cfg_bool(const std::map<std::string, std::string>& m, const std::string& key, bool fallback) {
    auto it = m.find(key);
    if (it == m.end()) return fallback;
    const std::string& v = it->second;
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw std::runtime_error("config: bad boolean for " + key + ": " + v);
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            const std::string t = trim(cur);
            if (!t.empty()) out.push_back(t);
            cur.clear();
        } else {
            cur += c;
        }
    }
    const std::string t = trim(cur);
    if (!t.empty()) out.push_back(t);
    return out;
}

}  // namespace hbsc
