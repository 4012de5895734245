#include "ssou/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ssou/errors.hpp"

namespace ssou {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& s, const std::string& what) {
    const std::string t = trim(s);
    double v = 0.0;
    const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
    if (r.ec != std::errc() || r.ptr != t.data() + t.size() || t.empty())
        throw InvalidInput(what + ": cannot parse '" + t + "' as a number");
    return v;
}

}  // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, r.ptr);
}

void write_path_csv(const std::string& file, const ObservedPath& path) {
    path.validate();
    std::ofstream out(file);
    if (!out) throw IoError("cannot open '" + file + "' for writing");
    out << "t,y\n";
    const double h = path.scheme.h();
    for (std::size_t j = 0; j < path.values.size(); ++j)
        out << format_double(static_cast<double>(j) * h) << ',' << format_double(path.values[j]) << '\n';
    if (!out) throw IoError("write to '" + file + "' failed");
}

ObservedPath read_path_csv(const std::string& file, std::optional<double> T) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot open '" + file + "'");
    std::string line;
    if (!std::getline(in, line) || trim(line) != "t,y") throw InvalidInput(file + ": expected header 't,y'");
    std::vector<double> ts, ys;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
            throw InvalidInput(file + ":" + std::to_string(lineno) + ": expected two comma-separated fields");
        const std::string where = file + ":" + std::to_string(lineno);
        ts.push_back(parse_double(line.substr(0, comma), where));
        ys.push_back(parse_double(line.substr(comma + 1), where));
        if (!std::isfinite(ys.back()) || !std::isfinite(ts.back())) throw InvalidInput(where + ": non-finite value");
    }
    if (ys.size() < 2) throw InvalidInput(file + ": need at least two observations");
    const double step = (ts.back() - ts.front()) / static_cast<double>(ts.size() - 1);
    if (!(step > 0.0)) throw InvalidInput(file + ": time stamps must increase");
    for (std::size_t j = 1; j < ts.size(); ++j)
        if (std::abs(ts[j] - ts[j - 1] - step) > 1e-6 * step)
            throw InvalidInput(file + ": time stamps are not equidistant near row " + std::to_string(j + 1));
    ObservedPath p;
    p.values = std::move(ys);
    const int n = static_cast<int>(p.values.size()) - 1;
    const double horizon = T ? *T : ts.back() - ts.front();
    p.scheme = SamplingScheme(horizon, n);
    return p;
}

KeyValueConfig KeyValueConfig::load(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot open config '" + file + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

KeyValueConfig KeyValueConfig::parse(const std::string& text) {
    KeyValueConfig c;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw InvalidInput("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw InvalidInput("config line " + std::to_string(lineno) + ": empty key");
        if (c.entries_.count(key)) throw InvalidInput("config: duplicate key '" + key + "'");
        c.entries_[key] = value;
    }
    return c;
}

bool KeyValueConfig::has(const std::string& key) const { return entries_.count(key) > 0; }

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    used_[key] = true;
    return it->second;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    return parse_double(get_string(key, ""), "config key '" + key + "'");
}

long long KeyValueConfig::get_int(const std::string& key, long long fallback) const {
    if (!has(key)) return fallback;
    const std::string s = get_string(key, "");
    long long v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size() || s.empty())
        throw InvalidInput("config key '" + key + "': cannot parse '" + s + "' as an integer");
    return v;
}

std::uint64_t KeyValueConfig::get_uint64(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const std::string s = get_string(key, "");
    std::uint64_t v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size() || s.empty())
        throw InvalidInput("config key '" + key + "': cannot parse '" + s + "' as an unsigned integer");
    return v;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string s = get_string(key, "");
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw InvalidInput("config key '" + key + "': expected a boolean, got '" + s + "'");
}

std::vector<std::string> KeyValueConfig::get_list(const std::string& key) const {
    std::vector<std::string> out;
    if (!has(key)) return out;
    std::string s = get_string(key, "");
    for (char& ch : s)
        if (ch == ',') ch = ' ';
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

std::vector<std::string> KeyValueConfig::unused_keys() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : entries_)
        if (!used_.count(k)) out.push_back(k);
    return out;
}

}  // namespace ssou
