#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace gibbsium {

// Flat key-value config with one [section] per experiment. Lines are
// "key = value"; '#' starts a comment; section order is preserved.
struct ConfigFile {
    struct Section {
        std::string name;
        std::map<std::string, std::string> kv;
    };
    std::vector<Section> sections;
    std::string raw;  // original text, hashed for the CSV metadata line
};

inline std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline ConfigFile parse_config_text(const std::string& text) {
    ConfigFile cf;
    cf.raw = text;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        size_t hash = t.find('#');
        if (hash != std::string::npos) t = trim(t.substr(0, hash));
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw std::runtime_error("config line " + std::to_string(lineno) + ": unterminated section header");
            cf.sections.push_back({trim(t.substr(1, t.size() - 2)), {}});
            continue;
        }
        size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(lineno) + ": expected key = value");
        if (cf.sections.empty())
            throw std::runtime_error("config line " + std::to_string(lineno) + ": key outside any [section]");
        std::string k = trim(t.substr(0, eq)), v = trim(t.substr(eq + 1));
        if (k.empty()) throw std::runtime_error("config line " + std::to_string(lineno) + ": empty key");
        cf.sections.back().kv[k] = v;
    }
    return cf;
}

inline ConfigFile parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

// Typed accessors over one section; each records missing/invalid keys so
// validate can report every problem at once.
struct Params {
    const std::map<std::string, std::string>* kv;
    std::vector<std::string>* errors;

    bool has(const std::string& k) const { return kv->count(k) != 0; }

    std::string get_str(const std::string& k, const std::string& dflt) const {
        auto it = kv->find(k);
        return it == kv->end() ? dflt : it->second;
    }

    std::string require_str(const std::string& k) const {
        auto it = kv->find(k);
        if (it == kv->end()) {
            errors->push_back("missing required key '" + k + "'");
            return "";
        }
        return it->second;
    }

    double parse_double(const std::string& k, const std::string& v) const {
        try {
            size_t pos = 0;
            double d = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument("trailing");
            return d;
        } catch (...) {
            errors->push_back("key '" + k + "': not a number: '" + v + "'");
            return 0.0;
        }
    }

    double get_double(const std::string& k, double dflt) const {
        auto it = kv->find(k);
        return it == kv->end() ? dflt : parse_double(k, it->second);
    }

    long long get_int(const std::string& k, long long dflt) const {
        auto it = kv->find(k);
        if (it == kv->end()) return dflt;
        try {
            size_t pos = 0;
            long long i = std::stoll(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("trailing");
            return i;
        } catch (...) {
            errors->push_back("key '" + k + "': not an integer: '" + it->second + "'");
            return dflt;
        }
    }

    std::vector<int> get_int_list(const std::string& k, std::vector<int> dflt) const {
        auto it = kv->find(k);
        if (it == kv->end()) return dflt;
        std::vector<int> out;
        std::istringstream ss(it->second);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            tok = trim(tok);
            if (tok.empty()) continue;
            try {
                out.push_back(std::stoi(tok));
            } catch (...) {
                errors->push_back("key '" + k + "': not an integer list: '" + it->second + "'");
                return dflt;
            }
        }
        return out;
    }

    std::vector<double> get_double_list(const std::string& k, std::vector<double> dflt) const {
        auto it = kv->find(k);
        if (it == kv->end()) return dflt;
        std::vector<double> out;
        std::istringstream ss(it->second);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            tok = trim(tok);
            if (tok.empty()) continue;
            try {
                out.push_back(std::stod(tok));
            } catch (...) {
                errors->push_back("key '" + k + "': not a number list: '" + it->second + "'");
                return dflt;
            }
        }
        return out;
    }

    void check_range(const std::string& k, double v, double lo, double hi, bool lo_open = false,
                     bool hi_open = false) const {
        bool bad = lo_open ? v <= lo : v < lo;
        if (!bad) bad = hi_open ? v >= hi : v > hi;
        if (bad) {
            std::ostringstream ss;
            ss << "key '" << k << "': value " << v << " outside range " << (lo_open ? "(" : "[") << lo
               << ", " << hi << (hi_open ? ")" : "]");
            errors->push_back(ss.str());
        }
    }
};

// FNV-1a over the raw config text plus the effective seed; recorded in every
// CSV so identical reruns are recognizable.
inline uint64_t config_hash(const std::string& raw, uint64_t seed) {
    uint64_t h = 1469598103934665603ULL;
    auto eat = [&](uint64_t x) {
        for (int i = 0; i < 8; ++i) {
            h ^= (x >> (8 * i)) & 0xff;
            h *= 1099511628211ULL;
        }
    };
    for (unsigned char c : raw) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    eat(seed);
    return h;
}

}  // namespace gibbsium
