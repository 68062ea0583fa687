#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <sstream>

#include "error.hpp"

namespace aoi {

namespace {

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

[[noreturn]] void parse_error(int line, const std::string& msg) {
    fail(ErrorCode::parse, "config line " + std::to_string(line) + ": " + msg);
}

template <class T>
T parse_number(const std::string& s, int line, const char* what) {
    T v{};
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end) parse_error(line, std::string("bad ") + what + " '" + s + "'");
    return v;
}

std::vector<std::string> split_tokens(std::string s) {
    for (auto& c : s)
        if (c == '(' || c == ')' || c == ',' || c == ';') c = ' ';
    std::istringstream in(s);
    std::vector<std::string> out;
    for (std::string tok; in >> tok;) out.push_back(tok);
    return out;
}

ClientParams parse_pair(const std::string& body, int line) {
    const auto toks = split_tokens(body);
    if (toks.size() != 2) parse_error(line, "expected (lambda, p), got '" + trim(body) + "'");
    const double l = parse_number<double>(toks[0], line, "lambda");
    const double p = parse_number<double>(toks[1], line, "p");
    try {
        return ClientParams(l, p);
    } catch (const Error& e) {
        parse_error(line, e.what());
    }
}

void parse_client_line(const std::string& raw, int line, std::vector<ClientParams>& out) {
    std::string s = raw;
    // "×" (UTF-8) and "*" are accepted as the group separator alongside "x"
    for (std::size_t pos; (pos = s.find("\xc3\x97")) != std::string::npos;) s.replace(pos, 2, "x");
    std::replace(s.begin(), s.end(), '*', 'x');
    const auto open = s.find('(');
    const auto sep = s.find_first_of("xX");
    if (sep != std::string::npos && (open == std::string::npos || sep < open)) {
        const auto count_str = trim(s.substr(0, sep));
        const auto count = parse_number<long long>(count_str, line, "client count");
        if (count < 1) parse_error(line, "client count must be positive");
        const auto params = parse_pair(s.substr(sep + 1), line);
        out.insert(out.end(), static_cast<std::size_t>(count), params);
        return;
    }
    out.push_back(parse_pair(s, line));
}

}  // namespace

std::vector<SimConfig> parse_config(std::string_view text) {
    SimConfig base;
    bool warmup_set = false;
    std::vector<PolicyKind> kinds;
    std::string section;
    std::istringstream in{std::string(text)};
    int line_no = 0;
    for (std::string raw; std::getline(in, raw);) {
        ++line_no;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
        const auto line = trim(raw);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') parse_error(line_no, "unterminated section header");
            section = lower(trim(line.substr(1, line.size() - 2)));
            if (section != "experiment" && section != "policy" && section != "clients")
                parse_error(line_no, "unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (section == "clients" && eq == std::string::npos) {
            parse_client_line(line, line_no, base.clients);
            continue;
        }
        if (eq == std::string::npos) parse_error(line_no, "expected key = value");
        const auto key = lower(trim(line.substr(0, eq)));
        const auto value = trim(line.substr(eq + 1));
        if (value.empty()) parse_error(line_no, "missing value for '" + key + "'");

        if (section == "clients" && (key == "client" || key == "group")) {
            parse_client_line(value, line_no, base.clients);
        } else if (key == "policy" || key == "policies" || (key == "name" && section == "policy")) {
            for (const auto& tok : split_tokens(value)) {
                try {
                    kinds.push_back(parse_policy_kind(tok));
                } catch (const Error& e) {
                    parse_error(line_no, e.what());
                }
            }
        } else if (key == "name" || key == "experiment") {
            base.experiment = value;
        } else if (key == "horizon") {
            base.horizon = parse_number<std::uint64_t>(value, line_no, "horizon");
        } else if (key == "warmup") {
            base.warmup = parse_number<std::uint64_t>(value, line_no, "warmup");
            warmup_set = true;
        } else if (key == "seed") {
            base.seed = parse_number<std::uint64_t>(value, line_no, "seed");
        } else if (key == "replications") {
            base.replications = parse_number<std::uint32_t>(value, line_no, "replications");
        } else if (key == "tie") {
            const auto v = lower(value);
            if (v == "lowest" || v == "lowest-index")
                base.policy.tie = TieRule::lowest_index;
            else if (v == "random" || v == "uniform-random")
                base.policy.tie = TieRule::uniform_random;
            else
                parse_error(line_no, "tie must be 'lowest' or 'random'");
        } else if (key == "age_cap" || key == "age-cap") {
            base.policy.age_cap = parse_number<std::int64_t>(value, line_no, "age_cap");
        } else {
            parse_error(line_no, "unknown key '" + key + "'");
        }
    }
    if (base.clients.empty()) fail(ErrorCode::parse, "config defines no clients");
    if (kinds.empty()) kinds.push_back(PolicyKind::approx_index);
    if (!warmup_set) base.warmup = default_warmup(base.horizon);
    try {
        base.validate();
    } catch (const Error& e) {
        fail(ErrorCode::parse, std::string("invalid config: ") + e.what());
    }

    std::vector<SimConfig> out;
    for (auto k : kinds) {
        SimConfig c = base;
        c.policy.kind = k;
        c.validate();
        out.push_back(std::move(c));
    }
    return out;
}

std::string client_profile(const std::vector<ClientParams>& clients) {
    std::string out;
    char buf[64];
    for (std::size_t i = 0; i < clients.size();) {
        std::size_t j = i;
        while (j < clients.size() && clients[j] == clients[i]) ++j;
        std::snprintf(buf, sizeof buf, "%zux(%.9g;%.9g)", j - i, clients[i].lambda(), clients[i].p());
        if (!out.empty()) out += '+';
        out += buf;
        i = j;
    }
    return out;
}

}  // namespace aoi
