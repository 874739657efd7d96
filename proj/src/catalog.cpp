#include "routesim/catalog.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include "json.hpp"
#include "routesim/error.hpp"

namespace routesim {

const char* errc_name(Errc code) {
    switch (code) {
        case Errc::parse_error: return "ParseError";
        case Errc::validation_error: return "ValidationError";
        case Errc::unknown_network: return "UnknownNetwork";
        case Errc::unknown_server: return "UnknownServer";
        case Errc::malformed_ip: return "MalformedIp";
        case Errc::empty_table: return "EmptyTable";
        case Errc::frame_error: return "FrameError";
        case Errc::truncated_frame: return "TruncatedFrame";
        case Errc::length_mismatch: return "LengthMismatch";
        case Errc::executor_failure: return "ExecutorFailure";
        case Errc::not_busy: return "NotBusy";
        case Errc::io_error: return "IoError";
        case Errc::config_error: return "ConfigError";
    }
    return "Error";
}

const NetworkRecord* NsMap::find_network(std::string_view id) const {
    for (const auto& n : networks)
        if (n.id == id) return &n;
    return nullptr;
}

NetworkRecord* NsMap::find_network(std::string_view id) {
    for (auto& n : networks)
        if (n.id == id) return &n;
    return nullptr;
}

const ServerRecord* NsMap::find_server(std::string_view net, std::string_view srv) const {
    const NetworkRecord* n = find_network(net);
    if (!n) return nullptr;
    for (const auto& s : n->servers)
        if (s.id == srv) return &s;
    return nullptr;
}

ServerRecord* NsMap::find_server(std::string_view net, std::string_view srv) {
    NetworkRecord* n = find_network(net);
    if (!n) return nullptr;
    for (auto& s : n->servers)
        if (s.id == srv) return &s;
    return nullptr;
}

bool is_valid_ipv4(std::string_view text) {
    int octets = 0;
    std::size_t i = 0;
    while (i <= text.size()) {
        std::size_t start = i;
        while (i < text.size() && text[i] != '.') ++i;
        std::string_view part = text.substr(start, i - start);
        if (part.empty() || part.size() > 3) return false;
        unsigned value = 0;
        auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
        if (ec != std::errc() || p != part.data() + part.size() || value > 255) return false;
        ++octets;
        if (i == text.size()) break;
        ++i;  // skip '.'
        if (i == text.size()) return false;  // trailing dot
    }
    return octets == 4;
}

bool is_valid_token(std::string_view text) {
    if (text.empty()) return false;
    for (char c : text) {
        const bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
                        (c >= '0' && c <= '9') || c == '_';
        if (!ok) return false;
    }
    return true;
}

AppSet network_app_set(const NsMap& map, const std::string& net) {
    const NetworkRecord* n = map.find_network(net);
    if (!n) throw Error(Errc::unknown_network, "no network '" + net + "'");
    AppSet out;
    for (const auto& s : n->servers) out.insert(s.apps.begin(), s.apps.end());
    return out;
}

AppSet server_app_set(const NsMap& map, const std::string& net, const std::string& srv) {
    const NetworkRecord* n = map.find_network(net);
    if (!n) throw Error(Errc::unknown_network, "no network '" + net + "'");
    for (const auto& s : n->servers)
        if (s.id == srv) return s.apps;
    throw Error(Errc::unknown_server, "no server '" + srv + "' in network '" + net + "'");
}

namespace {

Ratio jaccard(const AppSet& a, const AppSet& b) {
    if (a.empty() && b.empty()) return Ratio{0, 1};
    std::size_t inter = 0;
    auto it = a.begin();
    auto jt = b.begin();
    while (it != a.end() && jt != b.end()) {
        if (*it < *jt) ++it;
        else if (*jt < *it) ++jt;
        else { ++inter; ++it; ++jt; }
    }
    const std::size_t uni = a.size() + b.size() - inter;
    return Ratio::reduced(inter, uni);
}

}  // namespace

Ratio similarity_networks(const AppSet& a, const AppSet& b) { return jaccard(a, b); }
Ratio similarity_servers(const AppSet& a, const AppSet& b) { return jaccard(a, b); }

std::optional<std::string> region_for_ip(const NsMap& map, std::string_view ip) {
    const std::pair<std::string, std::string>* best = nullptr;
    for (const auto& entry : map.ip_regions) {
        if (ip.substr(0, entry.first.size()) != entry.first) continue;
        if (!best || entry.first.size() > best->first.size()) best = &entry;
    }
    if (!best) return std::nullopt;
    return best->second;
}

namespace {

using nlohmann::json;

[[noreturn]] void parse_fail(const std::string& msg) { throw Error(Errc::parse_error, msg); }

void reject_unknown_fields(const json& obj, const std::set<std::string>& allowed,
                           const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (!allowed.contains(key)) parse_fail("unknown field '" + key + "' in " + where);
    }
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) parse_fail(std::string("missing field '") + key + "' in " + where);
    if (!obj[key].is_string()) parse_fail(std::string("field '") + key + "' in " + where + " must be a string");
    return obj[key].get<std::string>();
}

std::uint64_t require_uint(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) parse_fail(std::string("missing field '") + key + "' in " + where);
    const json& v = obj[key];
    if (!v.is_number_unsigned()) parse_fail(std::string("field '") + key + "' in " + where + " must be a non-negative integer");
    return v.get<std::uint64_t>();
}

}  // namespace

NsMap load_topology(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        parse_fail(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) parse_fail("topology document must be a JSON object");
    reject_unknown_fields(doc, {"networks", "ip_regions"}, "topology document");
    if (!doc.contains("networks") || !doc["networks"].is_array())
        parse_fail("topology document needs a 'networks' array");

    NsMap map;
    for (const json& jn : doc["networks"]) {
        if (!jn.is_object()) parse_fail("network entries must be objects");
        reject_unknown_fields(jn, {"id", "region", "threshold_load", "servers"}, "network");
        NetworkRecord net;
        net.id = require_string(jn, "id", "network");
        if (jn.contains("region")) {
            if (!jn["region"].is_string()) parse_fail("network 'region' must be a string");
            net.region = jn["region"].get<std::string>();
        }
        net.threshold_load = require_uint(jn, "threshold_load", "network '" + net.id + "'");
        if (!jn.contains("servers") || !jn["servers"].is_array())
            parse_fail("network '" + net.id + "' needs a 'servers' array");
        for (const json& js : jn["servers"]) {
            if (!js.is_object()) parse_fail("server entries must be objects");
            reject_unknown_fields(js, {"id", "internal_ip", "threshold_load", "apps"}, "server");
            ServerRecord srv;
            srv.id = require_string(js, "id", "server");
            srv.internal_ip = require_string(js, "internal_ip", "server '" + srv.id + "'");
            srv.threshold_load = require_uint(js, "threshold_load", "server '" + srv.id + "'");
            if (!js.contains("apps") || !js["apps"].is_array())
                parse_fail("server '" + srv.id + "' needs an 'apps' array");
            for (const json& ja : js["apps"]) {
                if (!ja.is_string()) parse_fail("apps must be strings");
                srv.apps.insert(ja.get<std::string>());
            }
            net.servers.push_back(std::move(srv));
        }
        map.networks.push_back(std::move(net));
    }
    if (doc.contains("ip_regions")) {
        if (!doc["ip_regions"].is_object()) parse_fail("'ip_regions' must be an object");
        for (const auto& [prefix, region] : doc["ip_regions"].items()) {
            if (!region.is_string()) parse_fail("region values must be strings");
            map.ip_regions.emplace_back(prefix, region.get<std::string>());
        }
    }
    validate_topology(map);
    return map;
}

namespace {

[[noreturn]] void invalid(const std::string& msg) { throw Error(Errc::validation_error, msg); }

}  // namespace

void validate_topology(const NsMap& map) {
    std::set<std::string> net_ids;
    std::set<std::string> internal_ips;
    for (const auto& net : map.networks) {
        if (!is_valid_token(net.id)) invalid("network id '" + net.id + "' is not a token");
        if (!net_ids.insert(net.id).second) invalid("duplicate network id '" + net.id + "'");
        if (net.threshold_load == 0) invalid("network '" + net.id + "' has threshold_load 0");
        std::set<std::string> srv_ids;
        std::uint64_t load_sum = 0;
        for (const auto& srv : net.servers) {
            if (!is_valid_token(srv.id)) invalid("server id '" + srv.id + "' is not a token");
            if (!srv_ids.insert(srv.id).second)
                invalid("duplicate server id '" + srv.id + "' in network '" + net.id + "'");
            if (!is_valid_ipv4(srv.internal_ip))
                invalid("server '" + srv.id + "' has malformed internal_ip '" + srv.internal_ip + "'");
            if (!internal_ips.insert(srv.internal_ip).second)
                invalid("duplicate internal_ip '" + srv.internal_ip + "'");
            if (srv.threshold_load == 0) invalid("server '" + srv.id + "' has threshold_load 0");
            if (srv.current_load > srv.threshold_load)
                invalid("server '" + srv.id + "' is over its threshold_load");
            if (srv.busy && srv.current_load == 0)
                invalid("server '" + srv.id + "' is busy with current_load 0");
            for (const auto& app : srv.apps)
                if (!is_valid_token(app)) invalid("application name '" + app + "' is not a token");
            load_sum += srv.current_load;
        }
        if (net.current_load != load_sum)
            invalid("network '" + net.id + "' current_load does not equal the sum over its servers");
    }
    for (const auto& [prefix, region] : map.ip_regions) {
        if (prefix.empty()) invalid("empty ip_regions prefix");
        if (prefix.find_first_of(" \t\r\n") != std::string::npos)
            invalid("ip_regions prefix '" + prefix + "' contains whitespace");
        if (!is_valid_token(region)) invalid("region '" + region + "' is not a token");
    }
}

}  // namespace routesim
