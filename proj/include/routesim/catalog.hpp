#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "routesim/ratio.hpp"

namespace routesim {

// Application names are plain tokens ([A-Za-z0-9_]+). Sets are ordered so
// every derived value (unions, scores, trace lines) is deterministic.
using AppSet = std::set<std::string>;

struct ServerRecord {
    std::string id;
    std::string internal_ip;
    AppSet apps;
    bool active = true;
    bool busy = false;
    std::uint64_t current_load = 0;
    std::uint64_t threshold_load = 1;
};

struct NetworkRecord {
    std::string id;
    std::string region;  // empty = no region, never matches a request
    std::vector<ServerRecord> servers;
    std::uint64_t current_load = 0;
    std::uint64_t threshold_load = 1;
};

// The network-server map: which applications live on which server of which
// network, plus per-node load state and the IP-prefix -> region table.
struct NsMap {
    std::vector<NetworkRecord> networks;
    std::vector<std::pair<std::string, std::string>> ip_regions;  // (prefix, region)

    const NetworkRecord* find_network(std::string_view id) const;
    NetworkRecord* find_network(std::string_view id);
    const ServerRecord* find_server(std::string_view net, std::string_view srv) const;
    ServerRecord* find_server(std::string_view net, std::string_view srv);
};

bool is_valid_ipv4(std::string_view text);
bool is_valid_token(std::string_view text);

// Union of the app sets over all servers of the network.
// Throws Errc::unknown_network.
AppSet network_app_set(const NsMap& map, const std::string& net);

// The server's app set verbatim. Throws Errc::unknown_network / unknown_server.
AppSet server_app_set(const NsMap& map, const std::string& net, const std::string& srv);

// |a n b| / |a u b| as an exact ratio; 0/0 is defined as 0 (both empty).
Ratio similarity_networks(const AppSet& a, const AppSet& b);
Ratio similarity_servers(const AppSet& a, const AppSet& b);

// Longest-prefix region lookup for a request IP; nullopt when nothing matches.
std::optional<std::string> region_for_ip(const NsMap& map, std::string_view ip);

// Parses and fully validates a topology document (JSON text, strict schema:
// unknown fields rejected). Throws Errc::parse_error / validation_error.
NsMap load_topology(std::string_view text);

// Re-checks every structural invariant; throws Errc::validation_error naming
// the first violation.
void validate_topology(const NsMap& map);

}  // namespace routesim
