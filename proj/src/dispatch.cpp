#include "routesim/dispatch.hpp"

#include <algorithm>
#include <stdexcept>

#include "routesim/error.hpp"
#include "routesim/hash.hpp"

namespace routesim {

std::string to_string(const SelectionDecision& d) {
    return "net=" + d.network + " srv=" + d.server + " score=" + d.score.str() +
           " tie=" + (d.tie_broken ? "1" : "0");
}

std::uint64_t seed_from_user(std::string_view user_id) { return fnv1a64(user_id); }

std::uint64_t seed_from_ip(std::string_view external_ip) {
    if (!is_valid_ipv4(external_ip))
        throw Error(Errc::malformed_ip, "'" + std::string(external_ip) + "' is not dotted-quad");
    return fnv1a64(external_ip);
}

std::uint64_t combine_seeds(std::uint64_t user_seed, std::uint64_t ip_seed) {
    return user_seed ^ rotl64(ip_seed, 32);
}

namespace {

// (frequency desc, created_at asc, job_id asc)
bool update_before(const UpdateMessage& a, const UpdateMessage& b) {
    if (a.frequency_at_send != b.frequency_at_send) return a.frequency_at_send > b.frequency_at_send;
    if (a.created_at != b.created_at) return a.created_at < b.created_at;
    return a.job_id < b.job_id;
}

std::uint64_t request_tie_seed(const JobRequest& req) {
    return combine_seeds(seed_from_user(req.user_id), seed_from_ip(req.external_ip));
}

}  // namespace

void TransmissionQueue::enqueue(UpdateMessage u) {
    auto pos = std::upper_bound(entries_.begin(), entries_.end(), u,
                                [](const UpdateMessage& a, const UpdateMessage& b) {
                                    return update_before(a, b);
                                });
    entries_.insert(pos, std::move(u));
    inserted_since_pop_ = true;
}

std::optional<UpdateMessage> TransmissionQueue::pop() {
    if (entries_.empty()) return std::nullopt;
    UpdateMessage u = entries_.front();
    entries_.erase(entries_.begin());
    if (!inserted_since_pop_ && last_popped_ && update_before(u, *last_popped_))
        throw std::logic_error("transmission queue popped out of priority order");
    last_popped_ = u;
    inserted_since_pop_ = false;
    return u;
}

std::vector<ScoredNetwork> candidate_networks(const NsMap& map, const std::string& app,
                                              const std::optional<std::string>& request_region) {
    std::vector<ScoredNetwork> out;
    const AppSet wanted{app};
    for (const auto& net : map.networks) {
        AppSet apps;
        for (const auto& srv : net.servers) apps.insert(srv.apps.begin(), srv.apps.end());
        if (!apps.contains(app)) continue;
        ScoredNetwork cand;
        cand.id = net.id;
        cand.score = similarity_networks(wanted, apps);
        cand.region_match =
            request_region.has_value() && !net.region.empty() && net.region == *request_region;
        out.push_back(std::move(cand));
    }
    std::sort(out.begin(), out.end(), [](const ScoredNetwork& a, const ScoredNetwork& b) {
        if (a.region_match != b.region_match) return a.region_match;
        if (a.score != b.score) return a.score > b.score;
        return a.id < b.id;
    });
    return out;
}

std::vector<ScoredNetwork> ranked_networks(const NsMap& map, const JobRequest& req) {
    auto candidates = candidate_networks(map, req.app, region_for_ip(map, req.external_ip));
    std::vector<ScoredNetwork> admissible;
    for (auto& cand : candidates) {
        const NetworkRecord* net = map.find_network(cand.id);
        if (net->current_load >= net->threshold_load) continue;  // saturated, skipped
        admissible.push_back(std::move(cand));
    }
    const std::uint64_t seed = request_tie_seed(req);
    std::vector<ScoredNetwork> out;
    std::size_t i = 0;
    while (i < admissible.size()) {
        std::size_t j = i;
        while (j < admissible.size() && admissible[j].region_match == admissible[i].region_match &&
               admissible[j].score == admissible[i].score)
            ++j;
        const std::size_t group = j - i;
        const std::size_t start = static_cast<std::size_t>(seed % group);
        for (std::size_t k = 0; k < group; ++k) out.push_back(admissible[i + (start + k) % group]);
        i = j;
    }
    return out;
}

std::optional<NetworkChoice> select_network(const NsMap& map, const JobRequest& req) {
    auto ranked = ranked_networks(map, req);
    if (ranked.empty()) return std::nullopt;
    // tie_broken reflects the size of the head's tie group
    std::size_t ties = 0;
    for (const auto& cand : ranked)
        if (cand.region_match == ranked.front().region_match && cand.score == ranked.front().score)
            ++ties;
    return NetworkChoice{ranked.front().id, ranked.front().score, ties > 1};
}

std::optional<ServerChoice> select_server(const NsMap& map, const std::string& net,
                                          const JobRequest& req, const ExclusionSet& excluded) {
    const NetworkRecord* network = map.find_network(net);
    if (!network) throw Error(Errc::unknown_network, "no network '" + net + "'");
    struct Scored {
        const ServerRecord* srv;
        Ratio score;
    };
    std::vector<Scored> candidates;
    const AppSet wanted{req.app};
    for (const auto& srv : network->servers) {
        if (!srv.apps.contains(req.app)) continue;
        if (!srv.active || srv.busy) continue;
        if (srv.current_load >= srv.threshold_load) continue;
        if (excluded.contains({net, srv.id})) continue;
        candidates.push_back({&srv, similarity_servers(wanted, srv.apps)});
    }
    if (candidates.empty()) return std::nullopt;
    std::sort(candidates.begin(), candidates.end(), [](const Scored& a, const Scored& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.srv->id < b.srv->id;
    });
    std::size_t ties = 1;
    while (ties < candidates.size() && candidates[ties].score == candidates.front().score) ++ties;
    const std::size_t pick = static_cast<std::size_t>(request_tie_seed(req) % ties);
    return ServerChoice{candidates[pick].srv->id, candidates[pick].score, ties > 1};
}

void record_access(AccessFrequencyTable& table, const std::string& app) {
    ++table.counts[app];
    ++table.total;
}

Ratio access_frequency(const AccessFrequencyTable& table, const std::string& app) {
    if (table.total == 0) throw Error(Errc::empty_table, "no accesses recorded");
    auto it = table.counts.find(app);
    if (it == table.counts.end()) return Ratio{0, 1};
    return Ratio::reduced(it->second, table.total);
}

void ReplicaState::apply(const UpdateMessage& u) {
    auto it = updates.find(u.job_id);
    if (it == updates.end()) {
        updates.emplace(u.job_id, u);
        ++app_counts[u.app];
        ++total;
        return;
    }
    if (it->second == u) return;  // replay, nothing to do
    // Later attempt for the same job wins; the app never changes, so the
    // folded counts stay put.
    if (u.created_at > it->second.created_at ||
        (u.created_at == it->second.created_at &&
         std::tie(u.serving_network, u.serving_server) >
             std::tie(it->second.serving_network, it->second.serving_server)))
        it->second = u;
}

std::set<std::string> propagate_intra(const NsMap& map, const std::string& net,
                                      const UpdateMessage& u, ReplicaStore& replicas) {
    const NetworkRecord* network = map.find_network(net);
    if (!network) throw Error(Errc::unknown_network, "no network '" + net + "'");
    std::set<std::string> reached;
    for (const auto& srv : network->servers) {
        replicas[{net, srv.id}].apply(u);
        reached.insert(srv.id);
    }
    return reached;
}

std::set<std::string> propagate_inter(const NsMap& map, const std::string& origin,
                                      const UpdateMessage& u, ReplicaStore& replicas) {
    const AppSet origin_apps = network_app_set(map, origin);
    std::set<std::string> reached;
    for (const auto& net : map.networks) {
        if (net.id == origin) continue;
        AppSet apps;
        for (const auto& srv : net.servers) apps.insert(srv.apps.begin(), srv.apps.end());
        if (similarity_networks(origin_apps, apps).num == 0) continue;
        propagate_intra(map, net.id, u, replicas);
        reached.insert(net.id);
    }
    return reached;
}

std::optional<DispatchResult> dispatch(NsMap& map, const JobRequest& req,
                                       AccessFrequencyTable& table, std::uint64_t now,
                                       const ExclusionSet& excluded) {
    for (const auto& cand : ranked_networks(map, req)) {
        auto server = select_server(map, cand.id, req, excluded);
        if (!server) continue;  // no free server, fall back to the next network

        NetworkRecord* net = map.find_network(cand.id);
        ServerRecord* srv = map.find_server(cand.id, server->server);
        srv->busy = true;
        ++srv->current_load;
        ++net->current_load;

        record_access(table, req.app);

        DispatchResult result;
        result.decision = SelectionDecision{cand.id, server->server, server->score,
                                            server->tie_broken};
        result.update = UpdateMessage{req.job_id,      req.app,        req.external_ip,
                                      cand.id,         server->server, now,
                                      access_frequency(table, req.app)};
        return result;
    }
    return std::nullopt;
}

}  // namespace routesim
