#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "routesim/catalog.hpp"
#include "routesim/ratio.hpp"

namespace routesim {

struct JobRequest {
    std::string job_id;
    std::string user_id;
    std::string external_ip;
    std::string app;
    std::string payload;
    std::uint64_t n_files = 1;
    std::uint64_t arrival_time = 0;
};

struct SelectionDecision {
    std::string network;
    std::string server;
    Ratio score;  // server-level similarity of {app} to the chosen catalog
    bool tie_broken = false;
};

std::string to_string(const SelectionDecision& d);

struct AccessFrequencyTable {
    std::map<std::string, std::uint64_t> counts;
    std::uint64_t total = 0;
};

struct UpdateMessage {
    std::string job_id;
    std::string app;
    std::string external_ip;
    std::string serving_network;
    std::string serving_server;
    std::uint64_t created_at = 0;
    Ratio frequency_at_send;

    friend bool operator==(const UpdateMessage&, const UpdateMessage&) = default;
};

// Pending update transmissions, kept sorted by (frequency desc, created_at
// asc, job_id asc). pop() enforces the ordering invariant: a pop that ranks
// above the previous one without an intervening enqueue aborts the run.
class TransmissionQueue {
public:
    void enqueue(UpdateMessage u);
    std::optional<UpdateMessage> pop();
    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }
    const std::vector<UpdateMessage>& entries() const { return entries_; }

private:
    std::vector<UpdateMessage> entries_;
    std::optional<UpdateMessage> last_popped_;
    bool inserted_since_pop_ = false;
};

// FNV-1a over the user id; one half of the tie-break key.
std::uint64_t seed_from_user(std::string_view user_id);

// FNV-1a over the dotted-quad text. Throws Errc::malformed_ip.
std::uint64_t seed_from_ip(std::string_view external_ip);

std::uint64_t combine_seeds(std::uint64_t user_seed, std::uint64_t ip_seed);

struct ScoredNetwork {
    std::string id;
    Ratio score;
    bool region_match = false;
};

// Networks hosting `app`, scored as similarity({app}, network catalog) and
// ordered by (region match desc, score desc, id asc). Non-hosts are excluded.
std::vector<ScoredNetwork> candidate_networks(const NsMap& map, const std::string& app,
                                              const std::optional<std::string>& request_region = std::nullopt);

struct NetworkChoice {
    std::string network;
    Ratio score;
    bool tie_broken = false;
};

// Admissible candidates (hosts under network threshold) in full fall-back
// order: tie groups in candidate order, each rotated by seed mod group size.
std::vector<ScoredNetwork> ranked_networks(const NsMap& map, const JobRequest& req);

// First admissible network per the ranked order; nullopt = NoCapacity.
std::optional<NetworkChoice> select_network(const NsMap& map, const JobRequest& req);

using ServerKey = std::pair<std::string, std::string>;  // (network id, server id)
using ExclusionSet = std::set<ServerKey>;

struct ServerChoice {
    std::string server;
    Ratio score;
    bool tie_broken = false;
};

// Active, free, under-threshold hosts of req.app in `net`, ranked by
// (similarity desc, id asc); exact ties resolved by seed index.
// nullopt = NoFreeServer. Throws Errc::unknown_network.
std::optional<ServerChoice> select_server(const NsMap& map, const std::string& net,
                                          const JobRequest& req,
                                          const ExclusionSet& excluded = {});

void record_access(AccessFrequencyTable& table, const std::string& app);

// counts[app] / total; 0 for an unseen app. Throws Errc::empty_table.
Ratio access_frequency(const AccessFrequencyTable& table, const std::string& app);

// Per-server stigmergy state: the updates a server has seen (keyed by job,
// last writer wins on created_at) and the access counts folded from them.
struct ReplicaState {
    std::map<std::string, UpdateMessage> updates;
    std::map<std::string, std::uint64_t> app_counts;
    std::uint64_t total = 0;

    void apply(const UpdateMessage& u);

    friend bool operator==(const ReplicaState&, const ReplicaState&) = default;
};

using ReplicaStore = std::map<ServerKey, ReplicaState>;

// Delivers `u` to every server of `net` (origin included); returns the
// server ids reached. Replays are idempotent by job_id.
std::set<std::string> propagate_intra(const NsMap& map, const std::string& net,
                                      const UpdateMessage& u, ReplicaStore& replicas);

// Delivers `u` intra-network to every network related to `origin`
// (similarity > 0); returns the related network ids, origin excluded.
std::set<std::string> propagate_inter(const NsMap& map, const std::string& origin,
                                      const UpdateMessage& u, ReplicaStore& replicas);

struct DispatchResult {
    SelectionDecision decision;
    UpdateMessage update;
};

// Full selection composition: pick a network, pick a server (falling back to
// the next ranked network when none is free), mark it busy, bump loads,
// record access, and emit the update message stamped with `now`.
// nullopt = NoCapacity.
std::optional<DispatchResult> dispatch(NsMap& map, const JobRequest& req,
                                       AccessFrequencyTable& table, std::uint64_t now,
                                       const ExclusionSet& excluded = {});

}  // namespace routesim
