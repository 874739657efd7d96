#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "routesim/dispatch.hpp"

namespace routesim {

struct LogRecord {
    std::string external_ip;
    std::string app;
    std::string internal_ip;  // serving server
    std::uint64_t n_files_expected = 1;
    std::uint64_t n_files_received = 0;
    std::uint64_t dispatched_at = 0;

    friend bool operator==(const LogRecord&, const LogRecord&) = default;
};

using Log = std::vector<LogRecord>;

void append_log(Log& log, LogRecord record);

// Canonical text format (UTF-8, LF): "LOG FILE", a tab-separated header, one
// tab-separated row per record.
std::string serialize_log(const Log& log);

// Throws Errc::parse_error with the offending line number.
Log parse_log(std::string_view bytes);

struct ActiveEntry {
    std::string job_id;
    std::size_t log_index;  // row in the run log this entry tracks
};

struct ActiveList {
    std::vector<ActiveEntry> entries;

    bool contains(std::string_view job_id) const;
    void remove(std::string_view job_id);
};

enum class MissReason { timeout, server_crash };

struct MissingLink {
    std::string job_id;
    LogRecord record;
    MissReason reason = MissReason::timeout;
};

struct ScanResult {
    std::vector<MissingLink> missing;
    std::vector<std::string> completed;  // jobs whose entries were deleted as complete
};

// One monitoring sweep over the active list, in list order. Complete entries
// are deleted; entries past the timeout with missing files are removed and
// reported. `crashed_ips` refines the reason to server_crash.
ScanResult find_missing_links(ActiveList& active, const Log& log, std::uint64_t now,
                              std::uint64_t timeout_ticks,
                              const std::set<std::string>& crashed_ips = {});

struct ShiftOutcome {
    std::string job_id;
    ServerKey failed;                        // the (network, server) that missed
    std::optional<DispatchResult> redispatch;  // nullopt = NoCapacity for this job
};

struct ShiftContext {
    const std::map<std::string, JobRequest>& jobs;        // job_id -> original request
    std::map<std::string, ExclusionSet>& exclusions;      // per-job failed pairs, grows here
    std::map<std::string, ServerKey>& assignment;         // job_id -> currently serving pair
    std::uint64_t now = 0;
};

// Re-dispatches each missing job with its accumulated exclusion set. The
// failed server's slot is reclaimed and the server is deactivated (the sim
// heals it later). NoCapacity is reported per job, never fatal.
std::vector<ShiftOutcome> emergency_load_shift(NsMap& map,
                                               const std::vector<MissingLink>& missing,
                                               AccessFrequencyTable& table, ShiftContext ctx);

}  // namespace routesim
