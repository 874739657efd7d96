#include "routesim/failover.hpp"

#include <algorithm>
#include <charconv>

#include "routesim/error.hpp"
#include "routesim/protocol.hpp"

namespace routesim {

namespace {

constexpr std::string_view kLogTitle = "LOG FILE";
constexpr std::string_view kLogHeader =
    "External IP\tApplication\tInternal IP\tNo. of Files\tReceived\tDispatchedAt";

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& msg) {
    throw Error(Errc::parse_error, "line " + std::to_string(line_no) + ": " + msg);
}

std::uint64_t parse_u64(std::string_view text, std::size_t line_no, const char* what) {
    std::uint64_t value = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || p != text.data() + text.size() || text.empty())
        parse_fail(line_no, std::string("bad ") + what + " '" + std::string(text) + "'");
    return value;
}

bool field_ok(std::string_view text) {
    return !text.empty() && text.find_first_of(" \t\r\n\v\f") == std::string_view::npos;
}

}  // namespace

void append_log(Log& log, LogRecord record) { log.push_back(std::move(record)); }

std::string serialize_log(const Log& log) {
    std::string out;
    out.append(kLogTitle).push_back('\n');
    out.append(kLogHeader).push_back('\n');
    for (const auto& r : log) {
        out += r.external_ip;
        out.push_back('\t');
        out += r.app;
        out.push_back('\t');
        out += r.internal_ip;
        out.push_back('\t');
        out += std::to_string(r.n_files_expected);
        out.push_back('\t');
        out += std::to_string(r.n_files_received);
        out.push_back('\t');
        out += std::to_string(r.dispatched_at);
        out.push_back('\n');
    }
    return out;
}

Log parse_log(std::string_view bytes) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos < bytes.size()) {
        std::size_t nl = bytes.find('\n', pos);
        if (nl == std::string_view::npos) {
            lines.push_back(bytes.substr(pos));
            pos = bytes.size();
        } else {
            lines.push_back(bytes.substr(pos, nl - pos));
            pos = nl + 1;
        }
    }
    if (lines.empty() || lines[0] != kLogTitle) parse_fail(1, "expected 'LOG FILE' title");
    if (lines.size() < 2 || lines[1] != kLogHeader) parse_fail(2, "bad column header");

    Log log;
    for (std::size_t i = 2; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        std::string_view line = lines[i];
        if (line.empty()) parse_fail(line_no, "empty row");
        std::vector<std::string_view> cols;
        std::size_t start = 0;
        while (true) {
            std::size_t tab = line.find('\t', start);
            if (tab == std::string_view::npos) {
                cols.push_back(line.substr(start));
                break;
            }
            cols.push_back(line.substr(start, tab - start));
            start = tab + 1;
        }
        if (cols.size() != 6) parse_fail(line_no, "expected 6 tab-separated columns");
        for (int c = 0; c < 3; ++c)
            if (!field_ok(cols[c])) parse_fail(line_no, "bad field '" + std::string(cols[c]) + "'");
        LogRecord rec;
        rec.external_ip = std::string(cols[0]);
        rec.app = std::string(cols[1]);
        rec.internal_ip = std::string(cols[2]);
        rec.n_files_expected = parse_u64(cols[3], line_no, "file count");
        rec.n_files_received = parse_u64(cols[4], line_no, "received count");
        rec.dispatched_at = parse_u64(cols[5], line_no, "dispatch time");
        if (rec.n_files_received > rec.n_files_expected)
            parse_fail(line_no, "received count exceeds expected count");
        log.push_back(std::move(rec));
    }
    return log;
}

bool ActiveList::contains(std::string_view job_id) const {
    return std::any_of(entries.begin(), entries.end(),
                       [&](const ActiveEntry& e) { return e.job_id == job_id; });
}

void ActiveList::remove(std::string_view job_id) {
    std::erase_if(entries, [&](const ActiveEntry& e) { return e.job_id == job_id; });
}

ScanResult find_missing_links(ActiveList& active, const Log& log, std::uint64_t now,
                              std::uint64_t timeout_ticks,
                              const std::set<std::string>& crashed_ips) {
    ScanResult result;
    std::vector<ActiveEntry> kept;
    kept.reserve(active.entries.size());
    for (const auto& entry : active.entries) {
        const LogRecord& rec = log.at(entry.log_index);
        if (rec.n_files_received == rec.n_files_expected) {
            result.completed.push_back(entry.job_id);
            continue;  // complete: deleted from the active list
        }
        const std::uint64_t elapsed = now > rec.dispatched_at ? now - rec.dispatched_at : 0;
        if (elapsed >= timeout_ticks) {
            MissingLink link;
            link.job_id = entry.job_id;
            link.record = rec;
            link.reason = crashed_ips.contains(rec.internal_ip) ? MissReason::server_crash
                                                                : MissReason::timeout;
            result.missing.push_back(std::move(link));
            continue;  // removed pending reassignment
        }
        kept.push_back(entry);
    }
    active.entries = std::move(kept);
    return result;
}

std::vector<ShiftOutcome> emergency_load_shift(NsMap& map,
                                               const std::vector<MissingLink>& missing,
                                               AccessFrequencyTable& table, ShiftContext ctx) {
    std::vector<ShiftOutcome> outcomes;
    for (const auto& link : missing) {
        ShiftOutcome out;
        out.job_id = link.job_id;

        auto assigned = ctx.assignment.find(link.job_id);
        if (assigned != ctx.assignment.end()) {
            out.failed = assigned->second;
            // Reclaim the slot the stalled attempt still holds, then pull the
            // server out of rotation until it is healed.
            try_release_server(map, out.failed.first, out.failed.second);
            if (ServerRecord* srv = map.find_server(out.failed.first, out.failed.second))
                srv->active = false;
            ctx.exclusions[link.job_id].insert(out.failed);
            ctx.assignment.erase(assigned);
        }

        const JobRequest& req = ctx.jobs.at(link.job_id);
        out.redispatch = dispatch(map, req, table, ctx.now, ctx.exclusions[link.job_id]);
        if (out.redispatch)
            ctx.assignment[link.job_id] = {out.redispatch->decision.network,
                                           out.redispatch->decision.server};
        outcomes.push_back(std::move(out));
    }
    return outcomes;
}

}  // namespace routesim
