#pragma once

#include <stdexcept>
#include <string>

namespace routesim {

enum class Errc {
    parse_error,
    validation_error,
    unknown_network,
    unknown_server,
    malformed_ip,
    empty_table,
    frame_error,
    truncated_frame,
    length_mismatch,
    executor_failure,
    not_busy,
    io_error,
    config_error,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& msg)
        : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}

    Errc code() const { return code_; }

private:
    Errc code_;
};

}  // namespace routesim
