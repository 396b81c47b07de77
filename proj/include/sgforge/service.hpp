#pragma once

// HTTP front end over the job core. Scenario documents live in
// <store>/scenarios/<id>.xml, the activity catalog in <store>/registry.xml.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace sgforge {

/// FNV-1a 64 of the stored bytes as 16 lowercase hex digits.
std::string version_token(std::string_view bytes);

/// Ids are 1..64 characters of [A-Za-z0-9_-].
bool valid_scenario_id(std::string_view id);

struct ServiceOptions {
    std::filesystem::path store = "store";
    /// Built editor assets served under "/". A placeholder page otherwise.
    std::optional<std::filesystem::path> ui_dir;
    unsigned simulation_threads = 1;
    std::size_t max_players = 100000;
    std::size_t max_steps = 10000;
};

class Service {
public:
    /// Creates the store layout and loads the registry. Throws Error when the
    /// store is not writable or the catalog is malformed.
    explicit Service(ServiceOptions options);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Blocks until stop().
    bool listen(const std::string& host, int port);
    /// Binds an ephemeral port and returns it; pair with listen_after_bind().
    int bind_to_any_port(const std::string& host);
    bool listen_after_bind();
    void wait_until_ready() const;
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace sgforge
