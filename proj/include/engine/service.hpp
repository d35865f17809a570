#pragma once

#include <atomic>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "engine/core.hpp"
#include "engine/replay.hpp"
#include "engine/strategies.hpp"

namespace httplib {
class Server;
}

namespace engine {

EngineConfig load_engine_config(const std::string& path);
EngineConfig parse_engine_config(const std::string& json_text);

// HTTP front end: experiment-arm routing, slate ids for click attribution
// and the per-experiment outcome logs.
class Service {
public:
    Service(Engine& engine, const Clock& clock);

    // wires all routes onto the given server
    void attach(httplib::Server& server);

    // direct entry points (also used by tests without a socket)
    struct ServedSlate {
        std::string slate_id;
        std::string experiment_id;
        std::string arm;  // "A", "B" or "-" when unassigned
        Slate slate;
    };
    ServedSlate serve(const SlateRequest& req);
    bool record_outcome_clicks(const std::string& slate_id,
                               const std::vector<std::string>& clicked_items);
    std::vector<OutcomeRecord> outcomes(const std::string& experiment_id) const;
    ExperimentReport experiment_report(const std::string& experiment_id) const;

    void dump_outcomes(const std::string& experiment_id, std::ostream& out) const;

private:
    const ExperimentConfig* experiment_for(Surface surface) const;

    Engine& engine_;
    const Clock& clock_;
    mutable std::mutex mutex_;
    std::atomic<std::uint64_t> next_slate_id_{1};
    std::unordered_map<std::string, std::vector<OutcomeRecord>> outcomes_;
    // slate_id -> (experiment_id, index into that experiment's outcome log)
    std::unordered_map<std::string, std::pair<std::string, std::size_t>> slate_locator_;
};

}  // namespace engine
