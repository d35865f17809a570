#include "engine/jsonl.hpp"

#include <istream>

#include <json.hpp>

namespace engine::jsonl {

using nlohmann::json;

namespace {

json parse_object(const std::string& line, std::size_t line_no) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw ParseError(line_no, "not a JSON object");
    }
    return j;
}

EmbeddingVector to_vector(const json& j, std::size_t line_no) {
    if (!j.is_array()) throw ParseError(line_no, "vector must be an array of numbers");
    EmbeddingVector v;
    v.reserve(j.size());
    for (const auto& e : j) {
        if (!e.is_number()) throw ParseError(line_no, "vector entries must be numbers");
        v.push_back(e.get<double>());
    }
    return v;
}

template <typename T>
T require(const json& j, const char* key, std::size_t line_no) {
    auto it = j.find(key);
    if (it == j.end()) throw ParseError(line_no, std::string("missing field: ") + key);
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw ParseError(line_no, std::string("bad type for field: ") + key);
    }
}

}  // namespace

JobRecord parse_job(const std::string& line, std::size_t line_no) {
    const json j = parse_object(line, line_no);
    JobRecord rec;
    rec.job.job_id = require<std::string>(j, "job_id", line_no);
    rec.job.title = j.value("title", "");
    rec.job.description = j.value("description", "");
    rec.job.active = j.value("active", true);
    rec.job.created_at = j.value("created_at", static_cast<UnixSeconds>(0));
    if (j.contains("embedding")) rec.embedding = to_vector(j["embedding"], line_no);
    return rec;
}

EmbeddingRecord parse_embedding(const std::string& line, std::size_t line_no) {
    const json j = parse_object(line, line_no);
    EmbeddingRecord rec;
    rec.job_id = require<std::string>(j, "job_id", line_no);
    auto it = j.find("vector");
    if (it == j.end()) throw ParseError(line_no, "missing field: vector");
    rec.vector = to_vector(*it, line_no);
    return rec;
}

Interaction parse_interaction(const std::string& line, std::size_t line_no) {
    const json j = parse_object(line, line_no);
    Interaction e;
    e.user_id = require<std::string>(j, "user_id", line_no);
    e.job_id = require<std::string>(j, "job_id", line_no);
    e.session_id = j.value("session_id", "");
    e.timestamp = require<UnixSeconds>(j, "timestamp", line_no);
    const auto kind = parse_interaction_kind(j.value("kind", "view"));
    if (!kind) throw ParseError(line_no, "unknown interaction kind");
    e.kind = *kind;
    return e;
}

OutcomeRecord parse_outcome(const std::string& line, std::size_t line_no) {
    const json j = parse_object(line, line_no);
    OutcomeRecord r;
    r.experiment_id = require<std::string>(j, "experiment_id", line_no);
    const std::string arm = require<std::string>(j, "arm", line_no);
    if (arm != "A" && arm != "B") throw ParseError(line_no, "arm must be A or B");
    r.arm = arm == "A" ? Arm::A : Arm::B;
    r.user_id = require<std::string>(j, "user_id", line_no);
    r.items = require<std::vector<std::string>>(j, "items", line_no);
    r.served_at = require<UnixSeconds>(j, "served_at", line_no);
    r.latency_ms = require<double>(j, "latency_ms", line_no);
    r.clicked_items = j.value("clicked_items", std::vector<std::string>{});
    return r;
}

std::string dump_job(const JobRecord& record) {
    json j{{"job_id", record.job.job_id},
           {"title", record.job.title},
           {"description", record.job.description},
           {"active", record.job.active},
           {"created_at", record.job.created_at}};
    if (record.embedding) j["embedding"] = *record.embedding;
    return j.dump();
}

std::string dump_embedding(const EmbeddingRecord& record) {
    return json{{"job_id", record.job_id}, {"vector", record.vector}}.dump();
}

std::string dump_interaction(const Interaction& interaction) {
    return json{{"user_id", interaction.user_id},
                {"job_id", interaction.job_id},
                {"session_id", interaction.session_id},
                {"timestamp", interaction.timestamp},
                {"kind", interaction_kind_name(interaction.kind)}}
        .dump();
}

std::string dump_outcome(const OutcomeRecord& record) {
    return json{{"experiment_id", record.experiment_id},
                {"arm", arm_name(record.arm)},
                {"user_id", record.user_id},
                {"items", record.items},
                {"served_at", record.served_at},
                {"latency_ms", record.latency_ms},
                {"clicked_items", record.clicked_items}}
        .dump();
}

std::size_t for_each_line(std::istream& in,
                          const std::function<void(const std::string&, std::size_t)>& fn) {
    std::string line;
    std::size_t line_no = 0;
    std::size_t consumed = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        fn(line, line_no);
        ++consumed;
    }
    return consumed;
}

}  // namespace engine::jsonl
