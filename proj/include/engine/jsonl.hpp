#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

#include "engine/core.hpp"
#include "engine/experiment.hpp"

namespace engine::jsonl {

struct JobRecord {
    JobPosting job;
    std::optional<EmbeddingVector> embedding;
};

struct EmbeddingRecord {
    std::string job_id;
    EmbeddingVector vector;
};

// Thrown with the 1-based line number on malformed input.
struct ParseError : std::runtime_error {
    ParseError(std::size_t line, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ": " + message), line(line) {}
    std::size_t line;
};

JobRecord parse_job(const std::string& line, std::size_t line_no = 0);
EmbeddingRecord parse_embedding(const std::string& line, std::size_t line_no = 0);
Interaction parse_interaction(const std::string& line, std::size_t line_no = 0);
OutcomeRecord parse_outcome(const std::string& line, std::size_t line_no = 0);

std::string dump_job(const JobRecord& record);
std::string dump_embedding(const EmbeddingRecord& record);
std::string dump_interaction(const Interaction& interaction);
std::string dump_outcome(const OutcomeRecord& record);

// Applies fn to each non-empty line; rethrows parse failures as ParseError
// with the offending line number. Returns the number of lines consumed.
std::size_t for_each_line(std::istream& in,
                          const std::function<void(const std::string&, std::size_t)>& fn);

}  // namespace engine::jsonl
