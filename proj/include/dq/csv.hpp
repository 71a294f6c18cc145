#pragma once

#include <filesystem>
#include <vector>

#include "dq/value.hpp"

namespace dq {

/// Loads one CSV file per declared relation from `dir` (file name =
/// relation name + ".csv", header row = attribute names in signature order).
/// Duplicate rows collapse; a missing file raises MissingRelation.
Instance load_facts(const std::filesystem::path& dir, const std::vector<RelationSignature>& schema);

/// Same, but relations without a file load as empty (partial data).
Instance load_facts_partial(const std::filesystem::path& dir,
                            const std::vector<RelationSignature>& schema);

Relation load_relation_csv(const std::filesystem::path& file, const RelationSignature& sig);

void write_relation_csv(const std::filesystem::path& file, const Relation& rel);
void write_instance_csv(const std::filesystem::path& dir, const Instance& instance);

}  // namespace dq
