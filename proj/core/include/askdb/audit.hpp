#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "askdb/clock.hpp"
#include "askdb/domain.hpp"

namespace askdb {

// One journal line. Attempt records carry the per-attempt fields and an
// empty final_status; exactly one terminal record per pipeline run carries
// final_status and attempt_number 0.
struct AuditRecord {
    std::int64_t record_id = 0;  // assigned by the store, strictly increasing
    Timestamp timestamp{};
    std::string session_id;
    std::string question_text;
    int attempt_number = 0;
    std::string sql_text;
    std::string guardrail_decision;  // "allowed" / "refused" / "" on terminal
    std::string guardrail_reason;
    std::string outcome_status;  // "" when never executed
    std::optional<double> rating_score;
    std::string final_status;  // set on terminal records only
    std::int64_t duration_ms = 0;
};

nlohmann::json audit_record_to_json(const AuditRecord& record);
AuditRecord audit_record_from_json(const nlohmann::json& doc);

struct AuditFilter {
    std::optional<std::string> session_id;
    std::optional<Timestamp> since;
    std::optional<Timestamp> until;
    std::optional<FinalStatus> final_status;
};

class AuditStore {
public:
    virtual ~AuditStore() = default;
    // Durable before returning; throws AuditError on storage failure (the
    // pipeline fails closed). Returns the assigned record id.
    virtual std::int64_t append(AuditRecord record) = 0;
    // Records matching every provided filter field, ascending record_id.
    virtual std::vector<AuditRecord> query(const AuditFilter& filter) const = 0;
};

// Line-delimited JSON journal plus an in-memory index. Existing journals are
// re-indexed on open; ids continue from the highest seen.
class JournalAuditStore final : public AuditStore {
public:
    explicit JournalAuditStore(std::string path);

    std::int64_t append(AuditRecord record) override;
    std::vector<AuditRecord> query(const AuditFilter& filter) const override;

    const std::string& path() const { return path_; }

private:
    std::string path_;
    mutable std::mutex mutex_;
    std::vector<AuditRecord> index_;
    std::int64_t next_id_ = 1;
};

class MemoryAuditStore final : public AuditStore {
public:
    std::int64_t append(AuditRecord record) override;
    std::vector<AuditRecord> query(const AuditFilter& filter) const override;

private:
    mutable std::mutex mutex_;
    std::vector<AuditRecord> records_;
    std::int64_t next_id_ = 1;
};

}  // namespace askdb
