#include "askdb/audit.hpp"

#include <fstream>

#include "askdb/errors.hpp"

namespace askdb {

namespace {

bool matches(const AuditRecord& record, const AuditFilter& filter) {
    if (filter.session_id && record.session_id != *filter.session_id) return false;
    if (filter.since && record.timestamp < *filter.since) return false;
    if (filter.until && record.timestamp > *filter.until) return false;
    if (filter.final_status &&
        record.final_status != to_string(*filter.final_status)) {
        return false;
    }
    return true;
}

}  // namespace

nlohmann::json audit_record_to_json(const AuditRecord& record) {
    nlohmann::json doc;
    doc["record_id"] = record.record_id;
    doc["timestamp"] = format_iso8601(record.timestamp);
    doc["session_id"] = record.session_id;
    doc["question_text"] = record.question_text;
    doc["attempt_number"] = record.attempt_number;
    doc["sql_text"] = record.sql_text;
    doc["guardrail_decision"] = record.guardrail_decision;
    doc["guardrail_reason"] = record.guardrail_reason;
    doc["outcome_status"] = record.outcome_status;
    if (record.rating_score) {
        doc["rating_score"] = *record.rating_score;
    } else {
        doc["rating_score"] = nullptr;
    }
    doc["final_status"] = record.final_status;
    doc["duration_ms"] = record.duration_ms;
    return doc;
}

AuditRecord audit_record_from_json(const nlohmann::json& doc) {
    AuditRecord record;
    record.record_id = doc.at("record_id").get<std::int64_t>();
    const auto ts = parse_timestamp(doc.at("timestamp").get<std::string>());
    if (ts) record.timestamp = *ts;
    record.session_id = doc.at("session_id").get<std::string>();
    record.question_text = doc.at("question_text").get<std::string>();
    record.attempt_number = doc.at("attempt_number").get<int>();
    record.sql_text = doc.at("sql_text").get<std::string>();
    record.guardrail_decision = doc.at("guardrail_decision").get<std::string>();
    record.guardrail_reason = doc.at("guardrail_reason").get<std::string>();
    record.outcome_status = doc.at("outcome_status").get<std::string>();
    if (!doc.at("rating_score").is_null()) {
        record.rating_score = doc.at("rating_score").get<double>();
    }
    record.final_status = doc.at("final_status").get<std::string>();
    record.duration_ms = doc.at("duration_ms").get<std::int64_t>();
    return record;
}

JournalAuditStore::JournalAuditStore(std::string path) : path_(std::move(path)) {
    std::ifstream in(path_);
    if (!in) return;  // fresh journal
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            AuditRecord record = audit_record_from_json(nlohmann::json::parse(line));
            if (record.record_id < next_id_) {
                throw AuditError("journal " + path_ + " is not append-only: id " +
                                 std::to_string(record.record_id) + " out of order at line " +
                                 std::to_string(line_no));
            }
            next_id_ = record.record_id + 1;
            index_.push_back(std::move(record));
        } catch (const nlohmann::json::exception& e) {
            throw AuditError("journal " + path_ + " line " + std::to_string(line_no) +
                             " is unreadable: " + e.what());
        }
    }
}

std::int64_t JournalAuditStore::append(AuditRecord record) {
    std::lock_guard<std::mutex> lock(mutex_);
    record.record_id = next_id_;
    const std::string line = audit_record_to_json(record).dump();

    std::ofstream out(path_, std::ios::app);
    if (!out) {
        throw AuditError("cannot open audit journal " + path_);
    }
    out << line << "\n";
    out.flush();
    if (!out) {
        throw AuditError("write to audit journal " + path_ + " failed");
    }
    ++next_id_;
    index_.push_back(std::move(record));
    return index_.back().record_id;
}

std::vector<AuditRecord> JournalAuditStore::query(const AuditFilter& filter) const {
    std::lock_guard<std::mutex> lock(mutex_);
    std::vector<AuditRecord> out;
    for (const AuditRecord& record : index_) {
        if (matches(record, filter)) out.push_back(record);
    }
    return out;
}

std::int64_t MemoryAuditStore::append(AuditRecord record) {
    std::lock_guard<std::mutex> lock(mutex_);
    record.record_id = next_id_++;
    records_.push_back(std::move(record));
    return records_.back().record_id;
}

std::vector<AuditRecord> MemoryAuditStore::query(const AuditFilter& filter) const {
    std::lock_guard<std::mutex> lock(mutex_);
    std::vector<AuditRecord> out;
    for (const AuditRecord& record : records_) {
        if (matches(record, filter)) out.push_back(record);
    }
    return out;
}

}  // namespace askdb
