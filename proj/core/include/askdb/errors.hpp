#pragma once

#include <stdexcept>
#include <string>

namespace askdb {

// Base for all engine-level failures. Query-level problems (bad SQL, empty
// results, execution errors) are values, not exceptions; these types cover
// infrastructure that the correction loop must not retry.
class EngineError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Datasource cannot be reached or opened. Distinct from a query error: the
// pipeline aborts instead of regenerating SQL.
class DatasourceUnavailable : public EngineError {
public:
    using EngineError::EngineError;
};

// The LLM provider is unreachable after transport retries are exhausted.
class ProviderUnavailable : public EngineError {
public:
    using EngineError::EngineError;
};

// A scripted scenario was asked for a role it did not expect, or ran past
// its last step. Always a test-authoring error.
class ScenarioViolation : public EngineError {
public:
    using EngineError::EngineError;
};

// Audit storage failed. Auditing is mandatory, so the pipeline fails closed.
class AuditError : public EngineError {
public:
    using EngineError::EngineError;
};

class ConfigError : public EngineError {
public:
    using EngineError::EngineError;
};

// A caller violated a documented precondition (e.g. correction prompt with
// empty history).
class PreconditionViolation : public EngineError {
public:
    using EngineError::EngineError;
};

}  // namespace askdb
