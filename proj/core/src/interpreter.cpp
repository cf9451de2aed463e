#include "askdb/interpreter.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "askdb/clock.hpp"
#include "askdb/errors.hpp"

namespace askdb {

namespace {

bool numeric_value(const Value& v, double& out) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) {
        out = static_cast<double>(*i);
        return true;
    }
    if (const auto* d = std::get_if<double>(&v)) {
        out = *d;
        return true;
    }
    return false;
}

// Column index of the first all-numeric column (ignoring nulls), or -1.
int first_numeric_column(const ExecutionOutcome& outcome, int exclude = -1) {
    const std::size_t columns = outcome.column_names.size();
    for (std::size_t c = 0; c < columns; ++c) {
        if (static_cast<int>(c) == exclude) continue;
        bool any = false;
        bool all = true;
        for (const Row& row : outcome.rows) {
            if (c >= row.size() || value_is_null(row[c])) continue;
            double unused;
            if (numeric_value(row[c], unused)) {
                any = true;
            } else {
                all = false;
                break;
            }
        }
        if (any && all) return static_cast<int>(c);
    }
    return -1;
}

int first_time_column(const ExecutionOutcome& outcome) {
    const std::size_t columns = outcome.column_names.size();
    for (std::size_t c = 0; c < columns; ++c) {
        bool any = false;
        bool all = true;
        for (const Row& row : outcome.rows) {
            if (c >= row.size() || value_is_null(row[c])) continue;
            const auto* text = std::get_if<std::string>(&row[c]);
            if (text != nullptr && parse_timestamp(*text)) {
                any = true;
            } else {
                all = false;
                break;
            }
        }
        if (any && all) return static_cast<int>(c);
    }
    return -1;
}

// Digit-run tokens ("12", "3.5") from arbitrary text.
std::vector<std::string> numeric_tokens(const std::string& text) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        if (std::isdigit(static_cast<unsigned char>(text[i]))) {
            std::size_t j = i;
            bool dot = false;
            while (j < text.size() &&
                   (std::isdigit(static_cast<unsigned char>(text[j])) ||
                    (!dot && text[j] == '.' && j + 1 < text.size() &&
                     std::isdigit(static_cast<unsigned char>(text[j + 1]))))) {
                if (text[j] == '.') dot = true;
                ++j;
            }
            tokens.push_back(text.substr(i, j - i));
            i = j;
        } else {
            ++i;
        }
    }
    return tokens;
}

}  // namespace

std::string_view to_string(KeyValueExtract::Trend trend) {
    switch (trend) {
        case KeyValueExtract::Trend::rising: return "rising";
        case KeyValueExtract::Trend::falling: return "falling";
        case KeyValueExtract::Trend::flat: return "flat";
    }
    return "flat";
}

std::string KeyValueExtract::summary_text() const {
    std::string out = "total_rows=" + std::to_string(total_rows);
    if (extrema) {
        const auto& [column, lo, hi] = *extrema;
        out += "; " + column + " min=" + value_to_string(Value(lo)) +
               " max=" + value_to_string(Value(hi));
    }
    if (!leading_row_summary.empty()) {
        out += "; top row: " + leading_row_summary;
    }
    if (trend) {
        out += "; trend=" + std::string(to_string(*trend));
    }
    return out;
}

std::vector<std::pair<std::string, std::string>> KeyValueExtract::as_key_values() const {
    std::vector<std::pair<std::string, std::string>> out;
    out.emplace_back("total_rows", std::to_string(total_rows));
    if (extrema) {
        const auto& [column, lo, hi] = *extrema;
        out.emplace_back("min " + column, value_to_string(Value(lo)));
        out.emplace_back("max " + column, value_to_string(Value(hi)));
    }
    if (trend) {
        out.emplace_back("trend", std::string(to_string(*trend)));
    }
    return out;
}

KeyValueExtract extract_key_values(const ExecutionOutcome& outcome) {
    if (outcome.status != OutcomeStatus::rows && outcome.status != OutcomeStatus::truncated) {
        throw PreconditionViolation("extract_key_values requires a result with rows");
    }
    KeyValueExtract extract;
    extract.total_rows = static_cast<std::int64_t>(outcome.rows.size());

    const int numeric_col = first_numeric_column(outcome);
    if (numeric_col >= 0) {
        double lo = 0.0;
        double hi = 0.0;
        bool seen = false;
        for (const Row& row : outcome.rows) {
            double v;
            if (static_cast<std::size_t>(numeric_col) < row.size() &&
                numeric_value(row[static_cast<std::size_t>(numeric_col)], v)) {
                lo = seen ? std::min(lo, v) : v;
                hi = seen ? std::max(hi, v) : v;
                seen = true;
            }
        }
        if (seen) {
            extract.extrema = {outcome.column_names[static_cast<std::size_t>(numeric_col)], lo,
                               hi};
        }
    }

    if (!outcome.rows.empty()) {
        const Row& first = outcome.rows.front();
        const std::size_t max_cols = std::min<std::size_t>(first.size(), 8);
        for (std::size_t c = 0; c < max_cols; ++c) {
            if (c > 0) extract.leading_row_summary += ", ";
            extract.leading_row_summary +=
                outcome.column_names[c] + "=" + value_to_string(first[c]);
        }
    }

    const int time_col = first_time_column(outcome);
    const int value_col = first_numeric_column(outcome, time_col);
    if (time_col >= 0 && value_col >= 0 && outcome.rows.size() >= 3) {
        std::vector<std::pair<double, double>> points;
        for (const Row& row : outcome.rows) {
            const auto* text = std::get_if<std::string>(&row[static_cast<std::size_t>(time_col)]);
            double v;
            if (text == nullptr ||
                !numeric_value(row[static_cast<std::size_t>(value_col)], v)) {
                continue;
            }
            const auto ts = parse_timestamp(*text);
            if (!ts) continue;
            points.emplace_back(static_cast<double>(ts->time_since_epoch().count()), v);
        }
        if (points.size() >= 3) {
            double mean_t = 0.0;
            double mean_v = 0.0;
            for (const auto& [t, v] : points) {
                mean_t += t;
                mean_v += v;
            }
            mean_t /= static_cast<double>(points.size());
            mean_v /= static_cast<double>(points.size());
            double cov = 0.0;
            double var = 0.0;
            double vmin = points[0].second;
            double vmax = points[0].second;
            for (const auto& [t, v] : points) {
                cov += (t - mean_t) * (v - mean_v);
                var += (t - mean_t) * (t - mean_t);
                vmin = std::min(vmin, v);
                vmax = std::max(vmax, v);
            }
            const double slope = var > 0.0 ? cov / var : 0.0;
            const double epsilon = 1e-9 * (vmax - vmin);
            if (std::fabs(slope) <= epsilon || slope == 0.0) {
                extract.trend = KeyValueExtract::Trend::flat;
            } else {
                extract.trend = slope > 0.0 ? KeyValueExtract::Trend::rising
                                            : KeyValueExtract::Trend::falling;
            }
        }
    }
    return extract;
}

std::string fallback_narrative(const ExecutionOutcome& outcome) {
    std::string out = "Query returned " + std::to_string(outcome.rows.size()) + " row" +
                      (outcome.rows.size() == 1 ? "" : "s");
    if (!outcome.rows.empty()) {
        out += "; top row: ";
        const Row& first = outcome.rows.front();
        const std::size_t max_cols = std::min<std::size_t>(first.size(), 8);
        for (std::size_t c = 0; c < max_cols; ++c) {
            if (c > 0) out += ", ";
            out += outcome.column_names[c] + "=" + value_to_string(first[c]);
        }
    }
    out += ".";
    return out;
}

std::vector<std::string> narrative_numbers_missing_from_data(
    const std::string& narrative, const ExecutionOutcome& outcome,
    const KeyValueExtract& extract) {
    std::set<std::string> data_tokens;
    std::vector<double> data_values;
    auto add_text = [&](const std::string& text) {
        for (const std::string& tok : numeric_tokens(text)) {
            data_tokens.insert(tok);
            try {
                data_values.push_back(std::stod(tok));
            } catch (const std::exception&) {
            }
        }
    };
    for (const Row& row : outcome.rows) {
        for (const Value& v : row) {
            add_text(value_to_string(v));
            double d;
            if (numeric_value(v, d)) data_values.push_back(d);
        }
    }
    add_text(std::to_string(extract.total_rows));
    data_values.push_back(static_cast<double>(extract.total_rows));
    data_values.push_back(static_cast<double>(outcome.rows.size()));
    add_text(std::to_string(outcome.rows.size()));
    if (extract.extrema) {
        const auto& [column, lo, hi] = *extract.extrema;
        add_text(value_to_string(Value(lo)));
        add_text(value_to_string(Value(hi)));
        data_values.push_back(lo);
        data_values.push_back(hi);
    }

    std::vector<std::string> missing;
    for (const std::string& tok : numeric_tokens(narrative)) {
        if (data_tokens.count(tok) > 0) continue;
        bool matched = false;
        try {
            const double v = std::stod(tok);
            for (double d : data_values) {
                const double scale = std::max({std::fabs(v), std::fabs(d), 1.0});
                if (std::fabs(v - d) <= 1e-9 * scale) {
                    matched = true;
                    break;
                }
            }
        } catch (const std::exception&) {
        }
        if (!matched) missing.push_back(tok);
    }
    return missing;
}

NarrativeResult narrate(const Question& question, const KeyValueExtract& extract,
                        const ExecutionOutcome& outcome, Provider& provider,
                        std::string_view verbosity) {
    NarrativeResult result;

    AttemptTrace synthetic;
    synthetic.candidate.sql_text = "";
    synthetic.guardrail_verdict = GuardrailVerdict::allow({});
    synthetic.outcome = outcome;
    std::vector<AttemptTrace> history;
    history.push_back(std::move(synthetic));

    ProviderRequest request;
    request.role = PromptRole::interpret_result;
    request.rendered_prompt = render_prompt(PromptRole::interpret_result, question, "",
                                            history, extract.summary_text(), verbosity);
    try {
        const ProviderResponse response = provider.complete(request);
        std::string text = response.text;
        // Trim whitespace.
        while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) {
            text.pop_back();
        }
        std::size_t start = 0;
        while (start < text.size() && std::isspace(static_cast<unsigned char>(text[start]))) {
            ++start;
        }
        text = text.substr(start);
        if (!text.empty() &&
            narrative_numbers_missing_from_data(text, outcome, extract).empty()) {
            result.text = std::move(text);
            return result;
        }
    } catch (const ProviderUnavailable&) {
        // fall through to the template
    } catch (const ScenarioViolation&) {
        throw;  // test-authoring error, never masked
    }
    result.text = fallback_narrative(outcome);
    result.fallback_used = true;
    return result;
}

}  // namespace askdb
