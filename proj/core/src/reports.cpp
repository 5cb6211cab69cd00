// Copyright (C) 2026 creascore authors
// SPDX-License-Identifier: Apache-2.0

#include "creascore/reports.hpp"

#include <fstream>
#include <unordered_map>

#include "json.hpp"

#include "creascore/errors.hpp"
#include "creascore/jsonfmt.hpp"

namespace creascore {

namespace {

std::string quoted(const std::string& s) { return "\"" + json_escape(s) + "\""; }

std::string number_array(const std::vector<double>& values) {
    std::string out = "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        out += format_double(values[i]);
    }
    out += ']';
    return out;
}

std::string optional_number(const std::optional<double>& v) {
    return v ? format_double(*v) : "null";
}

std::string bimodality_json(const std::optional<BimodalityResult>& b) {
    if (!b) return "null";
    return "{\"coefficient\":" + format_double(b->coefficient) +
           ",\"threshold\":" + format_double(b->threshold) +
           ",\"flagged\":" + (b->flagged ? "true" : "false") +
           ",\"n\":" + std::to_string(b->n) + "}";
}

std::string split_json(const std::optional<ClusterSplit>& s) {
    if (!s) return "null";
    return "{\"lower_n\":" + std::to_string(s->lower.size()) +
           ",\"upper_n\":" + std::to_string(s->upper.size()) +
           ",\"boundary_gap\":" + format_double(s->boundary_gap) + ",\"centroids\":[" +
           format_double(s->centroids.first) + "," + format_double(s->centroids.second) + "]}";
}

std::string notes_json(const std::vector<std::string>& notes) {
    std::string out = "[";
    for (std::size_t i = 0; i < notes.size(); ++i) {
        if (i) out += ',';
        out += quoted(notes[i]);
    }
    out += ']';
    return out;
}

}  // namespace

std::string granularity_name(Granularity g) {
    return g == Granularity::Element ? "element" : "subelement";
}

std::string aggregation_name(Aggregation a) { return a == Aggregation::Mean ? "mean" : "max"; }

Granularity granularity_from_name(const std::string& name) {
    if (name == "element") return Granularity::Element;
    if (name == "subelement") return Granularity::Subelement;
    throw SchemaError("granularity must be 'element' or 'subelement', got '" + name + "'");
}

Aggregation aggregation_from_name(const std::string& name) {
    if (name == "mean") return Aggregation::Mean;
    if (name == "max") return Aggregation::Max;
    throw SchemaError("subscore_aggregation must be 'mean' or 'max', got '" + name + "'");
}

std::string to_jsonl_line(const ScoredResponseRecord& record) {
    const auto& b = record.breakdown;
    std::string out = "{\"response_id\":" + quoted(record.response_id) +
                      ",\"activity_id\":" + quoted(record.activity_id) +
                      ",\"novelty\":" + format_double(b.novelty) +
                      ",\"transformation\":" + format_double(b.transformation) +
                      ",\"creativity\":" + format_double(b.creativity) +
                      ",\"granularity\":" + quoted(granularity_name(b.meta.granularity)) +
                      ",\"alpha\":" + format_double(b.meta.alpha) +
                      ",\"beta\":" + format_double(b.meta.beta) + ",\"aggregation\":" +
                      quoted(aggregation_name(b.meta.subscore_aggregation)) +
                      ",\"per_subelement\":[";
    for (std::size_t i = 0; i < b.per_subelement.size(); ++i) {
        const auto& sub = b.per_subelement[i];
        if (i) out += ',';
        out += "{\"text\":" + quoted(sub.text) + ",\"novelty\":" + format_double(sub.novelty) +
               ",\"transformation\":" + format_double(sub.transformation) +
               ",\"creativity\":" + format_double(sub.creativity) +
               ",\"coefficients\":" + number_array(sub.coefficients) + "}";
    }
    out += "],\"embedding\":" + number_array(record.embedding) + "}";
    return out;
}

std::vector<ScoredResponseRecord> read_scores_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in.is_open()) throw SchemaError("scores: cannot open " + path.string());

    std::vector<ScoredResponseRecord> records;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto parsed = nlohmann::json::parse(line, nullptr, false);
        if (parsed.is_discarded() || !parsed.is_object()) {
            throw SchemaError("scores line " + std::to_string(lineno) + ": not a JSON object");
        }
        const std::string context = "scores line " + std::to_string(lineno);
        auto need = [&](const char* key) -> const nlohmann::json& {
            if (!parsed.contains(key)) {
                throw SchemaError(context + ": missing '" + std::string(key) + "'");
            }
            return parsed[key];
        };

        ScoredResponseRecord record;
        if (!need("response_id").is_string() || !need("activity_id").is_string()) {
            throw SchemaError(context + ": response_id and activity_id must be strings");
        }
        record.response_id = parsed["response_id"].get<std::string>();
        record.activity_id = parsed["activity_id"].get<std::string>();
        for (const char* key : {"novelty", "transformation", "creativity"}) {
            if (!need(key).is_number()) {
                throw SchemaError(context + ": '" + std::string(key) + "' must be a number");
            }
        }
        record.breakdown.novelty = parsed["novelty"].get<double>();
        record.breakdown.transformation = parsed["transformation"].get<double>();
        record.breakdown.creativity = parsed["creativity"].get<double>();
        if (!need("embedding").is_array()) {
            throw SchemaError(context + ": 'embedding' must be an array");
        }
        for (const auto& v : parsed["embedding"]) {
            if (!v.is_number()) throw SchemaError(context + ": non-numeric embedding component");
            record.embedding.push_back(v.get<double>());
        }
        records.push_back(std::move(record));
    }
    return records;
}

std::string summary_to_json(const ScoreSummary& summary) {
    std::string out = "{\"n_responses\":" + std::to_string(summary.n_responses) +
                      ",\"n_activities\":" + std::to_string(summary.n_activities) +
                      ",\"model_id\":" + quoted(summary.model_id) +
                      ",\"dim\":" + std::to_string(summary.dim) +
                      ",\"granularity\":" + quoted(granularity_name(summary.meta.granularity)) +
                      ",\"alpha\":" + format_double(summary.meta.alpha) +
                      ",\"beta\":" + format_double(summary.meta.beta) + ",\"aggregation\":" +
                      quoted(aggregation_name(summary.meta.subscore_aggregation)) +
                      ",\"seed\":" + std::to_string(summary.seed) +
                      ",\"mean_novelty\":" + format_double(summary.mean_novelty) +
                      ",\"mean_transformation\":" + format_double(summary.mean_transformation) +
                      ",\"mean_creativity\":" + format_double(summary.mean_creativity) +
                      ",\"per_activity\":[";
    for (std::size_t i = 0; i < summary.per_activity.size(); ++i) {
        const auto& [id, stats] = summary.per_activity[i];
        if (i) out += ',';
        out += "{\"activity_id\":" + quoted(id) + ",\"n\":" + std::to_string(stats.first) +
               ",\"mean_creativity\":" + format_double(stats.second) + "}";
    }
    out += "]}\n";
    return out;
}

std::string report_to_json(const EvaluationReport& report, std::size_t n_responses) {
    std::string out = "{\"n_activities\":" + std::to_string(report.per_activity.size()) +
                      ",\"n_responses\":" + std::to_string(n_responses) +
                      ",\"mean_mae\":" + format_double(report.mean_mae) +
                      ",\"mean_pearson\":" + optional_number(report.mean_pearson) +
                      ",\"mean_kendall\":" + optional_number(report.mean_kendall) +
                      ",\"per_activity\":[";
    for (std::size_t i = 0; i < report.per_activity.size(); ++i) {
        const auto& m = report.per_activity[i];
        if (i) out += ',';
        out += "{\"activity_id\":" + quoted(m.activity_id) + ",\"n\":" + std::to_string(m.n) +
               ",\"mae\":" + format_double(m.mae) + ",\"pearson\":" + optional_number(m.pearson) +
               ",\"kendall\":" + optional_number(m.kendall) + "}";
    }
    out += "],\"buckets\":[";
    for (std::size_t i = 0; i < report.buckets.size(); ++i) {
        const auto& b = report.buckets[i];
        if (i) out += ',';
        out += "{\"activity_id\":" + quoted(b.activity_id) +
               ",\"label\":" + std::to_string(b.label) + ",\"n\":" + std::to_string(b.summary.n) +
               ",\"min\":" + format_double(b.summary.min) + ",\"q1\":" + format_double(b.summary.q1) +
               ",\"median\":" + format_double(b.summary.median) +
               ",\"q3\":" + format_double(b.summary.q3) + ",\"max\":" + format_double(b.summary.max) +
               "}";
    }
    out += "],\"skipped_activities\":[";
    for (std::size_t i = 0; i < report.skipped.size(); ++i) {
        if (i) out += ',';
        out += "{\"activity_id\":" + quoted(report.skipped[i].activity_id) +
               ",\"reason\":" + quoted(report.skipped[i].reason) + "}";
    }
    out += "]}\n";
    return out;
}

namespace {

// Fields are plain ids and numbers; quote only when a field would break the
// row.
std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

}  // namespace

std::string buckets_to_csv(const std::vector<LabelBucket>& buckets) {
    std::string out = "activity_id,label,n,min,q1,median,q3,max\n";
    for (const auto& b : buckets) {
        out += csv_field(b.activity_id) + ',' + std::to_string(b.label) + ',' +
               std::to_string(b.summary.n) + ',' + format_double(b.summary.min) + ',' +
               format_double(b.summary.q1) + ',' + format_double(b.summary.median) + ',' +
               format_double(b.summary.q3) + ',' + format_double(b.summary.max) + '\n';
    }
    return out;
}

DistributionReport build_distribution_report(const std::vector<ScoredResponseRecord>& records) {
    DistributionReport report;
    report.n = records.size();

    std::vector<std::string> activity_order;
    std::unordered_map<std::string, std::vector<const ScoredResponseRecord*>> groups;
    for (const auto& record : records) {
        auto [it, inserted] = groups.try_emplace(record.activity_id);
        if (inserted) activity_order.push_back(record.activity_id);
        it->second.push_back(&record);
    }

    std::vector<double> all_scores;
    all_scores.reserve(records.size());
    for (const auto& record : records) all_scores.push_back(record.breakdown.creativity);

    auto analyze = [](std::span<const double> scores, std::optional<BimodalityResult>& bimodality,
                      std::optional<ClusterSplit>& split, std::vector<std::string>& notes) {
        if (scores.size() >= 4) {
            try {
                bimodality = bimodality_coefficient(scores);
            } catch (const DegenerateInputError&) {
                notes.push_back("bimodality skipped: zero variance");
            }
        } else {
            notes.push_back("bimodality skipped: fewer than 4 scores");
        }
        if (scores.size() >= 2) {
            split = two_cluster_split(scores);
        } else {
            notes.push_back("cluster split skipped: fewer than 2 scores");
        }
    };

    analyze(all_scores, report.bimodality, report.split, report.notes);

    for (const auto& id : activity_order) {
        const auto& members = groups[id];
        ActivityDistribution activity;
        activity.activity_id = id;
        activity.n = members.size();

        std::vector<double> scores;
        scores.reserve(members.size());
        for (const auto* record : members) scores.push_back(record->breakdown.creativity);
        analyze(scores, activity.bimodality, activity.split, activity.notes);

        if (members.size() >= 2) {
            std::vector<std::pair<std::string, EmbeddingVector>> population;
            population.reserve(members.size());
            bool embeddable = true;
            for (const auto* record : members) {
                if (record->embedding.size() < 2) {
                    embeddable = false;
                    break;
                }
                population.emplace_back(record->response_id,
                                        EmbeddingVector{record->embedding});
            }
            if (embeddable) {
                auto result = distinctiveness(population);
                report.distinctiveness.insert(report.distinctiveness.end(),
                                              result.per_response.begin(),
                                              result.per_response.end());
            } else {
                activity.notes.push_back("distinctiveness skipped: records carry no embedding");
            }
        } else {
            activity.notes.push_back("distinctiveness skipped: fewer than 2 responses");
        }
        report.activities.push_back(std::move(activity));
    }
    return report;
}

std::string distribution_to_json(const DistributionReport& report) {
    std::string out =
        "{\"n\":" + std::to_string(report.n) + ",\"bimodality\":" +
        bimodality_json(report.bimodality) + ",\"cluster_split\":" + split_json(report.split) +
        ",\"notes\":" + notes_json(report.notes) + ",\"activities\":[";
    for (std::size_t i = 0; i < report.activities.size(); ++i) {
        const auto& a = report.activities[i];
        if (i) out += ',';
        out += "{\"activity_id\":" + quoted(a.activity_id) + ",\"n\":" + std::to_string(a.n) +
               ",\"bimodality\":" + bimodality_json(a.bimodality) +
               ",\"cluster_split\":" + split_json(a.split) + ",\"notes\":" + notes_json(a.notes) +
               "}";
    }
    out += "],\"distinctiveness\":[";
    for (std::size_t i = 0; i < report.distinctiveness.size(); ++i) {
        const auto& row = report.distinctiveness[i];
        if (i) out += ',';
        out += "{\"response_id\":" + quoted(row.response_id) +
               ",\"divergence\":" + format_double(row.divergence) +
               ",\"percentile\":" + format_double(row.percentile) + "}";
    }
    out += "]}\n";
    return out;
}

std::string distinctiveness_to_csv(const std::vector<DistinctivenessEntry>& rows) {
    std::string out = "response_id,divergence,percentile\n";
    for (const auto& row : rows) {
        out += csv_field(row.response_id) + ',' + format_double(row.divergence) + ',' +
               format_double(row.percentile) + '\n';
    }
    return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out.is_open()) throw Error("cannot open " + path.string() + " for writing");
    out << content;
    if (!out.good()) throw Error("failed writing " + path.string());
}

}  // namespace creascore
