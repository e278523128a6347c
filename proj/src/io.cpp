#include "causeval/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "causeval/csv.hpp"

namespace causeval::io {

namespace {

std::string bool_field(bool value) { return value ? "1" : "0"; }

std::string reading_field(const causation::Reading& reading) {
    return reading.has_value() ? bool_field(*reading) : std::string();
}

bool parse_bool(const std::string& s, const char* what) {
    if (s == "1") return true;
    if (s == "0") return false;
    throw std::invalid_argument(std::string("dataset: bad boolean in column ") + what + ": '" +
                                s + "'");
}

struct ParsedTable {
    std::vector<std::string> exogenous_names;
    std::vector<std::vector<std::string>> rows;
    std::size_t outcome_col = 0;     // y or y_do
    std::size_t replicate_col = 0;
    std::size_t x_col = 0;           // factual only
    std::size_t do_col = 0;          // interventional only
    bool has_x = false;
};

ParsedTable parse_table(const std::filesystem::path& path, bool factual) {
    auto rows = csv::parse(read_file(path));
    // drop blank lines
    std::erase_if(rows, [](const std::vector<std::string>& row) {
        return row.size() == 1 && row[0].empty();
    });
    if (rows.empty()) throw std::invalid_argument("dataset file is empty: " + path.string());

    const std::vector<std::string>& header = rows.front();
    if (header.empty() || header[0] != "instance")
        throw std::invalid_argument("dataset header must start with 'instance': " +
                                    path.string());
    const std::string marker = factual ? "x" : "do";
    std::size_t marker_col = 0;
    for (std::size_t i = 1; i < header.size(); ++i)
        if (header[i] == marker) {
            marker_col = i;
            break;
        }
    if (marker_col == 0)
        throw std::invalid_argument("dataset header lacks the '" + marker +
                                    "' column: " + path.string());

    ParsedTable table;
    table.exogenous_names.assign(header.begin() + 1, header.begin() + marker_col);
    if (factual) {
        table.has_x = true;
        table.x_col = marker_col;
    } else {
        table.do_col = marker_col;
    }
    table.outcome_col = marker_col + 1;
    table.replicate_col = marker_col + 2;
    const std::size_t expected_cols = marker_col + 5;  // ... replicate,raw_text,parsed,method
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].size() != expected_cols + 1)
            throw std::invalid_argument("dataset row " + std::to_string(i) +
                                        " has the wrong column count: " + path.string());
    table.rows.assign(rows.begin() + 1, rows.end());
    return table;
}

template <typename Record, typename SetRow>
std::pair<std::vector<Record>, int> group_rows(const ParsedTable& table, SetRow set_row) {
    std::vector<Record> records;
    int max_replicate = 0;
    for (const auto& row : table.rows) {
        const std::int64_t id = std::stoll(row[0]);
        if (records.empty() || records.back().id != id) {
            Record record;
            record.id = id;
            for (std::size_t v = 0; v < table.exogenous_names.size(); ++v)
                record.z[table.exogenous_names[v]] = std::stol(row[1 + v]);
            records.push_back(std::move(record));
        }
        const int replicate = std::stoi(row[table.replicate_col]);
        max_replicate = std::max(max_replicate, replicate);
        const std::string& outcome = row[table.outcome_col];
        causation::Reading reading =
            outcome.empty() ? causation::Reading{}
                            : causation::Reading{parse_bool(outcome, "outcome")};
        set_row(records.back(), row, reading);
    }
    return {std::move(records), max_replicate + 1};
}

}  // namespace

RowExtras scm_extras() {
    return [](std::int64_t, int) { return std::make_pair(std::string(), std::string("scm")); };
}

RowExtras answer_extras(const std::vector<llm::AnswerRecord>& answers, llm::PromptKind kind) {
    auto index = std::make_shared<std::map<std::pair<std::int64_t, int>, const llm::AnswerRecord*>>();
    for (const auto& answer : answers)
        if (answer.kind == kind) (*index)[{answer.instance, answer.replicate}] = &answer;
    return [index](std::int64_t instance, int replicate) {
        auto it = index->find({instance, replicate});
        if (it == index->end())
            throw std::invalid_argument("no raw answer recorded for instance " +
                                        std::to_string(instance) + " replicate " +
                                        std::to_string(replicate));
        return std::make_pair(it->second->raw, std::string(llm::to_string(it->second->method)));
    };
}

void write_factual_csv(const std::filesystem::path& path,
                       const causation::FactualDataset& dataset,
                       const std::vector<std::string>& exogenous_names,
                       const RowExtras& extras) {
    std::string out;
    std::vector<std::string> header{"instance"};
    header.insert(header.end(), exogenous_names.begin(), exogenous_names.end());
    for (const char* col : {"x", "y", "replicate", "raw_text", "parsed", "method"})
        header.emplace_back(col);
    out += csv::join_row(header);

    for (const auto& record : dataset.records) {
        for (std::size_t r = 0; r < record.y.size(); ++r) {
            std::vector<std::string> row{std::to_string(record.id)};
            for (const auto& name : exogenous_names)
                row.push_back(std::to_string(record.z.at(name)));
            row.push_back(bool_field(record.x));
            row.push_back(reading_field(record.y[r]));
            row.push_back(std::to_string(r));
            auto [raw, method] = extras(record.id, static_cast<int>(r));
            row.push_back(raw);
            row.push_back(record.y[r].has_value() ? "1" : "0");
            row.push_back(method);
            out += csv::join_row(row);
        }
    }
    write_file(path, out);
}

void write_interventional_csv(const std::filesystem::path& path,
                              const causation::InterventionalDataset& dataset,
                              const std::vector<std::string>& exogenous_names,
                              const RowExtras& extras) {
    std::string out;
    std::vector<std::string> header{"instance"};
    header.insert(header.end(), exogenous_names.begin(), exogenous_names.end());
    for (const char* col : {"do", "y_do", "replicate", "raw_text", "parsed", "method"})
        header.emplace_back(col);
    out += csv::join_row(header);

    for (const auto& record : dataset.records) {
        for (std::size_t r = 0; r < record.y_do.size(); ++r) {
            std::vector<std::string> row{std::to_string(record.id)};
            for (const auto& name : exogenous_names)
                row.push_back(std::to_string(record.z.at(name)));
            row.push_back(bool_field(dataset.intervention));
            row.push_back(reading_field(record.y_do[r]));
            row.push_back(std::to_string(r));
            auto [raw, method] = extras(record.id, static_cast<int>(r));
            row.push_back(raw);
            row.push_back(record.y_do[r].has_value() ? "1" : "0");
            row.push_back(method);
            out += csv::join_row(row);
        }
    }
    write_file(path, out);
}

causation::FactualDataset read_factual_csv(const std::filesystem::path& path) {
    const ParsedTable table = parse_table(path, true);
    causation::FactualDataset dataset;
    auto [records, replicates] = group_rows<causation::FactualRecord>(
        table, [&](causation::FactualRecord& record, const std::vector<std::string>& row,
                   const causation::Reading& reading) {
            record.x = parse_bool(row[table.x_col], "x");
            record.y.push_back(reading);
        });
    dataset.records = std::move(records);
    dataset.replicates = replicates;
    for (const auto& record : dataset.records)
        if (static_cast<int>(record.y.size()) != dataset.replicates)
            throw std::invalid_argument("dataset: replicate count is not uniform in " +
                                        path.string());
    return dataset;
}

causation::InterventionalDataset read_interventional_csv(const std::filesystem::path& path) {
    const ParsedTable table = parse_table(path, false);
    causation::InterventionalDataset dataset;
    bool saw_value = false;
    auto [records, replicates] = group_rows<causation::InterventionalRecord>(
        table, [&](causation::InterventionalRecord& record, const std::vector<std::string>& row,
                   const causation::Reading& reading) {
            const bool value = parse_bool(row[table.do_col], "do");
            if (!saw_value) {
                dataset.intervention = value;
                saw_value = true;
            } else if (value != dataset.intervention) {
                throw std::invalid_argument("dataset: mixed intervention values");
            }
            record.y_do.push_back(reading);
        });
    dataset.records = std::move(records);
    dataset.replicates = replicates;
    for (const auto& record : dataset.records)
        if (static_cast<int>(record.y_do.size()) != dataset.replicates)
            throw std::invalid_argument("dataset: replicate count is not uniform in " +
                                        path.string());
    return dataset;
}

void write_bootstrap_csv(const std::filesystem::path& path,
                         const metrics::BootstrapDensity& density) {
    std::string out = "sample,pn,ps\n";
    for (std::size_t i = 0; i < density.pn.size(); ++i)
        out += std::to_string(i) + "," + format_double(density.pn[i]) + "," +
               format_double(density.ps[i]) + "\n";
    write_file(path, out);
}

void write_overlap_csv(const std::filesystem::path& path, const metrics::OverlapCurve& curve) {
    std::string out = "gamma,pn_overlap,ps_overlap\n";
    for (std::size_t i = 0; i < curve.gamma.size(); ++i)
        out += format_double(curve.gamma[i]) + "," + format_double(curve.pn_overlap[i]) + "," +
               format_double(curve.ps_overlap[i]) + "\n";
    write_file(path, out);
}

void write_elements_csv(const std::filesystem::path& path, const metrics::ErrorMatrix& matrix) {
    std::string out = "instance,factual,do_true,do_false\n";
    auto field = [](double v) { return std::isnan(v) ? std::string() : format_double(v); };
    for (std::size_t i = 0; i < matrix.factual.size(); ++i)
        out += std::to_string(i) + "," + field(matrix.factual[i]) + "," +
               field(matrix.do_true[i]) + "," + field(matrix.do_false[i]) + "\n";
    write_file(path, out);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot read file: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::invalid_argument("cannot write file: " + path.string());
    out << content;
    if (!out) throw std::invalid_argument("write failed: " + path.string());
}

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

}  // namespace causeval::io
