#include "bnsjump/classifiers.hpp"

#include "bnsjump/common.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <istream>
#include <ostream>

namespace bnsjump::ml {

ClassReport evaluate(std::span<const int> predictions, std::span<const int> truth) {
    if (predictions.size() != truth.size()) {
        throw InvalidParameter("predictions (" + std::to_string(predictions.size()) + ") and truth (" +
                               std::to_string(truth.size()) + ") differ in length");
    }
    ClassReport rep;
    rep.total = truth.size();
    std::size_t correct = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const int t = truth[i], p = predictions[i];
        if ((t != 0 && t != 1) || (p != 0 && p != 1)) throw InvalidParameter("labels must be 0 or 1");
        ++rep.classes[t].support;
        if (t == p) {
            ++rep.classes[t].true_positive;
            ++correct;
        } else {
            ++rep.classes[p].false_positive;
            ++rep.classes[t].false_negative;
        }
    }
    for (auto& c : rep.classes) {
        const std::size_t pp = c.true_positive + c.false_positive;
        const std::size_t ap = c.true_positive + c.false_negative;
        if (pp == 0) c.precision_undefined = true;
        else c.precision = static_cast<double>(c.true_positive) / static_cast<double>(pp);
        if (ap == 0) c.recall_undefined = true;
        else c.recall = static_cast<double>(c.true_positive) / static_cast<double>(ap);
        if (c.precision + c.recall > 0.0) c.f1 = 2.0 * c.precision * c.recall / (c.precision + c.recall);
        else c.f1_undefined = true;
    }
    rep.accuracy = rep.total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(rep.total);
    return rep;
}

ExternalPredictions read_predictions_csv(std::istream& in, std::string name, std::string split) {
    ExternalPredictions ext{std::move(name), std::move(split), {}};
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line) || trim(line) != "index,predicted_theta") {
        throw ParseError("expected header index,predicted_theta", line_no);
    }
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view row = trim(line);
        if (row.empty()) continue;
        const auto comma = row.find(',');
        if (comma == std::string_view::npos || row.find(',', comma + 1) != std::string_view::npos) {
            throw ParseError("expected two fields", line_no);
        }
        const auto index = parse_int(row.substr(0, comma), line_no);
        const auto label = parse_int(row.substr(comma + 1), line_no);
        if (label != 0 && label != 1) throw ParseError("predicted_theta must be 0 or 1", line_no);
        if (!ext.labels.emplace(index, static_cast<int>(label)).second) throw ParseError("duplicate index", line_no);
    }
    return ext;
}

void write_predictions_csv(std::ostream& out, std::span<const std::int64_t> index, std::span<const int> labels) {
    if (index.size() != labels.size()) throw InvalidParameter("index and labels differ in length");
    out << "index,predicted_theta\n";
    for (std::size_t i = 0; i < index.size(); ++i) out << index[i] << ',' << labels[i] << '\n';
}

void write_report_csv(std::ostream& out, const BenchmarkTable& table, const std::string& split) {
    out << kReportCsvHeader << '\n';
    for (const auto& cell : table.cells) {
        if (cell.split != split) continue;
        out << cell.algorithm;
        for (const auto& c : cell.report.classes) {
            out << ',' << format_double(c.precision) << ',' << format_double(c.recall) << ',' << format_double(c.f1)
                << ',' << c.support;
        }
        out << '\n';
    }
}

void write_report_text(std::ostream& out, const BenchmarkTable& table) {
    std::vector<std::string> splits;
    std::size_t width = 9;
    for (const auto& cell : table.cells) {
        if (std::find(splits.begin(), splits.end(), cell.split) == splits.end()) splits.push_back(cell.split);
        width = std::max(width, cell.algorithm.size());
    }
    bool first = true;
    for (const auto& split : splits) {
        if (!first) out << '\n';
        first = false;
        out << "split " << split << '\n';
        out << fmt::format("{:<{}} {:>5} {:>9} {:>10} {:>9} {:>9}\n", "algorithm", width, "theta", "precision",
                           "recall", "f1-score", "support");
        for (const auto& cell : table.cells) {
            if (cell.split != split) continue;
            for (int c = 0; c < 2; ++c) {
                const auto& m = cell.report.classes[c];
                out << fmt::format("{:<{}} {:>5} {:>9.2f} {:>10.2f} {:>9.2f} {:>9}\n", c == 0 ? cell.algorithm : "",
                                   width, c, m.precision, m.recall, m.f1, m.support);
            }
        }
    }
}

}  // namespace bnsjump::ml
