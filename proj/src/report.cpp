#include <cstdio>
#include <fstream>

#include "crimegrid/errors.hpp"
#include "crimegrid/eval.hpp"

namespace crimegrid::eval {

namespace {

std::string fixed2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write report file: " + path);
    out << text;
}

std::string check(bool b) { return b ? "x" : ""; }

void render_table3(const EvalReport& report, const std::string& out_dir, bool markdown,
                   bool csv) {
    std::string md;
    md += "| No. | Model | R | D | S | F | P | RF Accuracy (%) | RF F-score (%) | "
          "GB Accuracy (%) | GB F-score (%) |\n";
    md += "|---|---|---|---|---|---|---|---|---|---|---|\n";
    std::string cs = "no,model,R,D,S,F,P,rf_accuracy,rf_fscore,gb_accuracy,gb_fscore\n";

    int no = 0;
    for (const auto& spec : model_matrix()) {
        const ReportRow* rf = report.find(spec.name, "forest");
        const ReportRow* gb = report.find(spec.name, "gbm");
        if (!rf && !gb) continue;
        ++no;
        auto cell = [&](const ReportRow* row, bool fscore) {
            if (!row) return std::string();
            return fixed2(fscore ? row->mean.f_score : row->mean.accuracy);
        };
        md += "| " + std::to_string(no) + " | " + spec.name + " | " + check(spec.mask.r) +
              " | " + check(spec.mask.d) + " | " + check(spec.mask.s) + " | " +
              check(spec.mask.f) + " | " + check(spec.mask.p) + " | " + cell(rf, false) +
              " | " + cell(rf, true) + " | " + cell(gb, false) + " | " + cell(gb, true) +
              " |\n";
        cs += std::to_string(no) + "," + spec.name + "," + (spec.mask.r ? "1" : "0") + "," +
              (spec.mask.d ? "1" : "0") + "," + (spec.mask.s ? "1" : "0") + "," +
              (spec.mask.f ? "1" : "0") + "," + (spec.mask.p ? "1" : "0") + "," +
              cell(rf, false) + "," + cell(rf, true) + "," + cell(gb, false) + "," +
              cell(gb, true) + "\n";
    }
    if (markdown) write_text(out_dir + "/report_table3.md", md);
    if (csv) write_text(out_dir + "/report_table3.csv", cs);
}

void render_table4(const EvalReport& report, const std::string& out_dir, bool markdown,
                   bool csv) {
    std::string md;
    md += "| Model | Accuracy (%) | Precision (%) | Recall (%) | AUC |\n";
    md += "|---|---|---|---|---|\n";
    std::string cs = "model,accuracy,precision,recall,auc\n";

    auto add_row = [&](const char* label, const ReportRow* row) {
        if (!row) return;
        md += "| " + std::string(label) + " | " + fixed2(row->mean.accuracy) + " | " +
              fixed2(row->mean.precision) + " | " + fixed2(row->mean.recall) + " | " +
              fixed2(row->mean.auc * 100.0) + " |\n";
        cs += std::string(label) + "," + fixed2(row->mean.accuracy) + "," +
              fixed2(row->mean.precision) + "," + fixed2(row->mean.recall) + "," +
              fixed2(row->mean.auc * 100.0) + "\n";
    };
    // best-epoch selection makes the DNN row optimistic; kept for comparability
    add_row("DNN (baseline)", report.find("MA", "mlp_baseline"));
    add_row("GB-MA", report.find("MA", "gbm"));

    if (markdown) write_text(out_dir + "/report_table4.md", md);
    if (csv) write_text(out_dir + "/report_table4.csv", cs);
}

}  // namespace

void render_report(const EvalReport& report, const std::string& out_dir,
                   const std::vector<std::string>& formats) {
    bool markdown = false, csv = false;
    for (const auto& f : formats) {
        if (f == "markdown") markdown = true;
        else if (f == "csv") csv = true;
        else throw ConfigError("unknown report format: " + f);
    }
    if (!markdown && !csv) throw ConfigError("no report formats selected");
    render_table3(report, out_dir, markdown, csv);
    render_table4(report, out_dir, markdown, csv);
}

}  // namespace crimegrid::eval
