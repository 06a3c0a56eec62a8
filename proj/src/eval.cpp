#include "crimegrid/eval.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "crimegrid/errors.hpp"
#include "crimegrid/parallel.hpp"
#include "crimegrid/rng.hpp"

namespace crimegrid::eval {

using nlohmann::json;

std::string_view classifier_name(Classifier c) {
    switch (c) {
        case Classifier::forest: return "forest";
        case Classifier::gbm: return "gbm";
        case Classifier::mlp_baseline: return "mlp_baseline";
    }
    return "?";
}

Classifier classifier_from_name(std::string_view name) {
    if (name == "forest") return Classifier::forest;
    if (name == "gbm") return Classifier::gbm;
    if (name == "mlp_baseline") return Classifier::mlp_baseline;
    throw ConfigError("unknown classifier: " + std::string(name));
}

const std::vector<ModelSpec>& model_matrix() {
    static const std::vector<ModelSpec> specs = [] {
        std::vector<ModelSpec> s;
        auto add = [&](const char* name, const char* letters) {
            s.push_back(ModelSpec{name, dataset::parse_group_set(letters)});
        };
        add("MR", "R");
        add("MD", "RD");
        add("MS", "RS");
        add("MF", "RF");
        add("MP", "RP");
        add("MDS", "RDS");
        add("MDF", "RDF");
        add("MDP", "RDP");
        add("MSF", "RSF");
        add("MSP", "RSP");
        add("MFP", "RFP");
        add("MA", "RDSFP");
        return s;
    }();
    return specs;
}

const ModelSpec& model_by_name(std::string_view name) {
    for (const auto& spec : model_matrix())
        if (spec.name == name) return spec;
    throw ConfigError("unknown model spec: " + std::string(name));
}

void ReportRow::compute_mean() {
    mean = FoldMetrics{};
    mean.fold = -1;
    if (folds.empty()) return;
    for (const auto& f : folds) {
        mean.accuracy += f.accuracy;
        mean.precision += f.precision;
        mean.recall += f.recall;
        mean.f_score += f.f_score;
        mean.f_score_macro += f.f_score_macro;
        mean.auc += f.auc;
    }
    double n = static_cast<double>(folds.size());
    mean.accuracy /= n;
    mean.precision /= n;
    mean.recall /= n;
    mean.f_score /= n;
    mean.f_score_macro /= n;
    mean.auc /= n;
}

const ReportRow* EvalReport::find(std::string_view model, std::string_view classifier) const {
    for (const auto& row : rows)
        if (row.model == model && row.classifier == classifier) return &row;
    return nullptr;
}

namespace {

json fold_to_json(const FoldMetrics& f) {
    return json{{"fold", f.fold},          {"accuracy", f.accuracy},
                {"precision", f.precision}, {"recall", f.recall},
                {"f_score", f.f_score},     {"f_score_macro", f.f_score_macro},
                {"auc", f.auc}};
}

FoldMetrics fold_from_json(const json& j) {
    FoldMetrics f;
    f.fold = j.at("fold").get<int>();
    f.accuracy = j.at("accuracy").get<double>();
    f.precision = j.at("precision").get<double>();
    f.recall = j.at("recall").get<double>();
    f.f_score = j.at("f_score").get<double>();
    f.f_score_macro = j.at("f_score_macro").get<double>();
    f.auc = j.at("auc").get<double>();
    return f;
}

}  // namespace

void write_eval_report_json(const std::string& path, const EvalReport& report) {
    json doc;
    doc["format"] = "crimegrid_eval_report_v1";
    doc["n_folds"] = report.n_folds;
    doc["seed"] = report.seed;
    doc["paper_mode"] = report.paper_mode;
    doc["threshold"] = report.threshold;
    json rows = json::array();
    for (const auto& row : report.rows) {
        json folds = json::array();
        for (const auto& f : row.folds) folds.push_back(fold_to_json(f));
        rows.push_back(json{{"model", row.model},
                            {"classifier", row.classifier},
                            {"folds", std::move(folds)},
                            {"mean", fold_to_json(row.mean)}});
    }
    doc["rows"] = std::move(rows);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write eval report: " + path);
    out << doc.dump(2) << '\n';
}

EvalReport read_eval_report_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingArtifactError("missing eval report: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    json doc;
    try {
        doc = json::parse(buf.str());
    } catch (const json::parse_error& e) {
        throw DataError(path + ": invalid eval report: " + e.what());
    }
    if (doc.value("format", "") != "crimegrid_eval_report_v1")
        throw DataError(path + ": unsupported eval report format");
    EvalReport report;
    report.n_folds = doc.at("n_folds").get<int>();
    report.seed = doc.at("seed").get<std::uint64_t>();
    report.paper_mode = doc.at("paper_mode").get<bool>();
    report.threshold = doc.at("threshold").get<double>();
    for (const auto& r : doc.at("rows")) {
        ReportRow row;
        row.model = r.at("model").get<std::string>();
        row.classifier = r.at("classifier").get<std::string>();
        for (const auto& f : r.at("folds")) row.folds.push_back(fold_from_json(f));
        row.mean = fold_from_json(r.at("mean"));
        report.rows.push_back(std::move(row));
    }
    return report;
}

CvDriver::CvDriver(const features::CityData& city, const dataset::Grid& grid,
                   std::vector<dataset::FoldSpec> folds, const CvOptions& options)
    : city_(city), grid_(grid), folds_(std::move(folds)), options_(options) {
    if (folds_.empty()) throw DataError("cv: no folds");
    int lo = month_index(grid_.years.front(), 1);
    int hi = month_index(grid_.years.back(), 12) + 1;
    full_window_ = MonthWindow{lo, hi};
    if (options_.paper_mode) {
        paper_features_ = features::build_region_features(city_, full_window_,
                                                          options_.feature_options);
        paper_retained_ = dataset::undersample(grid_.cells, options_.undersample_ratio,
                                               derive_seed(options_.seed, {0x9a9e6ull}));
    }
}

CvDriver::FoldData CvDriver::build_fold(const dataset::FoldSpec& fold) const {
    FoldData data;
    auto cell_month = [&](const dataset::GridCell& cell) {
        return month_index(cell.key.year, cell.key.month);
    };

    if (options_.paper_mode) {
        // global under-sample; folds slice the retained cells
        for (std::uint32_t idx : paper_retained_) {
            int mi = cell_month(grid_.cells[idx]);
            if (fold.train.contains(mi)) data.train_cells.push_back(idx);
            else if (fold.test.contains(mi)) data.test_cells.push_back(idx);
        }
        data.train = dataset::assemble_matrix(grid_, data.train_cells, *paper_features_,
                                              dataset::parse_group_set("RDSFP"));
        data.test = dataset::assemble_matrix(grid_, data.test_cells, *paper_features_,
                                             dataset::parse_group_set("RDSFP"));
        return data;
    }

    std::vector<std::uint32_t> train_window_cells;
    for (std::uint32_t i = 0; i < grid_.cells.size(); ++i) {
        int mi = cell_month(grid_.cells[i]);
        if (fold.train.contains(mi)) train_window_cells.push_back(i);
        else if (fold.test.contains(mi)) data.test_cells.push_back(i);
    }

    std::vector<dataset::GridCell> train_cells_view;
    train_cells_view.reserve(train_window_cells.size());
    for (std::uint32_t i : train_window_cells) train_cells_view.push_back(grid_.cells[i]);
    auto retained_local = dataset::undersample(
        train_cells_view, options_.undersample_ratio,
        derive_seed(options_.seed, {0x5a17ull, static_cast<std::uint64_t>(fold.fold_index)}));
    data.train_cells.reserve(retained_local.size());
    for (std::uint32_t local : retained_local)
        data.train_cells.push_back(train_window_cells[local]);

    auto region_features =
        features::build_region_features(city_, fold.train, options_.feature_options);
    data.train = dataset::assemble_matrix(grid_, data.train_cells, region_features,
                                          dataset::parse_group_set("RDSFP"));
    data.test = dataset::assemble_matrix(grid_, data.test_cells, region_features,
                                         dataset::parse_group_set("RDSFP"));
    return data;
}

FoldMetrics CvDriver::score_fold(int fold, std::span<const double> scores,
                                 std::span<const std::uint8_t> labels) const {
    std::vector<std::uint8_t> preds(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i)
        preds[i] = scores[i] >= options_.threshold ? 1 : 0;
    Confusion cm = confusion(labels, preds);
    Metrics m = metrics(cm);
    FoldMetrics out;
    out.fold = fold;
    out.accuracy = m.accuracy;
    out.precision = m.precision;
    out.recall = m.recall;
    out.f_score = m.f_score;
    out.f_score_macro = f_score_macro(cm);
    out.auc = auc(labels, scores);
    return out;
}

FoldMetrics CvDriver::score_fold(int fold, std::span<const float> scores,
                                 std::span<const std::uint8_t> labels) const {
    std::vector<double> widened(scores.begin(), scores.end());
    return score_fold(fold, widened, labels);
}

namespace {

std::uint64_t fit_seed(std::uint64_t master, std::string_view model, std::string_view clf,
                       int fold) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix_str = [&](std::string_view s) {
        for (char c : s) {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ull;
        }
    };
    mix_str(model);
    mix_str("/");
    mix_str(clf);
    return derive_seed(master, {0xf17ull, h, static_cast<std::uint64_t>(fold)});
}

}  // namespace

CvDriver::FitPredict CvDriver::make_fit_predict(Classifier clf, const LearnerParams& params) {
    switch (clf) {
        case Classifier::forest:
            return [params](const dataset::FeatureMatrix& train,
                            const dataset::FeatureMatrix& test, std::uint64_t seed) {
                auto model = learn::fit_forest(learn::DataView::of(train), train.labels,
                                               params.forest, seed);
                return learn::predict_proba(model, learn::DataView::of(test));
            };
        case Classifier::gbm:
            return [params](const dataset::FeatureMatrix& train,
                            const dataset::FeatureMatrix& test, std::uint64_t seed) {
                auto model = learn::fit_gbm(learn::DataView::of(train), train.labels, params.gbm,
                                            seed);
                return learn::predict_proba(model, learn::DataView::of(test));
            };
        case Classifier::mlp_baseline:
            return [params](const dataset::FeatureMatrix& train,
                            const dataset::FeatureMatrix& test, std::uint64_t seed) {
                auto result = learn::fit_mlp(train, params.mlp, seed, test);
                return result.model.predict_proba(learn::DataView::of(test));
            };
    }
    throw DataError("unknown classifier");
}

ReportRow CvDriver::run_cv(const ModelSpec& spec, Classifier clf,
                           const LearnerParams& params) const {
    return run_cv_custom(spec, std::string(classifier_name(clf)),
                         make_fit_predict(clf, params));
}

ReportRow CvDriver::run_cv_custom(const ModelSpec& spec, const std::string& clf_name,
                                  const FitPredict& fit_predict) const {
    ReportRow row;
    row.model = spec.name;
    row.classifier = clf_name;
    row.folds.resize(folds_.size());
    parallel_for(folds_.size(), options_.jobs, [&](std::size_t i) {
        FoldData data = build_fold(folds_[i]);
        auto train = dataset::select_groups(data.train, spec.mask);
        auto test = dataset::select_groups(data.test, spec.mask);
        auto scores = fit_predict(train, test,
                                  fit_seed(options_.seed, spec.name, clf_name,
                                           folds_[i].fold_index));
        row.folds[i] = score_fold(folds_[i].fold_index, scores, test.labels);
    });
    row.compute_mean();
    return row;
}

CvDriver::MatrixScores CvDriver::run_matrix_scores(
    const LearnerParams& params, const MatrixSelection& selection,
    const std::function<void(const std::string&)>& progress) const {
    std::vector<const ModelSpec*> specs;
    if (selection.models.empty()) {
        for (const auto& s : model_matrix()) specs.push_back(&s);
    } else {
        for (const auto& name : selection.models) specs.push_back(&model_by_name(name));
    }
    bool want_forest = false, want_gbm = false, want_mlp = false;
    for (Classifier c : selection.classifiers) {
        if (c == Classifier::forest) want_forest = true;
        if (c == Classifier::gbm) want_gbm = true;
        if (c == Classifier::mlp_baseline) want_mlp = true;
    }

    MatrixScores out;
    for (const ModelSpec* spec : specs) {
        if (want_forest) out.sets.push_back({spec->name, "forest", {}});
        if (want_gbm) out.sets.push_back({spec->name, "gbm", {}});
    }
    bool mlp_applies = false;
    for (const ModelSpec* spec : specs) mlp_applies |= spec->name == "MA";
    if (want_mlp && mlp_applies) out.sets.push_back({"MA", "mlp_baseline", {}});
    if (out.sets.empty()) throw ConfigError("no model/classifier combinations selected");
    for (auto& set : out.sets) set.fold_scores.resize(folds_.size());
    out.test_labels.resize(folds_.size());
    out.fold_ids.resize(folds_.size());

    parallel_for(folds_.size(), options_.jobs, [&](std::size_t i) {
        FoldData data = build_fold(folds_[i]);
        out.fold_ids[i] = folds_[i].fold_index;
        out.test_labels[i] = data.test.labels;
        std::size_t set_idx = 0;
        for (const ModelSpec* spec : specs) {
            dataset::FeatureMatrix train, test;
            if (want_forest || want_gbm) {
                train = dataset::select_groups(data.train, spec->mask);
                test = dataset::select_groups(data.test, spec->mask);
            }
            for (Classifier clf : {Classifier::forest, Classifier::gbm}) {
                if ((clf == Classifier::forest && !want_forest) ||
                    (clf == Classifier::gbm && !want_gbm))
                    continue;
                auto fit = make_fit_predict(clf, params);
                auto scores = fit(train, test,
                                  fit_seed(options_.seed, spec->name, classifier_name(clf),
                                           folds_[i].fold_index));
                auto& dst = out.sets[set_idx++].fold_scores[i];
                dst.assign(scores.begin(), scores.end());
                if (progress)
                    progress("fold " + std::to_string(folds_[i].fold_index) + " " + spec->name +
                             " " + std::string(classifier_name(clf)));
            }
        }
        if (want_mlp && mlp_applies) {
            auto fit = make_fit_predict(Classifier::mlp_baseline, params);
            auto scores = fit(data.train, data.test,
                              fit_seed(options_.seed, "MA", "mlp_baseline",
                                       folds_[i].fold_index));
            auto& dst = out.sets.back().fold_scores[i];
            dst.assign(scores.begin(), scores.end());
            if (progress)
                progress("fold " + std::to_string(folds_[i].fold_index) + " MA mlp_baseline");
        }
    });
    return out;
}

EvalReport CvDriver::report_from_scores(const MatrixScores& scores) const {
    EvalReport report;
    report.n_folds = static_cast<int>(scores.fold_ids.size());
    report.seed = options_.seed;
    report.paper_mode = options_.paper_mode;
    report.threshold = options_.threshold;
    for (const auto& set : scores.sets) {
        ReportRow row;
        row.model = set.model;
        row.classifier = set.classifier;
        for (std::size_t i = 0; i < set.fold_scores.size(); ++i)
            row.folds.push_back(
                score_fold(scores.fold_ids[i], set.fold_scores[i], scores.test_labels[i]));
        row.compute_mean();
        report.rows.push_back(std::move(row));
    }
    return report;
}

EvalReport CvDriver::run_matrix(const LearnerParams& params,
                                const std::function<void(const std::string&)>& progress) const {
    MatrixSelection all;
    all.classifiers = {Classifier::forest, Classifier::gbm, Classifier::mlp_baseline};
    return report_from_scores(run_matrix_scores(params, all, progress));
}

}  // namespace crimegrid::eval
