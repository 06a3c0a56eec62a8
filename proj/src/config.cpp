#include "crimegrid/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "crimegrid/errors.hpp"

namespace crimegrid {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::string& context,
                const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw ConfigError(context + ": expected an object");
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.contains(key))
            throw ConfigError(context + ": unknown key '" + key + "'");
    }
}

template <typename T>
T get_or(const json& obj, const std::string& key, T fallback, const std::string& context) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(context + "." + key + ": wrong type");
    }
}

Season season_from_string(const std::string& s, const std::string& context) {
    if (s == "winter") return Season::winter;
    if (s == "spring") return Season::spring;
    if (s == "summer") return Season::summer;
    if (s == "fall") return Season::fall;
    throw ConfigError(context + ": unknown season '" + s + "'");
}

std::vector<std::pair<std::string, std::vector<double>>> parse_axes(const json& obj,
                                                                    const std::string& context) {
    std::vector<std::pair<std::string, std::vector<double>>> axes;
    if (!obj.is_object()) throw ConfigError(context + ": expected an object of value lists");
    for (const auto& [key, value] : obj.items()) {
        if (!value.is_array() || value.empty())
            throw ConfigError(context + "." + key + ": expected a non-empty array");
        std::vector<double> values;
        for (const auto& v : value) {
            if (!v.is_number()) throw ConfigError(context + "." + key + ": values must be numeric");
            values.push_back(v.get<double>());
        }
        axes.emplace_back(key, std::move(values));
    }
    return axes;
}

}  // namespace

RunConfig config_from_json(const json& doc) {
    RunConfig cfg;
    check_keys(doc, "config",
               {"seed", "jobs", "paper_mode", "out_dir", "timezone_offset_minutes", "synth",
                "inputs", "binning", "features", "dataset", "train", "eval", "report"});
    cfg.seed = get_or<std::uint64_t>(doc, "seed", cfg.seed, "config");
    cfg.jobs = get_or<int>(doc, "jobs", cfg.jobs, "config");
    if (cfg.jobs < 1) throw ConfigError("config.jobs: must be at least 1");
    cfg.paper_mode = get_or<bool>(doc, "paper_mode", cfg.paper_mode, "config");
    cfg.out_dir = get_or<std::string>(doc, "out_dir", cfg.out_dir, "config");
    cfg.timezone_offset_minutes =
        get_or<int>(doc, "timezone_offset_minutes", cfg.timezone_offset_minutes, "config");

    if (doc.contains("synth")) {
        const json& s = doc.at("synth");
        check_keys(s, "config.synth",
                   {"grid_size", "start_year", "n_years", "base_rate", "noise", "weights",
                    "poi_downtown_rate", "checkin_mean", "users", "multi_crime_rate"});
        cfg.has_synth = true;
        auto& sc = cfg.synth_config;
        sc.grid_size = get_or<int>(s, "grid_size", sc.grid_size, "config.synth");
        sc.start_year = get_or<int>(s, "start_year", sc.start_year, "config.synth");
        sc.n_years = get_or<int>(s, "n_years", sc.n_years, "config.synth");
        sc.base_rate = get_or<double>(s, "base_rate", sc.base_rate, "config.synth");
        sc.noise = get_or<double>(s, "noise", sc.noise, "config.synth");
        sc.poi_downtown_rate =
            get_or<double>(s, "poi_downtown_rate", sc.poi_downtown_rate, "config.synth");
        sc.checkin_mean = get_or<double>(s, "checkin_mean", sc.checkin_mean, "config.synth");
        sc.users = get_or<int>(s, "users", sc.users, "config.synth");
        sc.multi_crime_rate =
            get_or<double>(s, "multi_crime_rate", sc.multi_crime_rate, "config.synth");
        if (s.contains("weights")) {
            const json& w = s.at("weights");
            check_keys(w, "config.synth.weights",
                       {"demographic", "demographic_interaction", "streetlight", "poi",
                        "seasonal", "weekend"});
            auto& pw = sc.weights;
            pw.demographic = get_or<double>(w, "demographic", 0.0, "config.synth.weights");
            pw.demographic_interaction =
                get_or<double>(w, "demographic_interaction", 0.0, "config.synth.weights");
            pw.streetlight = get_or<double>(w, "streetlight", 0.0, "config.synth.weights");
            pw.poi = get_or<double>(w, "poi", 0.0, "config.synth.weights");
            pw.seasonal = get_or<double>(w, "seasonal", 0.0, "config.synth.weights");
            pw.weekend = get_or<double>(w, "weekend", 0.0, "config.synth.weights");
        }
        sc.seed = cfg.seed;  // all randomness flows from the master seed
        synth::validate_config(sc);
    }

    // default inputs point at the synth stage outputs
    std::string synth_dir = cfg.out_dir + "/synth";
    cfg.inputs.regions = synth_dir + "/regions.geojson";
    cfg.inputs.crimes = synth_dir + "/crimes.csv";
    cfg.inputs.streetlights = synth_dir + "/streetlights.csv";
    cfg.inputs.pois = synth_dir + "/pois.csv";
    cfg.inputs.checkins = synth_dir + "/checkins.csv";
    cfg.inputs.demographics = synth_dir + "/demographics.csv";
    if (doc.contains("inputs")) {
        const json& in = doc.at("inputs");
        check_keys(in, "config.inputs",
                   {"regions", "crimes", "streetlights", "pois", "checkins", "demographics"});
        cfg.inputs.regions = get_or<std::string>(in, "regions", cfg.inputs.regions, "config.inputs");
        cfg.inputs.crimes = get_or<std::string>(in, "crimes", cfg.inputs.crimes, "config.inputs");
        cfg.inputs.streetlights =
            get_or<std::string>(in, "streetlights", cfg.inputs.streetlights, "config.inputs");
        cfg.inputs.pois = get_or<std::string>(in, "pois", cfg.inputs.pois, "config.inputs");
        cfg.inputs.checkins =
            get_or<std::string>(in, "checkins", cfg.inputs.checkins, "config.inputs");
        cfg.inputs.demographics =
            get_or<std::string>(in, "demographics", cfg.inputs.demographics, "config.inputs");
    }

    if (doc.contains("binning")) {
        const json& b = doc.at("binning");
        check_keys(b, "config.binning", {"season_map"});
        if (b.contains("season_map")) {
            const json& sm = b.at("season_map");
            if (!sm.is_object() || sm.size() != 12)
                throw ConfigError("config.binning.season_map: must map all 12 months");
            for (const auto& [key, value] : sm.items()) {
                int month = 0;
                try {
                    month = std::stoi(key);
                } catch (...) {
                    throw ConfigError("config.binning.season_map: bad month key '" + key + "'");
                }
                if (month < 1 || month > 12)
                    throw ConfigError("config.binning.season_map: month out of range");
                if (!value.is_string())
                    throw ConfigError("config.binning.season_map: season must be a string");
                cfg.binning.season_of_month[month - 1] =
                    season_from_string(value.get<std::string>(), "config.binning.season_map");
            }
        }
    }

    if (doc.contains("features")) {
        const json& f = doc.at("features");
        check_keys(f, "config.features", {"include_light_distance"});
        cfg.feature_options.include_light_distance =
            get_or<bool>(f, "include_light_distance", false, "config.features");
    }

    if (cfg.has_synth) {
        cfg.dataset.years.clear();
        for (int y = 0; y < cfg.synth_config.n_years; ++y)
            cfg.dataset.years.push_back(cfg.synth_config.start_year + y);
    }
    if (doc.contains("dataset")) {
        const json& d = doc.at("dataset");
        check_keys(d, "config.dataset",
                   {"years", "undersample_ratio", "n_folds", "export_matrices"});
        if (d.contains("years")) cfg.dataset.years = d.at("years").get<std::vector<int>>();
        cfg.dataset.undersample_ratio =
            get_or<double>(d, "undersample_ratio", cfg.dataset.undersample_ratio, "config.dataset");
        cfg.dataset.n_folds = get_or<int>(d, "n_folds", cfg.dataset.n_folds, "config.dataset");
        cfg.dataset.export_matrices =
            get_or<bool>(d, "export_matrices", cfg.dataset.export_matrices, "config.dataset");
    }
    if (cfg.dataset.years.empty())
        throw ConfigError("config.dataset.years: required when no synth section is present");
    if (cfg.dataset.undersample_ratio < 1.0)
        throw ConfigError("config.dataset.undersample_ratio: must be >= 1");
    if (cfg.dataset.n_folds < 1) throw ConfigError("config.dataset.n_folds: must be >= 1");

    if (doc.contains("train")) {
        const json& t = doc.at("train");
        check_keys(t, "config.train", {"models", "classifiers", "forest", "gbm", "mlp", "search"});
        if (t.contains("models")) {
            auto models = t.at("models").get<std::vector<std::string>>();
            if (!(models.size() == 1 && models[0] == "all")) {
                for (const auto& m : models) eval::model_by_name(m);  // validate
                cfg.train.models = models;
            }
        }
        if (t.contains("classifiers")) {
            cfg.train.classifiers.clear();
            for (const auto& c : t.at("classifiers").get<std::vector<std::string>>())
                cfg.train.classifiers.push_back(eval::classifier_from_name(c));
            if (cfg.train.classifiers.empty())
                throw ConfigError("config.train.classifiers: must not be empty");
        }
        if (t.contains("forest")) {
            const json& f = t.at("forest");
            check_keys(f, "config.train.forest",
                       {"n_trees", "max_depth", "min_leaf", "max_features", "bootstrap"});
            auto& p = cfg.train.params.forest;
            p.n_trees = get_or<int>(f, "n_trees", p.n_trees, "config.train.forest");
            p.max_depth = get_or<int>(f, "max_depth", p.max_depth, "config.train.forest");
            p.min_leaf = get_or<int>(f, "min_leaf", p.min_leaf, "config.train.forest");
            p.max_features = get_or<int>(f, "max_features", p.max_features, "config.train.forest");
            p.bootstrap = get_or<bool>(f, "bootstrap", p.bootstrap, "config.train.forest");
        }
        if (t.contains("gbm")) {
            const json& g = t.at("gbm");
            check_keys(g, "config.train.gbm",
                       {"n_rounds", "learning_rate", "max_depth", "min_leaf", "subsample"});
            auto& p = cfg.train.params.gbm;
            p.n_rounds = get_or<int>(g, "n_rounds", p.n_rounds, "config.train.gbm");
            p.learning_rate =
                get_or<double>(g, "learning_rate", p.learning_rate, "config.train.gbm");
            p.max_depth = get_or<int>(g, "max_depth", p.max_depth, "config.train.gbm");
            p.min_leaf = get_or<int>(g, "min_leaf", p.min_leaf, "config.train.gbm");
            p.subsample = get_or<double>(g, "subsample", p.subsample, "config.train.gbm");
        }
        if (t.contains("mlp")) {
            const json& m = t.at("mlp");
            check_keys(m, "config.train.mlp",
                       {"encoder_width", "joint1", "joint2", "learning_rate", "momentum",
                        "batch_size", "epochs"});
            auto& p = cfg.train.params.mlp;
            p.encoder_width = get_or<int>(m, "encoder_width", p.encoder_width, "config.train.mlp");
            p.joint1 = get_or<int>(m, "joint1", p.joint1, "config.train.mlp");
            p.joint2 = get_or<int>(m, "joint2", p.joint2, "config.train.mlp");
            p.learning_rate =
                get_or<double>(m, "learning_rate", p.learning_rate, "config.train.mlp");
            p.momentum = get_or<double>(m, "momentum", p.momentum, "config.train.mlp");
            p.batch_size = get_or<int>(m, "batch_size", p.batch_size, "config.train.mlp");
            p.epochs = get_or<int>(m, "epochs", p.epochs, "config.train.mlp");
        }
        if (t.contains("search")) {
            const json& s = t.at("search");
            check_keys(s, "config.train.search", {"enabled", "n_samples", "forest", "gbm"});
            cfg.train.search.enabled = get_or<bool>(s, "enabled", false, "config.train.search");
            cfg.train.search.n_samples =
                get_or<int>(s, "n_samples", cfg.train.search.n_samples, "config.train.search");
            if (s.contains("forest"))
                cfg.train.search.forest_axes = parse_axes(s.at("forest"), "config.train.search.forest");
            if (s.contains("gbm"))
                cfg.train.search.gbm_axes = parse_axes(s.at("gbm"), "config.train.search.gbm");
        }
    }

    if (doc.contains("eval")) {
        const json& e = doc.at("eval");
        check_keys(e, "config.eval", {"threshold"});
        cfg.eval_config.threshold =
            get_or<double>(e, "threshold", cfg.eval_config.threshold, "config.eval");
        if (cfg.eval_config.threshold <= 0.0 || cfg.eval_config.threshold >= 1.0)
            throw ConfigError("config.eval.threshold: must be inside (0, 1)");
    }

    if (doc.contains("report")) {
        const json& r = doc.at("report");
        check_keys(r, "config.report", {"formats"});
        if (r.contains("formats")) {
            cfg.report.formats = r.at("formats").get<std::vector<std::string>>();
            for (const auto& f : cfg.report.formats)
                if (f != "markdown" && f != "csv")
                    throw ConfigError("config.report.formats: unknown format '" + f + "'");
            if (cfg.report.formats.empty())
                throw ConfigError("config.report.formats: must not be empty");
        }
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    json doc;
    try {
        doc = json::parse(buf.str());
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": invalid JSON: " + e.what());
    }
    return config_from_json(doc);
}

namespace {

json binning_json(const RunConfig& cfg) {
    json months = json::object();
    for (int m = 1; m <= 12; ++m)
        months[std::to_string(m)] =
            std::string(season_name(cfg.binning.season_of_month[m - 1]));
    return months;
}

json inputs_json(const RunConfig& cfg) {
    return json{{"regions", cfg.inputs.regions},
                {"crimes", cfg.inputs.crimes},
                {"streetlights", cfg.inputs.streetlights},
                {"pois", cfg.inputs.pois},
                {"checkins", cfg.inputs.checkins},
                {"demographics", cfg.inputs.demographics},
                {"timezone_offset_minutes", cfg.timezone_offset_minutes}};
}

json dataset_json(const RunConfig& cfg) {
    return json{{"years", cfg.dataset.years},
                {"undersample_ratio", cfg.dataset.undersample_ratio},
                {"n_folds", cfg.dataset.n_folds}};
}

json train_json(const RunConfig& cfg) {
    std::vector<std::string> classifiers;
    for (auto c : cfg.train.classifiers) classifiers.emplace_back(eval::classifier_name(c));
    json axes_f = json::object(), axes_g = json::object();
    for (const auto& [k, v] : cfg.train.search.forest_axes) axes_f[k] = v;
    for (const auto& [k, v] : cfg.train.search.gbm_axes) axes_g[k] = v;
    const auto& p = cfg.train.params;
    return json{
        {"models", cfg.train.models.empty() ? std::vector<std::string>{"all"} : cfg.train.models},
        {"classifiers", classifiers},
        {"forest",
         {{"n_trees", p.forest.n_trees},
          {"max_depth", p.forest.max_depth},
          {"min_leaf", p.forest.min_leaf},
          {"max_features", p.forest.max_features},
          {"bootstrap", p.forest.bootstrap}}},
        {"gbm",
         {{"n_rounds", p.gbm.n_rounds},
          {"learning_rate", p.gbm.learning_rate},
          {"max_depth", p.gbm.max_depth},
          {"min_leaf", p.gbm.min_leaf},
          {"subsample", p.gbm.subsample}}},
        {"mlp",
         {{"encoder_width", p.mlp.encoder_width},
          {"joint1", p.mlp.joint1},
          {"joint2", p.mlp.joint2},
          {"learning_rate", p.mlp.learning_rate},
          {"momentum", p.mlp.momentum},
          {"batch_size", p.mlp.batch_size},
          {"epochs", p.mlp.epochs}}},
        {"search",
         {{"enabled", cfg.train.search.enabled},
          {"n_samples", cfg.train.search.n_samples},
          {"forest", axes_f},
          {"gbm", axes_g}}}};
}

}  // namespace

json config_slice(const RunConfig& cfg, std::string_view stage) {
    const auto& sc = cfg.synth_config;
    json synth = cfg.has_synth
                     ? json{{"grid_size", sc.grid_size},
                            {"start_year", sc.start_year},
                            {"n_years", sc.n_years},
                            {"base_rate", sc.base_rate},
                            {"noise", sc.noise},
                            {"poi_downtown_rate", sc.poi_downtown_rate},
                            {"checkin_mean", sc.checkin_mean},
                            {"users", sc.users},
                            {"multi_crime_rate", sc.multi_crime_rate},
                            {"weights",
                             {{"demographic", sc.weights.demographic},
                              {"demographic_interaction", sc.weights.demographic_interaction},
                              {"streetlight", sc.weights.streetlight},
                              {"poi", sc.weights.poi},
                              {"seasonal", sc.weights.seasonal},
                              {"weekend", sc.weights.weekend}}}}
                     : json();
    if (stage == "synth") return json{{"seed", cfg.seed}, {"synth", synth}};
    if (stage == "features")
        return json{{"inputs", inputs_json(cfg)},
                    {"binning", binning_json(cfg)},
                    {"include_light_distance", cfg.feature_options.include_light_distance},
                    {"years", cfg.dataset.years}};
    if (stage == "dataset")
        return json{{"inputs", inputs_json(cfg)},
                    {"binning", binning_json(cfg)},
                    {"dataset", dataset_json(cfg)}};
    if (stage == "train")
        return json{{"upstream", config_slice(cfg, "dataset")},
                    {"seed", cfg.seed},
                    {"paper_mode", cfg.paper_mode},
                    {"include_light_distance", cfg.feature_options.include_light_distance},
                    {"train", train_json(cfg)}};
    if (stage == "eval")
        return json{{"upstream", config_slice(cfg, "train")},
                    {"threshold", cfg.eval_config.threshold}};
    if (stage == "report")
        return json{{"upstream", config_slice(cfg, "eval")}, {"formats", cfg.report.formats}};
    throw DataError("unknown config slice: " + std::string(stage));
}

std::string config_hash_hex(const json& slice) {
    std::string dump = slice.dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace crimegrid
