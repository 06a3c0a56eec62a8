#pragma once

#include <cstdint>
#include <string>

namespace crimegrid::synth {

// Coefficients of the logistic crime-intensity model planted in the
// synthetic city. Zero weights give a spatially uniform crime process.
struct PlantedWeights {
    double demographic = 0.0;              // main effect of the region risk index
    double demographic_interaction = 0.0;  // risk x time-of-day pattern
    double streetlight = 0.0;              // on standardized light density
    double poi = 0.0;                      // on standardized POI density
    double seasonal = 0.0;
    double weekend = 0.0;
};

struct CityConfig {
    int grid_size = 8;  // G x G square regions
    int start_year = 2012;
    int n_years = 3;
    std::uint64_t seed = 1;
    double base_rate = 0.12;  // cell-level crime probability at the intercept
    double noise = 0.0;       // sd of per-cell logit noise
    PlantedWeights weights;
    double poi_downtown_rate = 30.0;  // mean venues in the downtown corner region
    double checkin_mean = 6.0;        // mean check-ins per venue
    int users = 400;
    double multi_crime_rate = 0.25;   // chance of a second record in a crime cell
};

void validate_config(const CityConfig& config);

struct TruthManifest {
    std::uint64_t seed = 0;
    long long crimes = 0;
    long long streetlights = 0;
    long long pois = 0;
    long long checkins = 0;
    int regions = 0;
    double light_density_mean = 0.0;
    double light_density_sd = 0.0;
    int streetlight_effect_sign = 0;  // sign of the planted weight
    int demographic_effect_sign = 0;
};

// Writes regions.geojson, crimes.csv, streetlights.csv, pois.csv,
// checkins.csv, demographics.csv and truth_manifest.json into out_dir.
// Byte-identical output for identical configs.
TruthManifest generate(const CityConfig& config, const std::string& out_dir);

}  // namespace crimegrid::synth
