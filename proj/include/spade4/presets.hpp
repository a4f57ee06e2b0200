#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spade4/benchmarks.hpp"
#include "spade4/errors.hpp"
#include "spade4/ode.hpp"

namespace spade4 {

enum class Method { spade4, seir, sueir, seir_beta_t };

inline std::string method_name(Method m) {
    switch (m) {
        case Method::spade4: return "spade4";
        case Method::seir: return "seir";
        case Method::sueir: return "sueir";
        case Method::seir_beta_t: return "seir_beta_t";
    }
    throw ValidationError("unknown method");
}

inline Method method_from_name(const std::string& name) {
    if (name == "spade4") return Method::spade4;
    if (name == "seir") return Method::seir;
    if (name == "sueir") return Method::sueir;
    if (name == "seir_beta_t") return Method::seir_beta_t;
    throw ValidationError("unknown method \"" + name + "\"");
}

// Default parameters for the bundled synthetic scenario: a SuEIR outbreak in
// a population of 10^6 + 1 with one initial infection.
inline SueirParams synthetic_sueir_params() {
    SueirParams p;
    p.beta = 3.0 / 14.0;
    p.sigma = 0.25;
    p.gamma = 1.0 / 14.0;
    p.mu = 0.75;
    p.population = 1.0e6 + 1.0;
    return p;
}

inline CompartmentState synthetic_initial_state() {
    return {1.0e6, 0.0, 1.0, 0.0, 0.0};
}

// Bundled experiment setups: dataset file, windowing, normalization, training
// sizes, and the interval-backtest split where one is established.
struct DatasetPreset {
    std::string name;
    std::string dataset;  // CSV filename under the data directory, or "synthetic"
    std::optional<std::pair<long, long>> window;
    std::vector<int> train_sizes;
    std::vector<Method> methods{Method::spade4, Method::seir, Method::sueir,
                                Method::seir_beta_t};
    double population = 1.0;
    double scale_fraction = 1.0;
    bool seven_day_average = false;
    int smooth_s = 1;
    TargetKind target = TargetKind::active;
    std::vector<double> e0_multipliers = {0, 1, 5, 10, 15, 20, 25, 50, 80};
    int m1 = 0;  // interval backtest split; 0 = not established
    int m2 = 0;
    int horizon = 7;
};

inline const std::vector<DatasetPreset>& builtin_presets() {
    static const std::vector<DatasetPreset> presets = [] {
        std::vector<DatasetPreset> v;

        DatasetPreset synthetic;
        synthetic.name = "synthetic-sueir";
        synthetic.dataset = "synthetic";
        synthetic.train_sizes = {81, 97, 100, 104, 108, 111, 125};
        synthetic.methods = {Method::spade4, Method::seir, Method::sueir};
        synthetic.population = 1.0;
        synthetic.scale_fraction = 1.0;
        synthetic.smooth_s = 1;  // raise to 15 alongside noise + seven-day averaging
        synthetic.target = TargetKind::active;
        synthetic.e0_multipliers = {0};  // the synthetic outbreak starts with no exposed pool
        v.push_back(synthetic);

        DatasetPreset ebola;
        ebola.name = "ebola-guinea";
        ebola.dataset = "ebola_guinea.csv";
        ebola.train_sizes = {172, 286};
        ebola.population = 135e6;
        ebola.scale_fraction = 1e-3;
        ebola.smooth_s = 10;
        ebola.target = TargetKind::cumulative;
        ebola.m1 = 266;
        ebola.m2 = 286;
        v.push_back(ebola);

        DatasetPreset zika;
        zika.name = "zika-giradot";
        zika.dataset = "zika_giradot.csv";
        zika.train_sizes = {27, 65};
        zika.population = 95e3;
        zika.scale_fraction = 1.0;
        zika.smooth_s = 10;
        zika.target = TargetKind::cumulative;
        zika.m1 = 45;
        zika.m2 = 65;
        v.push_back(zika);

        DatasetPreset flu;
        flu.name = "flu-china";
        flu.dataset = "flu_china.csv";
        flu.train_sizes = {38, 44, 64};
        flu.population = 7e8;
        flu.scale_fraction = 1e-5;
        flu.smooth_s = 10;
        flu.target = TargetKind::cumulative;
        flu.m1 = 44;
        flu.m2 = 64;
        v.push_back(flu);

        DatasetPreset covid2;
        covid2.name = "covid-canada-w2";
        covid2.dataset = "covid_canada.csv";
        covid2.window = {{200, 380}};
        covid2.train_sizes = {54, 90, 99, 108, 117, 126, 135, 144};
        covid2.population = 3.8e7;
        covid2.scale_fraction = 0.1;
        covid2.seven_day_average = true;
        covid2.smooth_s = 15;
        covid2.target = TargetKind::active;
        v.push_back(covid2);

        DatasetPreset covid5 = covid2;
        covid5.name = "covid-canada-w5";
        covid5.window = {{650, 704}};
        covid5.train_sizes = {27, 32, 35, 38, 41, 43, 46};
        v.push_back(covid5);

        return v;
    }();
    return presets;
}

inline const DatasetPreset* find_preset(const std::string& name) {
    for (const DatasetPreset& p : builtin_presets())
        if (p.name == name) return &p;
    return nullptr;
}

}  // namespace spade4
