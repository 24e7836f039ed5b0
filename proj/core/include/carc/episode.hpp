#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <carc/grammar.hpp>
#include <carc/grid.hpp>

namespace carc {

// Study-example regime: either three full compositions, or a systematic
// walk through the grammar (two samples per primitive, two per level-1
// pair). Queries are always level-2.
enum class Setup { three_shot, systematicity };

std::string setup_name(Setup setup);
Setup setup_from_name(const std::string& name);

// Study-schedule ablations of the systematicity setup.
enum class Ablation { none, no_primitives, no_level1 };

std::string ablation_name(Ablation ablation);
Ablation ablation_from_name(const std::string& name);

struct Sample {
    Grid input;
    Grid output;
    Tier tier = Tier::level2;

    bool operator==(const Sample&) const = default;
};

struct Episode {
    uint64_t id = 0;
    VisualGrammar grammar;
    Setup setup = Setup::systematicity;
    Ablation ablation = Ablation::none;
    std::vector<Sample> study;
    std::vector<Sample> queries;

    bool operator==(const Episode&) const = default;
};

}  // namespace carc
