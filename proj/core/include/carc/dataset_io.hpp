#pragma once

#include <optional>
#include <string>
#include <vector>

#include <carc/episode.hpp>
#include <carc/generator.hpp>
#include <carc/metrics.hpp>
#include <carc/split.hpp>

namespace carc {

// Single-line JSON encodings. Episode and prediction files hold one record
// per line; the split manifest and grammar files hold one pretty-printed
// document. All readers throw IoError on unreadable files and MismatchError
// on malformed records.
std::string grammar_to_json(const VisualGrammar& grammar);
VisualGrammar grammar_from_json(const std::string& text);

std::string episode_to_json(const Episode& episode);
Episode episode_from_json(const std::string& line);

std::string split_to_json(const SplitSpec& spec);
SplitSpec split_from_json(const std::string& text);

std::string prediction_to_json(const PredictionRecord& record);
PredictionRecord prediction_from_json(const std::string& line);

void write_episodes(const std::string& path, const std::vector<Episode>& episodes);
std::vector<Episode> read_episodes(const std::string& path);

void write_split(const std::string& path, const SplitSpec& spec);
SplitSpec read_split(const std::string& path);

void write_predictions(const std::string& path, const std::vector<PredictionRecord>& records);
std::vector<PredictionRecord> read_predictions(const std::string& path);

// Fixed-grammar corpus file: a header line holding the grammar, then one
// line per pair.
void write_static_corpus(const std::string& path, const StaticCorpus& corpus);
StaticCorpus read_static_corpus(const std::string& path);

}  // namespace carc
