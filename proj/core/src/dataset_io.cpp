#include <carc/dataset_io.hpp>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include <carc/errors.hpp>

namespace carc {

namespace {

using nlohmann::json;

json grid_to_json(const Grid& grid) {
    json rows = json::array();
    for (const auto& row : grid.to_rows()) rows.push_back(row);
    return rows;
}

Grid grid_from_json(const json& rows) {
    std::vector<std::vector<int>> values;
    for (const auto& row : rows) values.push_back(row.get<std::vector<int>>());
    return Grid::from_rows(values);
}

json sample_to_json(const Sample& sample) {
    return {{"input", grid_to_json(sample.input)},
            {"output", grid_to_json(sample.output)},
            {"tier", tier_name(sample.tier)}};
}

Sample sample_from_json(const json& node) {
    Sample sample;
    sample.input = grid_from_json(node.at("input"));
    sample.output = grid_from_json(node.at("output"));
    sample.tier = tier_from_name(node.at("tier").get<std::string>());
    return sample;
}

TransformSpec spec_from_signature(const std::string& signature) {
    auto colon = signature.find(':');
    if (colon == std::string::npos)
        throw MismatchError("transform signature lacks a ':': " + signature);
    return make_spec(signature.substr(0, colon), signature.substr(colon + 1));
}

json grammar_node(const VisualGrammar& grammar) {
    json assignment;
    for (int k = 0; k < kIndicatorKinds; ++k)
        assignment[indicator_name(static_cast<IndicatorKind>(k))] =
            spec_signature(grammar.assignment[k]);
    return {{"mode", grammar.mode == Mode::restricted ? "restricted" : "extended"},
            {"triplet", triplet_label(grammar.triplet())},
            {"shape_key", grammar.shape_key},
            {"color_key", color_name(grammar.color_key)},
            {"neighbor_shape", grammar.neighbor_shape},
            {"neighbor_color", color_name(grammar.neighbor_color)},
            {"assignment", assignment}};
}

VisualGrammar grammar_from_node(const json& node) {
    VisualGrammar grammar;
    std::string mode = node.at("mode").get<std::string>();
    if (mode != "restricted" && mode != "extended")
        throw MismatchError("unknown mode: " + mode);
    grammar.mode = mode == "restricted" ? Mode::restricted : Mode::extended;
    grammar.shape_key = node.at("shape_key").get<int>();
    grammar.color_key = color_from_name(node.at("color_key").get<std::string>());
    grammar.neighbor_shape = node.at("neighbor_shape").get<int>();
    grammar.neighbor_color = color_from_name(node.at("neighbor_color").get<std::string>());
    const json& assignment = node.at("assignment");
    for (int k = 0; k < kIndicatorKinds; ++k) {
        IndicatorKind kind = static_cast<IndicatorKind>(k);
        grammar.assignment[k] =
            spec_from_signature(assignment.at(indicator_name(kind)).get<std::string>());
    }
    return grammar;
}

json parse_document(const std::string& text, const char* what) {
    json node = json::parse(text, nullptr, false);
    if (node.is_discarded()) throw MismatchError(std::string("malformed ") + what + " JSON");
    return node;
}

// Missing keys and wrong value types surface as the library's own record
// error, not as json internals.
template <typename F>
auto decode(const char* what, F&& body) {
    try {
        return body();
    } catch (const json::exception& e) {
        throw MismatchError(std::string("malformed ") + what + " record: " + e.what());
    }
}

std::vector<int> triplet_indices_from_labels(const json& labels) {
    std::vector<int> out;
    for (const auto& label : labels) {
        std::string text = label.get<std::string>();
        std::array<TransformFamily, 3> families{};
        size_t start = 0;
        for (int i = 0; i < 3; ++i) {
            size_t plus = text.find('+', start);
            std::string part = i < 2 ? text.substr(start, plus - start) : text.substr(start);
            if (i < 2 && plus == std::string::npos)
                throw MismatchError("malformed triplet label: " + text);
            families[static_cast<size_t>(i)] = family_from_name(part);
            start = plus + 1;
        }
        out.push_back(triplet_index(families));
    }
    return out;
}

json triplet_labels(const std::vector<int>& indices) {
    json out = json::array();
    for (int index : indices) out.push_back(triplet_label(family_triplets().at(static_cast<size_t>(index))));
    return out;
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) lines.push_back(line);
    return lines;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << text;
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace

std::string grammar_to_json(const VisualGrammar& grammar) { return grammar_node(grammar).dump(); }

VisualGrammar grammar_from_json(const std::string& text) {
    return decode("grammar", [&] { return grammar_from_node(parse_document(text, "grammar")); });
}

std::string episode_to_json(const Episode& episode) {
    json study = json::array();
    for (const Sample& sample : episode.study) study.push_back(sample_to_json(sample));
    json queries = json::array();
    for (const Sample& sample : episode.queries) queries.push_back(sample_to_json(sample));
    json node = {{"id", episode.id},
                 {"setup", setup_name(episode.setup)},
                 {"ablation", ablation_name(episode.ablation)},
                 {"grammar", grammar_node(episode.grammar)},
                 {"study", study},
                 {"queries", queries}};
    return node.dump();
}

Episode episode_from_json(const std::string& line) {
    return decode("episode", [&] {
        json node = parse_document(line, "episode");
        Episode episode;
        episode.id = node.at("id").get<uint64_t>();
        episode.setup = setup_from_name(node.at("setup").get<std::string>());
        episode.ablation = ablation_from_name(node.at("ablation").get<std::string>());
        episode.grammar = grammar_from_node(node.at("grammar"));
        for (const auto& sample : node.at("study"))
            episode.study.push_back(sample_from_json(sample));
        for (const auto& sample : node.at("queries"))
            episode.queries.push_back(sample_from_json(sample));
        return episode;
    });
}

std::string split_to_json(const SplitSpec& spec) {
    json node = {{"seed", spec.seed},
                 {"train_triplets", triplet_labels(spec.train_triplets)},
                 {"eval_triplets", triplet_labels(spec.eval_triplets)},
                 {"train_ids", spec.train_ids},
                 {"val_ids", spec.val_ids},
                 {"test_ids", spec.test_ids}};
    return node.dump(2);
}

SplitSpec split_from_json(const std::string& text) {
    return decode("split", [&] {
        json node = parse_document(text, "split");
        SplitSpec spec;
        spec.seed = node.at("seed").get<uint64_t>();
        spec.train_triplets = triplet_indices_from_labels(node.at("train_triplets"));
        spec.eval_triplets = triplet_indices_from_labels(node.at("eval_triplets"));
        spec.train_ids = node.at("train_ids").get<std::vector<uint64_t>>();
        spec.val_ids = node.at("val_ids").get<std::vector<uint64_t>>();
        spec.test_ids = node.at("test_ids").get<std::vector<uint64_t>>();
        return spec;
    });
}

std::string prediction_to_json(const PredictionRecord& record) {
    json node = {{"episode_id", record.episode_id}, {"query_index", record.query_index}};
    node["prediction"] = record.prediction ? grid_to_json(*record.prediction) : json(nullptr);
    return node.dump();
}

PredictionRecord prediction_from_json(const std::string& line) {
    return decode("prediction", [&] {
        json node = parse_document(line, "prediction");
        PredictionRecord record;
        record.episode_id = node.at("episode_id").get<uint64_t>();
        record.query_index = node.at("query_index").get<int>();
        const json& prediction = node.at("prediction");
        if (!prediction.is_null()) record.prediction = grid_from_json(prediction);
        return record;
    });
}

void write_episodes(const std::string& path, const std::vector<Episode>& episodes) {
    std::ostringstream out;
    for (const Episode& episode : episodes) out << episode_to_json(episode) << '\n';
    write_text(path, out.str());
}

std::vector<Episode> read_episodes(const std::string& path) {
    std::vector<Episode> episodes;
    for (const std::string& line : read_lines(path)) episodes.push_back(episode_from_json(line));
    return episodes;
}

void write_split(const std::string& path, const SplitSpec& spec) {
    write_text(path, split_to_json(spec) + "\n");
}

SplitSpec read_split(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return split_from_json(text.str());
}

void write_predictions(const std::string& path, const std::vector<PredictionRecord>& records) {
    std::ostringstream out;
    for (const PredictionRecord& record : records) out << prediction_to_json(record) << '\n';
    write_text(path, out.str());
}

std::vector<PredictionRecord> read_predictions(const std::string& path) {
    std::vector<PredictionRecord> records;
    for (const std::string& line : read_lines(path))
        records.push_back(prediction_from_json(line));
    return records;
}

void write_static_corpus(const std::string& path, const StaticCorpus& corpus) {
    std::ostringstream out;
    out << json{{"grammar", grammar_node(corpus.grammar)}}.dump() << '\n';
    for (const StaticPair& pair : corpus.pairs) {
        json node = sample_to_json(pair.sample);
        node["split"] = pair.split;
        out << node.dump() << '\n';
    }
    write_text(path, out.str());
}

StaticCorpus read_static_corpus(const std::string& path) {
    auto lines = read_lines(path);
    if (lines.empty()) throw MismatchError("static corpus file has no header line");
    return decode("static corpus", [&] {
        StaticCorpus corpus;
        corpus.grammar =
            grammar_from_node(parse_document(lines[0], "corpus header").at("grammar"));
        for (size_t i = 1; i < lines.size(); ++i) {
            json node = parse_document(lines[i], "corpus pair");
            corpus.pairs.push_back({sample_from_json(node), node.at("split").get<std::string>()});
        }
        return corpus;
    });
}

}  // namespace carc
