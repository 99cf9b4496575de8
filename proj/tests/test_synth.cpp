#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "homophily/stats.hpp"
#include "homophily/synth.hpp"

using namespace homophily;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

fs::path fresh_dir(const std::string& tag) {
    static int counter = 0;
    const fs::path dir =
        fs::temp_directory_path() / ("homophily-test-" + tag + "-" + std::to_string(counter++));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

/// Same-region neighbor fraction per user with at least one neighbor.
std::pair<std::vector<double>, std::vector<double>>
locality_by_ratio(const SynthDataset& ds) {
    std::vector<double> ratios;
    std::vector<double> fractions;
    for (const UserId u : ds.graph.users()) {
        const auto neighbors = ds.graph.neighbors(u);
        if (neighbors.empty()) {
            continue;
        }
        const auto own = ds.labels.label(u);
        std::size_t same = 0;
        for (const UserId v : neighbors) {
            if (ds.labels.label(v) == own) {
                ++same;
            }
        }
        ratios.push_back(ds.attributes.record(u).follow_ratio);
        fractions.push_back(static_cast<double>(same) / static_cast<double>(neighbors.size()));
    }
    return {ratios, fractions};
}

} // namespace

TEST_CASE("generation is a pure function of the config") {
    SynthConfig config;
    config.n_users = 2000;
    config.n_regions = 6;
    config.beta1 = 2.0;
    config.seed = 42;

    const SynthDataset a = generate(config);
    const SynthDataset b = generate(config);
    CHECK(a.graph == b.graph);
    CHECK(a.attributes.records() == b.attributes.records());

    const fs::path dir_a = fresh_dir("det-a");
    const fs::path dir_b = fresh_dir("det-b");
    emit(a, dir_a);
    emit(b, dir_b);
    for (const char* name : {"edges.tsv", "labels.tsv", "attributes.tsv", "manifest.json"}) {
        CHECK(slurp(dir_a / name) == slurp(dir_b / name));
    }
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
}

TEST_CASE("emitted files round-trip to identical graph statistics") {
    SynthConfig config;
    config.n_users = 1500;
    config.n_regions = 5;
    config.beta1 = 1.0;
    config.seed = 7;
    config.isolated_fraction = 0.3;

    const SynthDataset ds = generate(config);
    const fs::path dir = fresh_dir("roundtrip");
    emit(ds, dir);

    std::ifstream label_in(dir / "labels.tsv", std::ios::binary);
    const LabelMap labels = load_labels(label_in);
    std::ifstream edge_in(dir / "edges.tsv", std::ios::binary);
    const SocialGraph graph = load_graph(edge_in, labels.users());
    std::ifstream attr_in(dir / "attributes.tsv", std::ios::binary);
    const AttributeTable attributes = load_attributes(attr_in);

    CHECK(graph == ds.graph);
    CHECK(graph_stats(graph) == graph_stats(ds.graph));
    CHECK(attributes.records() == ds.attributes.records());

    // Isolated fraction is exact by construction.
    CHECK(graph_stats(graph).n_isolated >= 450);

    // Re-emission is byte-identical.
    const fs::path again = fresh_dir("roundtrip-again");
    emit(SynthDataset{graph, labels, attributes, ds.manifest}, again);
    for (const char* name : {"edges.tsv", "labels.tsv", "attributes.tsv", "manifest.json"}) {
        CHECK(slurp(dir / name) == slurp(again / name));
    }
    fs::remove_all(dir);
    fs::remove_all(again);
}

TEST_CASE("manifest echoes the config verbatim") {
    SynthConfig config;
    config.n_users = 500;
    config.n_regions = 4;
    config.beta1 = 1.5;
    config.beta0 = 0.25;
    config.seed = 99;
    config.ratio_log_sigma = 1.25;

    const fs::path dir = fresh_dir("manifest");
    emit(generate(config), dir);
    const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest["format_version"] == kManifestFormatVersion);
    CHECK(synth_config_from_json(manifest["config"]) == config);
    fs::remove_all(dir);
}

TEST_CASE("synth config json round-trip and unknown fields") {
    SynthConfig config;
    config.n_users = 10;
    config.coupling = "friends";
    nlohmann::ordered_json j;
    to_json(j, config);
    CHECK(synth_config_from_json(j) == config);

    CHECK_THROWS_AS(synth_config_from_json(nlohmann::json{{"bogus", 1}}), ValidationError);
}

TEST_CASE("infeasible configs raise generation errors") {
    SynthConfig config;
    config.n_users = 100;

    SynthConfig bad = config;
    bad.n_regions = 1;
    CHECK_THROWS_AS(generate(bad), GenerationError);

    bad = config;
    bad.locality_base = 1.5;
    CHECK_THROWS_AS(generate(bad), GenerationError);

    bad = config;
    bad.beta1 = -1.0;
    CHECK_THROWS_AS(generate(bad), GenerationError);

    bad = config;
    bad.isolated_fraction = 1.0;
    CHECK_THROWS_AS(generate(bad), GenerationError);

    bad = config;
    bad.n_regions = 60; // more than n_users / 2 regions
    CHECK_THROWS_AS(generate(bad), GenerationError);

    bad = config;
    bad.coupling = "followers";
    CHECK_THROWS_AS(generate(bad), GenerationError);
}

TEST_CASE("attribute marginals satisfy the ratio identity by construction") {
    SynthConfig config;
    config.n_users = 3000;
    config.seed = 5;
    config.n_regions = 10;
    const SynthDataset ds = generate(config);
    REQUIRE(ds.attributes.size() == 3000);
    for (const auto& r : ds.attributes.records()) {
        CHECK(r.follow_ratio == AttributeTable::compute_ratio(r.friends_count, r.followers_count));
    }
    CHECK(ds.labels.size() == 3000);
}

TEST_CASE("beta1 = 0 decouples tie locality from the follow ratio") {
    SynthConfig config;
    config.n_users = 20000;
    config.n_regions = 10;
    config.beta1 = 0.0;
    config.seed = 1;
    config.isolated_fraction = 0.1;

    const auto [ratios, fractions] = locality_by_ratio(generate(config));
    REQUIRE(ratios.size() > 15000);
    CHECK(std::abs(spearman(ratios, fractions)) < 0.05);
}

TEST_CASE("large beta1 plants a strong split in locality at ratio 1") {
    SynthConfig config;
    config.n_users = 20000;
    config.n_regions = 10;
    config.beta1 = 4.0;
    config.seed = 2;
    config.isolated_fraction = 0.1;
    config.ratio_log_sigma = 1.2;

    const auto [ratios, fractions] = locality_by_ratio(generate(config));
    double low_sum = 0.0;
    double high_sum = 0.0;
    std::size_t low_n = 0;
    std::size_t high_n = 0;
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        if (ratios[i] <= 1.0) {
            low_sum += fractions[i];
            ++low_n;
        } else {
            high_sum += fractions[i];
            ++high_n;
        }
    }
    REQUIRE(low_n > 1000);
    REQUIRE(high_n > 1000);
    CHECK(low_sum / low_n - high_sum / high_n > 0.3);
}
