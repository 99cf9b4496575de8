#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "homophily/filter.hpp"
#include "homophily/report.hpp"
#include "homophily/sweep.hpp"
#include "homophily/synth.hpp"

using namespace homophily;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

AttributeTable table_from(const std::string& text) {
    std::istringstream in(text);
    return load_attributes(in);
}

// friends counts 5, 10, 20 for users 1, 2, 3
const char* kSmallTable = "1\t5\t0\n2\t10\t0\n3\t20\t0\n";

} // namespace

TEST_CASE("apply_filter keeps strictly-below for HighCut and strictly-above for LowCut") {
    const auto t = table_from(kSmallTable);
    const std::vector<UserId> universe{1, 2, 3};
    CHECK(apply_filter(universe, t, FilterSpec::high_cut(Attribute::friends, 10.0)) ==
          std::vector<UserId>{1});
    CHECK(apply_filter(universe, t, FilterSpec::low_cut(Attribute::friends, 10.0)) ==
          std::vector<UserId>{3});
    CHECK(apply_filter(universe, t, FilterSpec::high_cut(Attribute::friends, 21.0)) == universe);
    CHECK(apply_filter(universe, t, FilterSpec::none()) == universe);
}

TEST_CASE("apply_filter requires attribute records for the whole universe") {
    const auto t = table_from(kSmallTable);
    const std::vector<UserId> universe{1, 2, 9};
    CHECK_THROWS_AS(apply_filter(universe, t, FilterSpec::high_cut(Attribute::friends, 10.0)),
                    NotFoundError);
}

TEST_CASE("FilterSpec rejects non-finite thresholds") {
    CHECK_THROWS_AS(FilterSpec::high_cut(Attribute::ratio, std::nan("")), std::invalid_argument);
    CHECK_THROWS_AS(FilterSpec::low_cut(Attribute::ratio, INFINITY), std::invalid_argument);
}

TEST_CASE("HighCut/LowCut partition the universe around the threshold") {
    std::mt19937 rng(55);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng() % 40;
        std::ostringstream text;
        for (std::size_t u = 1; u <= n; ++u) {
            text << u << '\t' << rng() % 20 << '\t' << rng() % 20 << '\n';
        }
        const auto t = table_from(text.str());
        std::vector<UserId> universe;
        for (std::size_t u = 1; u <= n; ++u) {
            universe.push_back(u);
        }
        const Attribute attribute =
            std::array{Attribute::friends, Attribute::followers, Attribute::ratio}[rng() % 3];
        const double theta = (rng() % 40) / 2.0;

        const auto below = apply_filter(universe, t, {attribute, FilterDirection::high_cut, theta});
        const auto above = apply_filter(universe, t, {attribute, FilterDirection::low_cut, theta});
        std::vector<UserId> at;
        for (const UserId u : universe) {
            if (t.value(u, attribute) == theta) {
                at.push_back(u);
            }
        }
        std::set<UserId> joined(below.begin(), below.end());
        for (const UserId u : above) {
            CHECK(joined.insert(u).second);
        }
        for (const UserId u : at) {
            CHECK(joined.insert(u).second);
        }
        CHECK(joined == std::set<UserId>(universe.begin(), universe.end()));
    }
}

TEST_CASE("shrinking the HighCut threshold never grows the kept set") {
    const auto t = table_from(kSmallTable);
    const std::vector<UserId> universe{1, 2, 3};
    std::vector<UserId> previous = universe;
    for (const double theta : {25.0, 20.0, 12.0, 7.0, 2.0}) {
        const auto kept = apply_filter(universe, t, FilterSpec::high_cut(Attribute::friends, theta));
        CHECK(std::includes(previous.begin(), previous.end(), kept.begin(), kept.end()));
        previous = kept;
    }
}

TEST_CASE("threshold_grid endpoints and geometric midpoint") {
    const std::vector<double> values{1.0, 10000.0};
    const auto grid = threshold_grid(values);
    REQUIRE(grid.size() == 101);
    CHECK_THAT(grid.front(), WithinRel(1.0, 1e-12));
    CHECK_THAT(grid[50], WithinRel(100.0, 1e-9));
    CHECK_THAT(grid.back(), WithinRel(10000.0, 1e-12));
    CHECK(std::is_sorted(grid.begin(), grid.end()));
}

TEST_CASE("threshold_grid collapses when lo equals hi") {
    const std::vector<double> values{5.0, 5.0, 5.0};
    const auto grid = threshold_grid(values);
    REQUIRE(grid.size() == 101);
    for (const double g : grid) {
        CHECK(g == 5.0);
    }
}

TEST_CASE("threshold_grid ignores zeros when deriving the range") {
    const std::vector<double> values{0.0, 2.0, 8.0};
    const auto grid = threshold_grid(values);
    CHECK_THAT(grid.front(), WithinRel(2.0, 1e-12));
    CHECK_THAT(grid[50], WithinRel(4.0, 1e-9));
    CHECK_THAT(grid.back(), WithinRel(8.0, 1e-12));

    CHECK_THROWS_AS(threshold_grid(std::vector<double>{0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(threshold_grid(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("threshold_grid is non-decreasing on random inputs") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> value(0.0, 1e6);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> values(1 + rng() % 50);
        bool any_positive = false;
        for (double& v : values) {
            v = rng() % 8 == 0 ? 0.0 : value(rng);
            any_positive = any_positive || v > 0.0;
        }
        if (!any_positive) {
            continue;
        }
        const auto grid = threshold_grid(values);
        REQUIRE(grid.size() == 101);
        CHECK(std::is_sorted(grid.begin(), grid.end()));
        double lo = 0.0;
        double hi = 0.0;
        for (const double v : values) {
            if (v > 0.0 && (lo == 0.0 || v < lo)) {
                lo = v;
            }
            hi = std::max(hi, v);
        }
        CHECK_THAT(grid.front(), WithinRel(lo, 1e-12));
        CHECK_THAT(grid.back(), WithinRel(hi, 1e-12));
    }
}

namespace {

/// Deterministic fixture with a planted ratio signal at desk scale.
SynthDataset planted_dataset(double beta1, std::uint64_t seed, std::uint64_t n_users = 4000) {
    SynthConfig config;
    config.n_users = n_users;
    config.n_regions = 8;
    config.seed = seed;
    config.beta1 = beta1;
    config.isolated_fraction = 0.2;
    config.locality_base = 0.9;
    return generate(config);
}

} // namespace

TEST_CASE("sweep with direction none is just the baseline") {
    const SynthDataset ds = planted_dataset(3.0, 11, 800);
    const SweepResult result =
        sweep(ds.graph, ds.labels, ds.attributes, Attribute::ratio, FilterDirection::none);
    CHECK(result.curve.empty());
    CHECK_FALSE(result.best.has_value());
    CHECK(result.baseline.n_universe == 800);
    CHECK(sweep_curve_csv(result) ==
          "threshold,accuracy,coverage,n_correct,n_estimable\n," +
              homophily::detail::format_fixed(*result.baseline.accuracy, 6) + ',' +
              homophily::detail::format_fixed(result.baseline.coverage, 6) + ',' +
              std::to_string(result.baseline.n_correct) + ',' +
              std::to_string(result.baseline.n_estimable) + '\n');
}

TEST_CASE("sweep on a constant attribute reduces to the baseline") {
    const auto g = [] {
        std::istringstream in("1\t2\n2\t3\n3\t1\n4\t1\n");
        return load_graph(in);
    }();
    const LabelMap labels({{1, "A"}, {2, "A"}, {3, "A"}, {4, "B"}});
    const auto t = table_from("1\t7\t7\n2\t7\t7\n3\t7\t7\n4\t7\t7\n");

    const SweepResult result =
        sweep(g, labels, t, Attribute::friends, FilterDirection::high_cut);
    REQUIRE(result.curve.size() == 101);
    // Constant attribute: every threshold keeps either everyone (theta above
    // the value is impossible here since grid collapses to the value itself,
    // strict < keeps nobody) or nobody.
    for (const CurvePoint& point : result.curve) {
        CHECK(point.eval.n_estimable == 0);
    }
    CHECK_FALSE(result.best.has_value());
    CHECK(result.baseline.accuracy.has_value());
}

TEST_CASE("sweep recovers a planted ratio signal near threshold 1") {
    const SynthDataset ds = planted_dataset(6.0, 4242);
    SweepOptions options;
    options.workers = 2;
    const SweepResult result = sweep(ds.graph, ds.labels, ds.attributes, Attribute::ratio,
                                     FilterDirection::high_cut, options);
    REQUIRE(result.best.has_value());
    CHECK(result.best->threshold > 0.5);
    CHECK(result.best->threshold < 2.0);
    CHECK(*result.best->eval.accuracy > *result.baseline.accuracy);
    CHECK(result.best->eval.coverage > 0.3);

    // Direct evaluation at theta = 1 beats the baseline too.
    const auto kept =
        apply_filter(ds.graph.users(), ds.attributes, FilterSpec::high_cut(Attribute::ratio, 1.0));
    const EvalResult at_one = evaluate(ds.graph, ds.labels, kept);
    CHECK(*at_one.accuracy > *result.baseline.accuracy);
}

TEST_CASE("sweep curve points agree with apply_filter plus evaluate") {
    const SynthDataset ds = planted_dataset(2.0, 99, 1500);
    const SweepResult result = sweep(ds.graph, ds.labels, ds.attributes, Attribute::followers,
                                     FilterDirection::high_cut);
    for (const std::size_t k : {0UL, 33UL, 100UL}) {
        const CurvePoint& point = result.curve[k];
        const auto kept = apply_filter(ds.graph.users(), ds.attributes,
                                       {Attribute::followers, FilterDirection::high_cut,
                                        point.threshold});
        CHECK(evaluate(ds.graph, ds.labels, kept) == point.eval);
    }
}

TEST_CASE("best point honors the coverage floor and tie-breaks") {
    // Accuracy 1.0 at every non-empty subset: ties everywhere, so the rule
    // (larger coverage, then smaller threshold) fully determines best.
    const auto g = [] {
        std::istringstream in("1\t2\n2\t3\n3\t4\n4\t1\n");
        return load_graph(in);
    }();
    const LabelMap labels({{1, "A"}, {2, "A"}, {3, "A"}, {4, "A"}});
    const auto t = table_from("1\t1\t0\n2\t2\t0\n3\t3\t0\n4\t4\t0\n");

    const SweepResult result =
        sweep(g, labels, t, Attribute::friends, FilterDirection::high_cut);
    REQUIRE(result.best.has_value());
    CHECK(*result.best->eval.accuracy == 1.0);
    // The grid tops out at hi = 4 and HighCut is strict, so user 4 is never
    // kept: the largest reachable subset is {1,2,3} with coverage 0.75,
    // first reached at the smallest grid point above 3. All such points tie
    // on accuracy and coverage; the smallest threshold must win.
    const auto grid = threshold_grid(std::vector<double>{1, 2, 3, 4});
    CHECK(grid.back() == 4.0);
    double expected = 0.0;
    for (const double theta : grid) {
        if (theta > 3.0) {
            expected = theta;
            break;
        }
    }
    CHECK(result.best->threshold == expected);
    CHECK_THAT(result.best->eval.coverage, WithinAbs(0.75, 1e-15));
}

TEST_CASE("the best point dominates every qualifying curve point") {
    const SynthDataset ds = planted_dataset(3.0, 8, 2500);
    for (const auto direction : {FilterDirection::high_cut, FilterDirection::low_cut}) {
        const SweepResult result =
            sweep(ds.graph, ds.labels, ds.attributes, Attribute::ratio, direction);
        REQUIRE(result.best.has_value());
        CHECK(result.best->eval.coverage > 0.3);
        for (const CurvePoint& point : result.curve) {
            if (point.eval.coverage > 0.3 && point.eval.accuracy) {
                CHECK(*point.eval.accuracy <= *result.best->eval.accuracy);
            }
        }
    }
}

TEST_CASE("run_experiment emits five rows with the planted row on top") {
    const SynthDataset ds = planted_dataset(6.0, 31337);
    ExperimentOptions options;
    options.workers = 2;
    const ExperimentReport report =
        run_experiment(ds.graph, ds.labels, ds.attributes, options);
    REQUIRE(report.rows.size() == 5);
    CHECK(report.rows[0].attribute == Attribute::friends);
    CHECK(report.rows[0].direction == FilterDirection::high_cut);
    CHECK(report.rows[1].attribute == Attribute::followers);
    CHECK(report.rows[2].attribute == Attribute::ratio);
    CHECK(report.rows[2].direction == FilterDirection::high_cut);
    CHECK(report.rows[3].direction == FilterDirection::low_cut);
    CHECK(report.rows[4].direction == FilterDirection::none);
    CHECK_FALSE(report.rows[4].attribute.has_value());
    CHECK_FALSE(report.rows[4].significant);

    const ExperimentRow& ratio_row = report.rows[2];
    REQUIRE(ratio_row.accuracy.has_value());
    CHECK(ratio_row.significant);
    for (std::size_t i = 0; i < 5; ++i) {
        if (i == 2 || !report.rows[i].accuracy) {
            continue;
        }
        CHECK(*ratio_row.accuracy > *report.rows[i].accuracy);
    }
}

TEST_CASE("label-shuffled datasets star no row in most seeds") {
    const SynthDataset ds = planted_dataset(6.0, 2718);
    std::vector<std::string> tokens;
    for (const auto& e : ds.labels.entries()) {
        tokens.push_back(e.label);
    }

    int clean = 0;
    const int shuffles = 20;
    for (int s = 0; s < shuffles; ++s) {
        std::mt19937 rng(1000 + s);
        std::vector<std::string> shuffled = tokens;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        std::vector<LabelMap::Entry> entries;
        for (std::size_t i = 0; i < shuffled.size(); ++i) {
            entries.push_back({ds.labels.entries()[i].user, shuffled[i]});
        }
        const LabelMap null_labels(entries);
        const ExperimentReport report =
            run_experiment(ds.graph, null_labels, ds.attributes);
        bool any_starred = false;
        for (const ExperimentRow& row : report.rows) {
            any_starred = any_starred || row.significant;
        }
        clean += any_starred ? 0 : 1;
    }
    CHECK(clean >= 18);
}

TEST_CASE("experiment report table renders the result-row format") {
    ExperimentReport report;
    report.baseline = EvalResult::from_counts(353, 1000, 1118);
    ExperimentRow row;
    row.attribute = Attribute::ratio;
    row.direction = FilterDirection::high_cut;
    row.threshold = 0.923;
    row.accuracy = 0.413;
    row.coverage = 0.333;
    row.significant = true;
    report.rows.push_back(row);

    const std::string table = experiment_report_table("United States", report);
    CHECK(table.find("United States") != std::string::npos);
    CHECK(table.find("#friends/#followers") != std::string::npos);
    CHECK(table.find("HighCut") != std::string::npos);
    CHECK(table.find("0.923") != std::string::npos);
    CHECK(table.find("0.413*") != std::string::npos);
    CHECK(table.find("0.333") != std::string::npos);

    // Large thresholds print as integers.
    CHECK(homophily::detail::format_threshold(1452.0) == "1452");
    CHECK(homophily::detail::format_threshold(108004699.0) == "108004699");
    CHECK(homophily::detail::format_threshold(0.923) == "0.923");
}
